// dephasing.hpp — decoherence function kappa(dc) by quadrature and closed form; the dephasing channel

#pragma once

#include <complex>

#include "qdeph/environment.hpp"
#include "qdeph/qstate.hpp"

namespace qdeph {

// Decoherence factor at displacement dc. |value| <= 1 + 1e-9; |value(dc=0)| = 1.
struct Kappa {
    std::complex<double> value{1.0};
    double dc{0.0};   // mm
};

// kappa(dc) = integral dq density(q) * exp(i*(2*q*dc + phi)), trapezoidal.
// If the grid under-resolves the oscillation (spacing > pi/(10*|dc|)) the density
// is refined internally by linear interpolation before integrating.
Kappa kappa_quadrature(const EnvironmentSpectrum& env, double dc, double phi = 0.0);

// |kappa(dc)| of the structured environment in closed form, clamped to [0, 1]:
//   exp(-2*dc^2/w0^2) / (1 - u*cos(th)) * sqrt(u^2*(cos^2(th) + cosh^2(h) - 1)
//                                              - 2*u*cos(th)*cosh(h) + 1)
// with u = exp(-2*dv^2/w0^2), th = 2*dv*q0y, h = 4*dc*dv/w0^2. The radicand is
// evaluated through the cancellation-free identity
//   (u*cosh(h) - cos(th))^2 + (1 - u^2)*sin^2(th),
// and through its log-space form where the plain form degrades: h > 350 (cosh^2
// overflow) or a subnormal Gaussian prefactor with h >= 30.
// Throws degenerate_denominator when |1 - u*cos(th)| <= 1e-6 (callers fall back
// to kappa_quadrature); phi does not enter the magnitude.
double kappa_closed_form(const EnvParams& params, double dc);

// Populations kept, coh multiplied by kappa.value. A magnitude in (1, 1+1e-9]
// is renormalized to 1 so the output stays positive semidefinite; anything
// larger is rejected as unphysical (invalid_input).
QubitState evolve_state(const QubitState& rho0, const Kappa& kappa);

} // namespace qdeph
