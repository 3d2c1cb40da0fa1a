// calibration.hpp — pin down q0y from reference nd rows; fit analytic spectrum parameters to data

#pragma once

#include <utility>
#include <vector>

#include "qdeph/environment.hpp"

namespace qdeph {

struct CalibrationRow {
    double dv{0.0};
    double nd_target{0.0};
    double nd_model{0.0};
};

struct CalibrationResult {
    double q0y_fit{0.0};               // mm^-1
    double residual{0.0};              // sum of squared nd errors at q0y_fit
    std::vector<CalibrationRow> table; // input row order preserved
};

struct SpectrumFit {
    EnvParams params;      // fitted (w0, dv, q0y); phi carried over from the guess
    double residual{0.0};  // sum of squared density errors after amplitude/baseline profiling
    double r_squared{0.0};
    int sweeps{0};         // coordinate-descent sweeps used
};

// Dense scan of q0y over q0y_range (n_scan >= 500 points), then golden-section
// refinement of every scan-local minimum whose value is within 4x (+1e-6) of the
// best (capped at the 64 lowest); reports the smallest q0y among refined minima
// within 1% of the best residual. The objective is sum_i (nd(dv_i; q0y) - target_i)^2
// with nd from the default 4000-point trajectory on [0, dv + 4*w0]. Deterministic.
// Throws invalid_input on empty rows, a range outside [0, 30], or n_scan < 500;
// engine_error if every scan point fails.
CalibrationResult fit_q0y(double w0,
                          const std::vector<std::pair<double, double>>& rows,
                          std::pair<double, double> q0y_range = {0.0, 30.0},
                          int n_scan = 3001);

// Least-squares fit of the structured-spectrum shape
//   a * exp(-w0^2 (q-q0y)^2 / 2) * (1 - cos(2*dv*q)) + b
// to a tabulated density. Amplitude a and baseline b are profiled out analytically
// per evaluation; (w0, dv, q0y) descend coordinate-wise (bracketing scan plus
// golden section per coordinate; the dv scan is densified to resolve the
// pi/|q|-period comb-alignment ripple) inside a box around the guess: w0 and dv
// in [g/2, 2g], q0y in g +/- 3/w0_guess. Throws non_convergence after 200 sweeps,
// on flat input, or when the converged model explains less than half the variance.
SpectrumFit fit_spectrum(const EnvironmentSpectrum& env_data, const EnvParams& init);

} // namespace qdeph
