// dephasing.cpp — kappa by trapezoidal quadrature and by the overflow-safe closed form; channel application

#include "qdeph/dephasing.hpp"

#include <cmath>
#include <numbers>

#include "qdeph/errors.hpp"

namespace qdeph {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double ln2 = std::numbers::ln2;

// Trapezoidal integral of density * exp(i*(2*q*dc + phi)) on a uniform grid,
// with the density linearly interpolated onto an m-fold finer grid.
std::complex<double> oscillatory_trapezoid(const Eigen::ArrayXd& q, const Eigen::ArrayXd& density,
                                           double dc, double phi, Eigen::Index m) {
    const auto n = q.size();
    const double dq = (q(n - 1) - q(0)) / static_cast<double>(n - 1);
    const double h = dq / static_cast<double>(m);
    std::complex<double> acc = 0.0;
    double prev_re = 0.0, prev_im = 0.0;
    bool have_prev = false;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
        for (Eigen::Index s = (i == 0 ? 0 : 1); s <= m; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(m);
            const double qq = q(i) + t * dq;
            const double rho = density(i) + t * (density(i + 1) - density(i));
            const double ph = 2.0 * qq * dc + phi;
            const double re = rho * std::cos(ph), im = rho * std::sin(ph);
            if (have_prev) acc += std::complex<double>(0.5 * h * (prev_re + re), 0.5 * h * (prev_im + im));
            prev_re = re;
            prev_im = im;
            have_prev = true;
        }
    }
    return acc;
}

} // namespace

Kappa kappa_quadrature(const EnvironmentSpectrum& env, double dc, double phi) {
    const auto n = env.q_grid.size();
    if (n < 2) throw invalid_input("kappa_quadrature: spectrum needs at least 2 samples");
    if (!std::isfinite(dc)) throw invalid_input("kappa_quadrature: dc must be finite");

    const double dq = (env.q_grid(n - 1) - env.q_grid(0)) / static_cast<double>(n - 1);
    Eigen::Index m = 1;
    if (dc != 0.0) {
        const double required = pi / (10.0 * std::abs(dc));
        if (dq > required) m = static_cast<Eigen::Index>(std::ceil(dq / required));
    }

    std::complex<double> z;
    if (m == 1) {
        const Eigen::ArrayXd phase = 2.0 * dc * env.q_grid + phi;
        const Eigen::ArrayXd re = env.density * phase.cos();
        const Eigen::ArrayXd im = env.density * phase.sin();
        z = {trapezoid(env.q_grid, re), trapezoid(env.q_grid, im)};
    } else {
        z = oscillatory_trapezoid(env.q_grid, env.density, dc, phi, m);
    }

    const double mag = std::abs(z);
    if (mag > 1.0 + 1e-9)
        throw engine_error("kappa_quadrature: |kappa| exceeds 1 beyond tolerance; spectrum is not normalized");
    if (mag > 1.0) z /= mag;
    return {z, dc};
}

double kappa_closed_form(const EnvParams& params, double dc) {
    if (!(params.w0 > 0.0)) throw invalid_input("kappa_closed_form: w0 must be positive");
    if (params.dv < 0.0) throw invalid_input("kappa_closed_form: dv must be non-negative");
    if (!std::isfinite(dc)) throw invalid_input("kappa_closed_form: dc must be finite");

    const double w0sq = params.w0 * params.w0;
    const double u = std::exp(-2.0 * params.dv * params.dv / w0sq);
    const double th = 2.0 * params.dv * params.q0y;
    const double c = std::cos(th), s = std::sin(th);
    const double denom = 1.0 - u * c;
    if (std::abs(denom) <= 1e-6)
        throw degenerate_denominator("kappa_closed_form: 1 - exp(-2*dv^2/w0^2)*cos(2*dv*q0y) ~ 0");

    const double h = 4.0 * std::abs(dc) * params.dv / w0sq;
    if (h == 0.0) return 1.0;   // radicand collapses to the squared denominator

    const double pref_expo = -2.0 * dc * dc / w0sq;
    // The plain form fails past cosh^2 overflow (h ~ 355) and loses precision once
    // the Gaussian prefactor goes subnormal; both regimes reroute to log space,
    // which needs only cosh(h) ~ e^h/2 (exact to double precision for h >= 30).
    const bool log_path = h > 350.0 || (h >= 30.0 && pref_expo < -690.0);

    double val;
    if (!log_path) {
        const double ch = std::cosh(h);
        double rad = (u * ch - c) * (u * ch - c) + (1.0 - u * u) * s * s;
        if (rad < 0.0) {
            if (rad < -1e-12) throw engine_error("kappa_closed_form: negative radicand");
            rad = 0.0;
        }
        val = std::exp(pref_expo) / denom * std::sqrt(rad);
    } else {
        // pull e^L out of the root, L = ln(u*cosh(h)) = h - 2*dv^2/w0^2 - ln 2;
        // the prefactor exponent then collapses to -2*(|dc|-dv)^2/w0^2 - ln 2.
        const double lng = h - 2.0 * params.dv * params.dv / w0sq - ln2;
        if (lng < -300.0) {
            // u*cosh(h) < 1e-130: drop it from the radicand instead of exponentiating -L
            val = std::exp(pref_expo) / denom * std::sqrt(c * c + (1.0 - u * u) * s * s);
        } else {
            const double small = lng < 700.0 ? std::exp(-lng) : 0.0;
            const double bracket = (1.0 - c * small) * (1.0 - c * small)
                                   + (1.0 - u * u) * (s * small) * (s * small);
            const double diff = std::abs(dc) - params.dv;
            const double expo = -2.0 * diff * diff / w0sq - ln2 + 0.5 * std::log(bracket);
            val = std::exp(expo) / denom;
        }
    }
    return std::min(std::max(val, 0.0), 1.0);
}

QubitState evolve_state(const QubitState& rho0, const Kappa& kappa) {
    if (!is_valid_state(rho0)) throw invalid_input("evolve_state: input violates density-matrix invariants");
    const double mag = std::abs(kappa.value);
    if (mag > 1.0 + 1e-9) throw invalid_input("evolve_state: |kappa| > 1 is unphysical");
    std::complex<double> k = kappa.value;
    if (mag > 1.0) k /= mag;
    return {rho0.pop_v, rho0.pop_h, rho0.coh * k};
}

} // namespace qdeph
