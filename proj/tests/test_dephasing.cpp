// test_dephasing.cpp — closed-form decoherence factor, quadrature engine, channel application

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qdeph/dephasing.hpp"
#include "qdeph/environment.hpp"
#include "qdeph/errors.hpp"
#include "qdeph/qstate.hpp"

using namespace qdeph;

namespace {
constexpr double pi = std::numbers::pi;

double closed(double dc, double dv, double q0y, double w0 = 0.88) {
    return kappa_closed_form(EnvParams{w0, q0y, dv, 0.0}, dc);
}
} // namespace

TEST_SUITE("dephasing") {

TEST_CASE("closed form: frozen reference values") {
    CHECK(closed(0.5, 0.68, 27.71) == doctest::Approx(0.073356993803636847).epsilon(1e-12));
    CHECK(closed(1.0, 2.14, 27.71) == doctest::Approx(0.064385798796800661).epsilon(1e-12));
    CHECK(closed(2.14, 2.14, 27.71) == doctest::Approx(0.49999740919340191).epsilon(1e-12));
    CHECK(closed(0.9, 1.34, 5.0) == doctest::Approx(0.24005498918823845).epsilon(1e-12));
    CHECK(closed(3.0, 1.84, 12.0) == doctest::Approx(0.015480148013622753).epsilon(1e-12));
}

TEST_CASE("closed form: overflow-safe branch at large arguments") {
    // revival plateau: |kappa(dc = dv)| -> 1/2 for well-separated beams
    CHECK(closed(10.0, 10.0, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(closed(10.0, 10.0, 27.71) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(closed(8.2327, 8.232, 27.71) == doctest::Approx(0.49999936725246652).epsilon(1e-12));

    // subnormal-prefactor regime stays accurate (checked against float128)
    CHECK(closed(16.93, 4.0, 7.0) == doctest::Approx(1.5123525491769399e-188).epsilon(1e-9));
    CHECK(closed(5.0, 25.0, 3.0) == doctest::Approx(9.1052575036796698e-29).epsilon(1e-9));
}

TEST_CASE("closed form: continuity across the branch switch") {
    const double w0 = 0.88, dv = 6.776, q0y = 3.3;
    const double dc_star = 350.0 * w0 * w0 / (4.0 * dv);
    const double lo = kappa_closed_form(EnvParams{w0, q0y, dv, 0.0}, dc_star * (1.0 - 1e-12));
    const double hi = kappa_closed_form(EnvParams{w0, q0y, dv, 0.0}, dc_star * (1.0 + 1e-12));
    CHECK(std::abs(lo - hi) / lo < 1e-9);
}

TEST_CASE("closed form: exact unit value at zero displacement and even symmetry") {
    for (const double dv : {0.3, 0.7, 2.14, 5.0}) {
        CHECK(closed(0.0, dv, 27.71) == 1.0);
        for (const double dc : {0.4, 1.7, 3.9})
            CHECK(closed(-dc, dv, 27.71) == closed(dc, dv, 27.71));
    }
}

TEST_CASE("closed form: degenerate denominator and argument validation") {
    CHECK_THROWS_AS(closed(1.0, 0.0, 5.0), degenerate_denominator);      // dv = 0: u = 1, cos = 1
    CHECK_THROWS_AS(closed(1.0, 1e-9, 0.0), degenerate_denominator);
    CHECK_THROWS_AS(closed(1.0, 1e-9, 0.0), engine_error);               // same throw, base type
    CHECK_THROWS_AS(closed(1.0, 2.14, 5.0, 0.0), invalid_input);         // w0 = 0
    CHECK_THROWS_AS(closed(1.0, -2.14, 5.0), invalid_input);             // dv < 0
    CHECK_THROWS_AS(closed(std::nan(""), 2.14, 5.0), invalid_input);
}

TEST_CASE("quadrature matches the closed form on analytic spectra") {
    double worst = 0.0;
    for (const double dv : {0.5, 1.0, 2.14}) {
        for (const double q0y : {0.0, 5.0, 27.71}) {
            const EnvParams p{0.88, q0y, dv, 0.0};
            const EnvironmentSpectrum env = build_structured(p);
            for (const double dc : {0.0, 0.3, 1.0, 2.5, 5.0}) {
                const double diff = std::abs(std::abs(kappa_quadrature(env, dc).value)
                                             - kappa_closed_form(p, dc));
                worst = std::max(worst, diff);
            }
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("quadrature on the gaussian spectrum: 1/e point and analytic decay") {
    const EnvironmentSpectrum env = build_gaussian(EnvParams{0.88, 27.71, 0.0, 0.0});
    const double dc_e = 0.62225396744416184;   // w0 / sqrt(2)
    const double k = std::abs(kappa_quadrature(env, dc_e).value);
    CHECK(k == doctest::Approx(0.36787944117144211).epsilon(1e-12));
    CHECK(std::abs(k - std::exp(-1.0)) < 1e-13);

    for (const double dc : {0.1, 0.5, 1.2, 2.0})
        CHECK(std::abs(kappa_quadrature(env, dc).value)
              == doctest::Approx(std::exp(-2.0 * dc * dc / (0.88 * 0.88))).epsilon(1e-10));
}

TEST_CASE("quadrature phase carries the carrier and coupling phase") {
    const EnvironmentSpectrum env = build_gaussian(EnvParams{0.88, 27.71, 0.0, 0.0});
    const double dc = 0.3, phi = 0.7;
    const std::complex<double> z = kappa_quadrature(env, dc, phi).value;
    const std::complex<double> expected = std::polar(1.0, 2.0 * 27.71 * dc + phi);
    CHECK(std::abs(z / std::abs(z) - expected) < 1e-9);

    // phi rotates the phase only
    CHECK(std::abs(kappa_quadrature(env, dc, 0.0).value)
          == doctest::Approx(std::abs(kappa_quadrature(env, dc, 1.234).value)).epsilon(1e-12));

    const Kappa at0 = kappa_quadrature(env, 0.0, 0.4);
    CHECK(std::abs(at0.value) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::arg(at0.value) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("quadrature refines under-resolved oscillations of tabulated densities") {
    // coarse triangular density: 21 nodes over [0, 2], exact piecewise-linear shape
    EnvironmentSpectrum tri;
    tri.q_grid = Eigen::ArrayXd::LinSpaced(21, 0.0, 2.0);
    tri.density = 1.0 - (tri.q_grid - 1.0).abs();

    // dense reference: trapezoid of the same interpolant on 2,000,001 points
    auto dense_ref = [&](double dc) {
        const Eigen::Index n = 2000001;
        const Eigen::ArrayXd qs = Eigen::ArrayXd::LinSpaced(n, 0.0, 2.0);
        Eigen::ArrayXd re(n), im(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto j = static_cast<Eigen::Index>(qs(i) / 0.1);
            j = std::min(j, Eigen::Index{19});
            const double t = (qs(i) - tri.q_grid(j)) / 0.1;
            const double rho = tri.density(j) + t * (tri.density(j + 1) - tri.density(j));
            re(i) = rho * std::cos(2.0 * qs(i) * dc);
            im(i) = rho * std::sin(2.0 * qs(i) * dc);
        }
        return std::abs(std::complex<double>(trapezoid(qs, re), trapezoid(qs, im)));
    };

    CHECK(std::abs(kappa_quadrature(tri, 0.0).value) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(std::abs(kappa_quadrature(tri, 9.0).value) - dense_ref(9.0)) < 1e-4);
    CHECK(std::abs(std::abs(kappa_quadrature(tri, 40.0).value) - dense_ref(40.0)) < 2e-5);
    // without refinement the dc = 40 value aliases to ~28x the true magnitude
    CHECK(std::abs(kappa_quadrature(tri, 40.0).value) < 1e-3);
}

TEST_CASE("quadrature input validation and normalization guard") {
    EnvironmentSpectrum bad;
    bad.q_grid = Eigen::ArrayXd::LinSpaced(1, 0.0, 0.0);
    bad.density = Eigen::ArrayXd::Ones(1);
    CHECK_THROWS_AS(kappa_quadrature(bad, 0.5), invalid_input);

    EnvironmentSpectrum env = build_gaussian(EnvParams{0.88, 5.0, 0.0, 0.0});
    CHECK_THROWS_AS(kappa_quadrature(env, std::nan("")), invalid_input);

    env.density *= 2.0;   // integral 2: |kappa(0)| = 2
    CHECK_THROWS_AS(kappa_quadrature(env, 0.0), engine_error);
}

TEST_CASE("channel application scales coherence and enforces physicality") {
    const auto [p, m] = optimal_pair();

    const QubitState same = evolve_state(p, Kappa{1.0, 0.0});
    CHECK(same.coh == p.coh);

    const QubitState dead = evolve_state(p, Kappa{0.0, 1.0});
    CHECK(std::abs(dead.coh) == 0.0);
    CHECK(dead.pop_v == p.pop_v);

    const std::complex<double> k = std::polar(0.3, 0.9);
    const QubitState a = evolve_state(p, Kappa{k, 1.0});
    const QubitState b = evolve_state(m, Kappa{k, 1.0});
    CHECK(is_valid_state(a));
    CHECK(trace_distance(a, b) == doctest::Approx(0.3).epsilon(1e-12));

    // slight numerical excess is renormalized, real excess is rejected
    const QubitState renorm = evolve_state(p, Kappa{1.0 + 5e-10, 0.0});
    CHECK(is_valid_state(renorm));
    CHECK(std::abs(renorm.coh) <= 0.5 + 1e-12);
    CHECK_THROWS_AS(evolve_state(p, Kappa{1.0 + 1e-8, 0.0}), invalid_input);
    CHECK_THROWS_AS(evolve_state(QubitState{0.7, 0.7, 0.0}, Kappa{0.5, 0.0}), invalid_input);
}

} // TEST_SUITE
