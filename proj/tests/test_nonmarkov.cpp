// test_nonmarkov.cpp — trajectories, backflow measure, classification, revival location, sweeps

#include <doctest.h>

#include <cmath>
#include <string>

#include "qdeph/environment.hpp"
#include "qdeph/errors.hpp"
#include "qdeph/nonmarkov.hpp"

using namespace qdeph;

namespace {

Trajectory hand_trajectory(std::initializer_list<double> d_vals) {
    Trajectory t;
    t.d = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(d_vals.size()));
    Eigen::Index i = 0;
    for (const double v : d_vals) t.d(i++) = v;
    t.dc = Eigen::ArrayXd::LinSpaced(t.d.size(), 0.0, static_cast<double>(t.d.size() - 1));
    t.source = "hand";
    return t;
}

} // namespace

TEST_SUITE("nonmarkov") {

TEST_CASE("gaussian environment: pure decay, zero backflow, Markovian verdict") {
    const EnvParams p{0.88, 27.71, 0.0, 0.0};   // dv = 0 forces the quadrature fallback
    const Trajectory t = trajectory(p, 3.0, 1200);
    CHECK(t.source.rfind("gaussian", 0) == 0);
    CHECK(t.dc.size() == 1200);
    CHECK(t.d(0) == doctest::Approx(1.0).epsilon(1e-12));

    double worst = 0.0;
    for (Eigen::Index i = 0; i < t.dc.size(); ++i)
        worst = std::max(worst, std::abs(t.d(i) - std::exp(-2.0 * t.dc(i) * t.dc(i) / (0.88 * 0.88))));
    CHECK(worst < 1e-9);

    CHECK(blp_measure(t) < 1e-12);
    const DynamicsReport r = analyze(t);
    CHECK(r.classification == Dynamics::Markovian);
    CHECK_FALSE(r.dc_max.has_value());
    CHECK_FALSE(dc_max(t).has_value());
}

TEST_CASE("trajectory validation") {
    const EnvParams p{0.88, 27.71, 2.14, 0.0};
    CHECK_THROWS_AS(trajectory(p, 5.0, 199), invalid_input);
    CHECK_THROWS_AS(trajectory(p, 0.0), invalid_input);
    CHECK_THROWS_AS(trajectory(p, -1.0), invalid_input);
    CHECK(trajectory(p, 5.0, 200).d.size() == 200);
    CHECK(trajectory(p, 5.0, 300).source.rfind("structured", 0) == 0);
}

TEST_CASE("backflow measure sums positive increments only") {
    CHECK(blp_measure(hand_trajectory({1.0, 0.2, 0.6, 0.1, 0.3}))
          == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(blp_measure(hand_trajectory({1.0, 0.8, 0.5, 0.2, 0.1, 0.0})) == 0.0);

    // appending a strictly decreasing tail never changes the measure
    const double base = blp_measure(hand_trajectory({1.0, 0.2, 0.6}));
    CHECK(blp_measure(hand_trajectory({1.0, 0.2, 0.6, 0.5, 0.4})) == base);
}

TEST_CASE("classification threshold is strict") {
    CHECK(classify(0.5e-3) == Dynamics::Markovian);
    CHECK(classify(1e-3) == Dynamics::Markovian);
    CHECK(classify(2e-3) == Dynamics::NonMarkovian);
    CHECK(classify(0.5, 0.6) == Dynamics::Markovian);
    CHECK(classify(0.5, 0.4) == Dynamics::NonMarkovian);
    CHECK_THROWS_AS(classify(-0.1), invalid_input);
}

TEST_CASE("revival location: parabolic refinement and ripple rejection") {
    // single prominent interior peak at i = 3; vertex of (0.2, 0.4, 0.3) is 3 + 1/6
    const auto m = dc_max(hand_trajectory({1.0, 0.5, 0.2, 0.4, 0.3, 0.1}));
    REQUIRE(m.has_value());
    CHECK(*m == doctest::Approx(3.0 + 1.0 / 6.0).epsilon(1e-12));

    // a bump of prominence 1e-9 is floating-point ripple; 1e-5 is a real revival
    CHECK_FALSE(dc_max(hand_trajectory({1.0, 0.7, 0.4, 0.2, 0.2 + 1e-9, 0.1})).has_value());
    CHECK(dc_max(hand_trajectory({1.0, 0.7, 0.4, 0.2, 0.2 + 1e-5, 0.1})).has_value());
}

TEST_CASE("revival location lands on the beam separation") {
    const EnvParams p{0.88, 27.712056871, 2.14, 0.0};
    const auto m = dc_max(trajectory(p, 2.14 + 3.52));
    REQUIRE(m.has_value());
    CHECK(*m == doctest::Approx(2.140022).epsilon(5e-4));

    // the dc_max / dv ratio stays at 1 within 1% across nearby carriers
    for (const double q0y : {27.71, 27.7125}) {
        const auto mm = dc_max(trajectory(EnvParams{0.88, q0y, 2.14, 0.0}, 5.66));
        REQUIRE(mm.has_value());
        CHECK(std::abs(*mm / 2.14 - 1.0) < 0.01);
    }
}

TEST_CASE("report gates the revival slot on the classification") {
    for (const double dv : {0.3, 0.7, 1.1, 1.5, 1.9, 2.3}) {
        const DynamicsReport r = analyze(trajectory(EnvParams{0.88, 27.71, dv, 0.0}, dv + 3.52));
        CHECK(r.dc_max.has_value() == (r.classification == Dynamics::NonMarkovian));
        CHECK(r.nd >= 0.0);
        CHECK(r.nd_threshold == default_nd_threshold);
    }
}

TEST_CASE("backflow sweep: frozen values on the working separations") {
    Eigen::ArrayXd grid(6);
    grid << 0.68, 0.70, 1.34, 1.84, 2.14, 4.0;
    const auto pts = nd_sweep(0.88, 27.71, grid);
    REQUIRE(pts.size() == 6);
    const double expected[] = {0.448975805, 0.000000000, 0.265635964,
                               0.396679394, 0.472279165, 0.499964352};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].dv == grid(static_cast<Eigen::Index>(i)));
        CHECK(pts[i].error.empty());
        REQUIRE(pts[i].nd.has_value());
        CHECK(*pts[i].nd == doctest::Approx(expected[i]).scale(1.0).epsilon(1e-6));
    }

    // sweep values agree with a direct trajectory + measure evaluation
    CHECK(*pts[4].nd
          == doctest::Approx(blp_measure(trajectory(EnvParams{0.88, 27.71, 2.14, 0.0}, 5.66)))
                 .epsilon(1e-12));
}

TEST_CASE("revival sweep: absent below threshold, present at strong backflow") {
    Eigen::ArrayXd grid(2);
    grid << 0.70, 2.14;
    const auto pts = dcmax_sweep(0.88, 27.71, grid);
    REQUIRE(pts.size() == 2);
    CHECK_FALSE(pts[0].dc_max.has_value());
    CHECK(pts[0].error.empty());
    REQUIRE(pts[1].dc_max.has_value());
    CHECK(*pts[1].dc_max == doctest::Approx(2.140022).epsilon(5e-4));
}

TEST_CASE("closed-form and spectrum-driven trajectories agree") {
    const EnvParams p{0.88, 27.71, 2.14, 0.0};
    const Trajectory a = trajectory(p, 5.66, 600);
    const Trajectory b = trajectory(build_structured(p), 5.66, 600);
    CHECK(b.source.rfind("spectrum", 0) == 0);
    CHECK((a.d - b.d).abs().maxCoeff() < 1e-9);
    CHECK((a.dc - b.dc).abs().maxCoeff() == 0.0);
}

TEST_CASE("backflow measure is grid-converged at the default resolution") {
    const EnvParams p{0.88, 27.71, 2.14, 0.0};
    const double nd4 = blp_measure(trajectory(p, 5.66, 4000));
    const double nd8 = blp_measure(trajectory(p, 5.66, 8000));
    CHECK(std::abs(nd4 - nd8) < 1e-4);
}

TEST_CASE("sweep validation and per-point success reporting") {
    Eigen::ArrayXd bad(3);
    bad << 0.5, 0.5, 1.0;   // not strictly increasing
    CHECK_THROWS_AS(sweep_reports(0.88, 27.71, bad), invalid_input);
    bad << -0.5, 0.5, 1.0;  // not positive
    CHECK_THROWS_AS(sweep_reports(0.88, 27.71, bad), invalid_input);
    CHECK_THROWS_AS(sweep_reports(0.88, 27.71, Eigen::ArrayXd()), invalid_input);

    Eigen::ArrayXd grid(2);
    grid << 0.68, 2.14;
    const auto entries = sweep_reports(0.88, 27.71, grid);
    REQUIRE(entries.size() == 2);
    for (const auto& e : entries) {
        CHECK(e.error.empty());
        REQUIRE(e.report.has_value());
        CHECK(e.report->nd > 0.0);
    }
    CHECK(entries[0].dv == 0.68);
    CHECK(entries[1].report->classification == Dynamics::NonMarkovian);
}

} // TEST_SUITE
