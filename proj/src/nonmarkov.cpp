// nonmarkov.cpp — trajectories, positive-increment measure, revival detection, dv sweeps

#include "qdeph/nonmarkov.hpp"

#include <cmath>
#include <cstdio>

#include "qdeph/dephasing.hpp"
#include "qdeph/errors.hpp"

namespace qdeph {

namespace {

constexpr double peak_prominence_min = 1e-6;

std::string describe(const EnvParams& p) {
    char buf[128];
    if (p.dv > 0.0)
        std::snprintf(buf, sizeof buf, "structured w0=%g dv=%g q0y=%g", p.w0, p.dv, p.q0y);
    else
        std::snprintf(buf, sizeof buf, "gaussian w0=%g q0y=%g", p.w0, p.q0y);
    return buf;
}

void check_trajectory_args(double dc_range, int n_points) {
    if (!(dc_range > 0.0)) throw invalid_input("trajectory: dc_range must be positive");
    if (n_points < 200) throw invalid_input("trajectory: need at least 200 points");
}

// Topographic prominence of peak i: height above the higher of the two valley
// floors separating it from higher terrain (or from the trajectory ends).
double prominence(const Eigen::ArrayXd& d, Eigen::Index i) {
    double left = d(i), right = d(i);
    for (Eigen::Index j = i - 1; j >= 0; --j) {
        if (d(j) > d(i)) break;
        left = std::min(left, d(j));
    }
    for (Eigen::Index j = i + 1; j < d.size(); ++j) {
        if (d(j) > d(i)) break;
        right = std::min(right, d(j));
    }
    return d(i) - std::max(left, right);
}

double refine_parabolic(const Trajectory& traj, Eigen::Index i) {
    const double h = traj.dc(1) - traj.dc(0);
    const double den = traj.d(i - 1) - 2.0 * traj.d(i) + traj.d(i + 1);
    if (den == 0.0) return traj.dc(i);
    const double x = traj.dc(i) + 0.5 * h * (traj.d(i - 1) - traj.d(i + 1)) / den;
    return std::min(std::max(x, traj.dc(i - 1)), traj.dc(i + 1));
}

} // namespace

Trajectory trajectory(const EnvParams& params, double dc_range, int n_points) {
    check_trajectory_args(dc_range, n_points);
    Trajectory traj;
    traj.dc = Eigen::ArrayXd::LinSpaced(n_points, 0.0, dc_range);
    traj.d.resize(n_points);
    traj.source = describe(params);

    bool closed_ok = params.dv > 0.0;
    if (closed_ok) {
        try {
            kappa_closed_form(params, 0.0);
        } catch (const degenerate_denominator&) {
            closed_ok = false;
        }
    }
    if (closed_ok) {
        for (int i = 0; i < n_points; ++i) traj.d(i) = kappa_closed_form(params, traj.dc(i));
        return traj;
    }
    const EnvironmentSpectrum env = params.dv > 0.0 ? build_structured(params) : build_gaussian(params);
    for (int i = 0; i < n_points; ++i) traj.d(i) = std::abs(kappa_quadrature(env, traj.dc(i), params.phi).value);
    return traj;
}

Trajectory trajectory(const EnvironmentSpectrum& env, double dc_range, int n_points) {
    check_trajectory_args(dc_range, n_points);
    Trajectory traj;
    traj.dc = Eigen::ArrayXd::LinSpaced(n_points, 0.0, dc_range);
    traj.d.resize(n_points);
    char buf[64];
    std::snprintf(buf, sizeof buf, "spectrum n=%ld", static_cast<long>(env.q_grid.size()));
    traj.source = buf;
    for (int i = 0; i < n_points; ++i) traj.d(i) = std::abs(kappa_quadrature(env, traj.dc(i)).value);
    return traj;
}

double blp_measure(const Trajectory& traj) {
    const auto n = traj.d.size();
    if (n < 2) return 0.0;
    return (traj.d.tail(n - 1) - traj.d.head(n - 1)).max(0.0).sum();
}

Dynamics classify(double nd, double nd_threshold) {
    if (nd < 0.0) throw invalid_input("classify: nd must be non-negative");
    return nd > nd_threshold ? Dynamics::NonMarkovian : Dynamics::Markovian;
}

std::optional<double> dc_max(const Trajectory& traj) {
    const auto n = traj.d.size();
    Eigen::Index best = -1;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        if (traj.d(i) > traj.d(i - 1) && traj.d(i) > traj.d(i + 1)
            && prominence(traj.d, i) >= peak_prominence_min
            && (best < 0 || traj.d(i) > traj.d(best)))
            best = i;
    }
    if (best < 0) return std::nullopt;
    return refine_parabolic(traj, best);
}

DynamicsReport analyze(const Trajectory& traj, double nd_threshold) {
    DynamicsReport report;
    report.nd = blp_measure(traj);
    report.classification = classify(report.nd, nd_threshold);
    report.nd_threshold = nd_threshold;
    if (report.classification != Dynamics::NonMarkovian) return report;

    report.dc_max = dc_max(traj);
    if (!report.dc_max) {
        // nd > 0 with no interior maximum: D is still rising at the window edge.
        // Take the argmax past the first rise so the report always locates the revival.
        const auto n = traj.d.size();
        Eigen::Index first_rise = -1;
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            if (traj.d(i + 1) > traj.d(i)) { first_rise = i + 1; break; }
        Eigen::Index best = first_rise;
        for (Eigen::Index i = first_rise; i < n; ++i)
            if (traj.d(i) > traj.d(best)) best = i;
        report.dc_max = traj.dc(best);
    }
    return report;
}

std::vector<SweepEntry> sweep_reports(double w0, double q0y, const Eigen::ArrayXd& dv_grid,
                                      int n_points, double nd_threshold) {
    if (dv_grid.size() == 0) throw invalid_input("sweep: dv grid is empty");
    for (Eigen::Index i = 0; i < dv_grid.size(); ++i) {
        if (!(dv_grid(i) > 0.0)) throw invalid_input("sweep: dv grid must be positive");
        if (i > 0 && !(dv_grid(i) > dv_grid(i - 1))) throw invalid_input("sweep: dv grid must be increasing");
    }
    std::vector<SweepEntry> entries;
    entries.reserve(static_cast<std::size_t>(dv_grid.size()));
    for (Eigen::Index i = 0; i < dv_grid.size(); ++i) {
        SweepEntry e;
        e.dv = dv_grid(i);
        try {
            const EnvParams p{w0, q0y, e.dv, 0.0};
            e.report = analyze(trajectory(p, e.dv + 4.0 * w0, n_points), nd_threshold);
        } catch (const engine_error& err) {
            e.error = err.what();
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<NdSweepPoint> nd_sweep(double w0, double q0y, const Eigen::ArrayXd& dv_grid, int n_points) {
    std::vector<NdSweepPoint> out;
    for (auto& e : sweep_reports(w0, q0y, dv_grid, n_points)) {
        NdSweepPoint p;
        p.dv = e.dv;
        if (e.report) p.nd = e.report->nd;
        p.error = std::move(e.error);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<DcMaxSweepPoint> dcmax_sweep(double w0, double q0y, const Eigen::ArrayXd& dv_grid,
                                         int n_points, double nd_threshold) {
    std::vector<DcMaxSweepPoint> out;
    for (auto& e : sweep_reports(w0, q0y, dv_grid, n_points, nd_threshold)) {
        DcMaxSweepPoint p;
        p.dv = e.dv;
        if (e.report) p.dc_max = e.report->dc_max;   // absent exactly for Markovian points
        p.error = std::move(e.error);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace qdeph
