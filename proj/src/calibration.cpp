// calibration.cpp — q0y scan-plus-golden calibration and structured-spectrum least squares

#include "qdeph/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdeph/errors.hpp"
#include "qdeph/nonmarkov.hpp"

namespace qdeph {

namespace {

constexpr double inv_phi = 0.6180339887498949;   // golden ratio conjugate
constexpr int refine_candidate_cap = 64;

struct Probe {
    double x{0.0};
    double f{std::numeric_limits<double>::infinity()};
};

// Golden-section minimization on [a, b]; returns the best point actually evaluated,
// seeded with the bracket's own samples so refinement can never report worse than the scan.
template <class F>
Probe golden_min(F&& f, double a, double b, Probe seed, double xtol = 1e-10, int max_iter = 200) {
    Probe best = seed;
    auto consider = [&](double x, double fx) {
        if (fx < best.f || (fx == best.f && x < best.x)) best = {x, fx};
    };
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    consider(c, fc);
    consider(d, fd);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            consider(c, fc);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            consider(d, fd);
        }
    }
    const double mid = 0.5 * (a + b);
    consider(mid, f(mid));
    return best;
}

// Model density shape on the data grid (amplitude-free part of the fit).
Eigen::ArrayXd spectrum_shape(const Eigen::ArrayXd& q, double w0, double dv, double q0y) {
    return (-0.5 * w0 * w0 * (q - q0y).square()).exp() * (1.0 - (2.0 * dv * q).cos());
}

// SSE of y ~ a*shape + b with a and b solved analytically (profiled least squares).
double profiled_sse(const Eigen::ArrayXd& shape, const Eigen::ArrayXd& y) {
    const double n = static_cast<double>(y.size());
    const double s1 = shape.sum(), s2 = shape.square().sum();
    const double sy = y.sum(), ssy = (shape * y).sum();
    const double det = n * s2 - s1 * s1;
    if (det <= 1e-30 * n * s2 || det == 0.0) return (y - y.mean()).square().sum();
    const double a = (n * ssy - s1 * sy) / det;
    const double b = (sy - a * s1) / n;
    return (a * shape + b - y).square().sum();
}

} // namespace

CalibrationResult fit_q0y(double w0,
                          const std::vector<std::pair<double, double>>& rows,
                          std::pair<double, double> q0y_range,
                          int n_scan) {
    if (rows.empty()) throw invalid_input("fit_q0y: no rows");
    if (!(w0 > 0.0)) throw invalid_input("fit_q0y: w0 must be positive");
    const auto [lo, hi] = q0y_range;
    if (!(lo >= 0.0) || !(hi <= 30.0) || !(lo < hi))
        throw invalid_input("fit_q0y: q0y_range must lie within [0, 30]");
    if (n_scan < 500) throw invalid_input("fit_q0y: n_scan must be at least 500");

    std::vector<double> nd_model(rows.size());
    auto residual = [&](double q0y) -> double {
        double sum = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            try {
                const EnvParams p{w0, q0y, rows[i].first, 0.0};
                nd_model[i] = blp_measure(trajectory(p, rows[i].first + 4.0 * w0));
                any = true;
            } catch (const engine_error&) {
                return std::numeric_limits<double>::infinity();
            }
            const double err = nd_model[i] - rows[i].second;
            sum += err * err;
        }
        return any ? sum : std::numeric_limits<double>::infinity();
    };

    const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(n_scan, lo, hi);
    Eigen::ArrayXd f(n_scan);
    bool any_ok = false;
    for (int j = 0; j < n_scan; ++j) {
        f(j) = residual(grid(j));
        any_ok = any_ok || std::isfinite(f(j));
    }
    if (!any_ok) throw engine_error("fit_q0y: every scan point failed");

    // scan-local minima, plateau edges included
    std::vector<int> candidates;
    for (int j = 0; j < n_scan; ++j) {
        if (!std::isfinite(f(j))) continue;
        const bool left_ok = j == 0 || f(j) <= f(j - 1);
        const bool right_ok = j == n_scan - 1 || f(j) <= f(j + 1);
        const bool strict = (j > 0 && f(j) < f(j - 1)) || (j < n_scan - 1 && f(j) < f(j + 1));
        if (left_ok && right_ok && strict) candidates.push_back(j);
    }
    const double f_best = f.minCoeff();
    const double keep_below = 4.0 * f_best + 1e-6;
    std::erase_if(candidates, [&](int j) { return f(j) > keep_below; });
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return f(a) < f(b); });
    if (candidates.size() > static_cast<std::size_t>(refine_candidate_cap))
        candidates.resize(static_cast<std::size_t>(refine_candidate_cap));
    if (candidates.empty()) candidates.push_back(static_cast<int>(std::min_element(f.data(), f.data() + n_scan) - f.data()));

    std::vector<Probe> refined;
    for (int j : candidates) {
        const double a = grid(std::max(j - 1, 0));
        const double b = grid(std::min(j + 1, n_scan - 1));
        refined.push_back(golden_min(residual, a, b, Probe{grid(j), f(j)}));
    }

    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& p : refined) best_f = std::min(best_f, p.f);
    Probe chosen{0.0, std::numeric_limits<double>::infinity()};
    for (const auto& p : refined) {
        if (p.f <= best_f * 1.01 && (chosen.f == std::numeric_limits<double>::infinity() || p.x < chosen.x))
            chosen = p;
    }

    CalibrationResult result;
    result.q0y_fit = chosen.x;
    result.residual = residual(chosen.x);   // repopulates nd_model at the chosen point
    result.table.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        result.table.push_back({rows[i].first, rows[i].second, nd_model[i]});
    return result;
}

SpectrumFit fit_spectrum(const EnvironmentSpectrum& env_data, const EnvParams& init) {
    if (env_data.q_grid.size() < 16) throw invalid_input("fit_spectrum: too few samples");
    if (!(init.w0 > 0.0) || !(init.dv > 0.0)) throw invalid_input("fit_spectrum: guess needs w0 > 0 and dv > 0");

    const Eigen::ArrayXd& q = env_data.q_grid;
    const Eigen::ArrayXd& y = env_data.density;
    const double tss = (y - y.mean()).square().sum();
    if (tss <= 1e-30) throw non_convergence("fit_spectrum: flat input density");

    double w0 = init.w0, dv = init.dv, q0y = init.q0y;
    const double w0_lo = 0.5 * init.w0, w0_hi = 2.0 * init.w0;
    const double dv_lo = 0.5 * init.dv, dv_hi = 2.0 * init.dv;
    const double q0_lo = init.q0y - 3.0 / init.w0, q0_hi = init.q0y + 3.0 / init.w0;

    auto sse_at = [&](double w, double d, double q0) {
        return profiled_sse(spectrum_shape(q, w, d, q0), y);
    };

    // one coordinate: n_scan-point bracketing scan of [lo, hi], then golden section
    auto descend = [&](auto value_of_coord, double lo, double hi, int n_scan) {
        Probe best;
        int best_j = 0;
        for (int j = 0; j < n_scan; ++j) {
            const double x = lo + (hi - lo) * static_cast<double>(j) / (n_scan - 1);
            const double fx = value_of_coord(x);
            if (fx < best.f) { best = {x, fx}; best_j = j; }
        }
        const double step = (hi - lo) / (n_scan - 1);
        const double a = std::max(lo, best.x - (best_j > 0 ? step : 0.0));
        const double b = std::min(hi, best.x + (best_j < n_scan - 1 ? step : 0.0));
        return golden_min(value_of_coord, a, b, best);
    };

    // The SSE is smooth in w0 and q0y, but in dv it ripples with period pi/|q|
    // (comb alignment against the data); scan dv densely enough to bracket the
    // true basin instead of aliasing into a neighboring comb minimum.
    const double q_absmax = q.abs().maxCoeff();
    const double dv_step_max = M_PI / (16.0 * std::max(q_absmax, 1.0));
    const int n_dv = std::min(8001, std::max(41, static_cast<int>(std::ceil((dv_hi - dv_lo) / dv_step_max)) + 1));

    double prev = sse_at(w0, dv, q0y);
    constexpr int max_sweeps = 200;
    int sweeps = 0;
    for (; sweeps < max_sweeps; ++sweeps) {
        const Probe pq = descend([&](double x) { return sse_at(w0, dv, x); }, q0_lo, q0_hi, 41);
        q0y = pq.x;
        const Probe pw = descend([&](double x) { return sse_at(x, dv, q0y); }, w0_lo, w0_hi, 41);
        w0 = pw.x;
        const Probe pd = descend([&](double x) { return sse_at(w0, x, q0y); }, dv_lo, dv_hi, n_dv);
        dv = pd.x;
        const double cur = pd.f;
        if (prev - cur <= 1e-12 * std::max(1.0, prev)) { prev = cur; ++sweeps; break; }
        prev = cur;
    }
    if (sweeps >= max_sweeps)
        throw non_convergence("fit_spectrum: coordinate descent exhausted its sweep budget");

    const double r2 = 1.0 - prev / tss;
    if (r2 < 0.5)
        throw non_convergence("fit_spectrum: converged model explains less than half the variance");

    SpectrumFit fit;
    fit.params = {w0, q0y, dv, init.phi};
    fit.residual = prev;
    fit.r_squared = r2;
    fit.sweeps = sweeps;
    return fit;
}

} // namespace qdeph
