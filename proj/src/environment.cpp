// environment.cpp — spectral-density construction, normalization, and tabulated-data ingestion

#include "qdeph/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdeph/errors.hpp"

namespace qdeph {

namespace {

constexpr double pi = std::numbers::pi;

Eigen::ArrayXd uniform_grid(double lo, double hi, double max_spacing) {
    const auto n = static_cast<Eigen::Index>(std::ceil((hi - lo) / max_spacing - 1e-9)) + 1;
    return Eigen::ArrayXd::LinSpaced(n, lo, hi);
}

EnvironmentSpectrum normalized(Eigen::ArrayXd q, Eigen::ArrayXd density, const EnvParams& meta) {
    density /= trapezoid(q, density);
    return {std::move(q), std::move(density), meta};
}

double median_of(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + static_cast<long>(mid) - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

} // namespace

double trapezoid(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    const auto n = x.size();
    if (n < 2) return 0.0;
    return (0.5 * (y.head(n - 1) + y.tail(n - 1)) * (x.tail(n - 1) - x.head(n - 1))).sum();
}

double default_grid_spacing(double w0, double dv) {
    const double envelope = 0.02 / w0;
    return dv > 0.0 ? std::min(envelope, pi / (20.0 * dv)) : envelope;
}

EnvironmentSpectrum build_gaussian(const EnvParams& params, double max_spacing) {
    if (!(params.w0 > 0.0)) throw invalid_input("build_gaussian: w0 must be positive");
    const double half = 8.0 / params.w0;
    const double dq = max_spacing > 0.0 ? max_spacing : default_grid_spacing(params.w0, 0.0);
    Eigen::ArrayXd q = uniform_grid(params.q0y - half, params.q0y + half, dq);
    Eigen::ArrayXd density = (-0.5 * params.w0 * params.w0 * (q - params.q0y).square()).exp();
    return normalized(std::move(q), std::move(density), params);
}

EnvironmentSpectrum build_structured(const EnvParams& params, double max_spacing) {
    if (!(params.w0 > 0.0)) throw invalid_input("build_structured: w0 must be positive");
    if (!(params.dv > 0.0)) throw invalid_input("build_structured: dv must be positive (use build_gaussian)");
    const double half = 8.0 / params.w0 + 3.0 * pi / params.dv;
    const double dq = max_spacing > 0.0 ? max_spacing : default_grid_spacing(params.w0, params.dv);
    Eigen::ArrayXd q = uniform_grid(params.q0y - half, params.q0y + half, dq);
    Eigen::ArrayXd density = (-0.5 * params.w0 * params.w0 * (q - params.q0y).square()).exp()
                             * (1.0 - (2.0 * params.dv * q).cos());
    return normalized(std::move(q), std::move(density), params);
}

EnvironmentSpectrum ingest_tabulated(const std::vector<std::pair<double, double>>& rows,
                                     double baseline_window) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n < 16) throw invalid_input("ingest_tabulated: need at least 16 samples");
    if (!(baseline_window > 0.0) || baseline_window > 0.5)
        throw invalid_input("ingest_tabulated: baseline_window must lie in (0, 0.5]");
    for (Eigen::Index i = 1; i < n; ++i)
        if (!(rows[i].first > rows[i - 1].first))
            throw invalid_input("ingest_tabulated: q must be strictly increasing");

    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(baseline_window * static_cast<double>(n)));
    std::vector<double> lo_tail, hi_tail;
    for (std::size_t i = 0; i < k; ++i) {
        lo_tail.push_back(rows[i].second);
        hi_tail.push_back(rows[rows.size() - 1 - i].second);
    }
    const double baseline = 0.5 * (median_of(std::move(lo_tail)) + median_of(std::move(hi_tail)));

    Eigen::ArrayXd q_in(n), y_in(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        q_in(i) = rows[i].first;
        y_in(i) = std::max(rows[i].second - baseline, 0.0);
    }
    if (y_in.maxCoeff() <= 0.0)
        throw invalid_input("ingest_tabulated: density vanishes after baseline removal");

    // resample to a uniform grid with the same sample count
    Eigen::ArrayXd q = Eigen::ArrayXd::LinSpaced(n, q_in(0), q_in(n - 1));
    Eigen::ArrayXd density(n);
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        while (j + 2 < n && q_in(j + 1) <= q(i)) ++j;
        const double t = (q(i) - q_in(j)) / (q_in(j + 1) - q_in(j));
        density(i) = y_in(j) + t * (y_in(j + 1) - y_in(j));
    }
    density /= trapezoid(q, density);
    return {std::move(q), std::move(density), std::nullopt};
}

} // namespace qdeph
