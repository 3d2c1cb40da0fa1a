// qstate.cpp — density-matrix algebra, wave-plate Jones models, linear tomography inversion

#include "qdeph/qstate.hpp"

#include <cmath>
#include <numbers>

#include "qdeph/errors.hpp"

namespace qdeph {

namespace {

constexpr double deg2rad = std::numbers::pi / 180.0;
const std::complex<double> I{0.0, 1.0};

// Jones matrices in the {|H>, |V>} basis, fast axis at theta (radians) from H.
Eigen::Matrix2cd hwp_jones(double theta) {
    const double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
    Eigen::Matrix2cd m;
    m << c, s,
         s, -c;
    return m;
}

Eigen::Matrix2cd qwp_jones(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2cd m;
    m << c * c + I * s * s, (1.0 - I) * s * c,
         (1.0 - I) * s * c, s * s + I * c * c;
    return m;
}

// Projector onto the H output of the PBS behind HWP(hwp) then QWP(qwp), {|H>, |V>} basis.
Eigen::Matrix2cd analysis_projector(const WaveplateSetting& s) {
    const Eigen::Matrix2cd u = qwp_jones(s.qwp_deg * deg2rad) * hwp_jones(s.hwp_deg * deg2rad);
    Eigen::Matrix2cd h_out = Eigen::Matrix2cd::Zero();
    h_out(0, 0) = 1.0;
    return u.adjoint() * h_out * u;
}

// rho in the {|H>, |V>} basis from the {|V>, |H>}-ordered fields.
Eigen::Matrix2cd to_matrix_hv(const QubitState& rho) {
    Eigen::Matrix2cd m;
    m << rho.pop_h, std::conj(rho.coh),
         rho.coh, rho.pop_v;
    return m;
}

void require_valid(const QubitState& rho, const char* who) {
    if (!is_valid_state(rho))
        throw invalid_input(std::string(who) + ": state violates density-matrix invariants");
}

} // namespace

bool is_valid_state(const QubitState& rho, double tol) {
    if (!std::isfinite(rho.pop_v) || !std::isfinite(rho.pop_h) || !std::isfinite(std::abs(rho.coh)))
        return false;
    if (std::abs(rho.pop_v + rho.pop_h - 1.0) > tol) return false;
    if (rho.pop_v < -tol || rho.pop_h < -tol) return false;
    return std::norm(rho.coh) <= rho.pop_v * rho.pop_h + tol;
}

Eigen::Matrix2cd to_matrix(const QubitState& rho) {
    Eigen::Matrix2cd m;
    m << rho.pop_v, rho.coh,
         std::conj(rho.coh), rho.pop_h;
    return m;
}

QubitState state_from_matrix(const Eigen::Matrix2cd& m) {
    return {m(0, 0).real(), m(1, 1).real(), m(0, 1)};
}

QubitState prepare_state(double hwp_deg) {
    if (!std::isfinite(hwp_deg)) throw invalid_input("prepare_state: non-finite angle");
    const double a = (2.0 * hwp_deg - 90.0) * deg2rad;   // polarization angle from H
    const double ch = std::cos(a), sv = std::sin(a);     // (H, V) amplitudes
    return {sv * sv, ch * ch, sv * ch};
}

double trace_distance(const QubitState& a, const QubitState& b) {
    require_valid(a, "trace_distance");
    require_valid(b, "trace_distance");
    const double x = a.pop_v - b.pop_v;
    const double y = a.pop_h - b.pop_h;
    const std::complex<double> c = a.coh - b.coh;
    const double mean = 0.5 * (x + y);
    const double root = std::sqrt(0.25 * (x - y) * (x - y) + std::norm(c));
    const double d = 0.5 * (std::abs(mean + root) + std::abs(mean - root));
    return std::min(std::max(d, 0.0), 1.0);
}

std::pair<QubitState, QubitState> optimal_pair() {
    return {QubitState{0.5, 0.5, 0.5}, QubitState{0.5, 0.5, -0.5}};
}

double tomography_intensity(const QubitState& rho, const WaveplateSetting& s) {
    require_valid(rho, "tomography_intensity");
    const double t = (to_matrix_hv(rho) * analysis_projector(s)).trace().real();
    return std::min(std::max(t, 0.0), 1.0);
}

QubitState tomography_reconstruct(const std::vector<std::pair<WaveplateSetting, double>>& intensities) {
    const auto n = static_cast<Eigen::Index>(intensities.size());
    if (n < 3) throw invalid_input("tomography_reconstruct: need at least 3 settings");

    // I_k = x0*(P_hh - P_vv) + x1*2Re(P_hv) + x2*2Im(P_hv) + P_vv
    // for unknowns x = (rho_hh, Re rho_hv, Im rho_hv), everything in the {|H>, |V>} basis.
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Matrix2cd p = analysis_projector(intensities[k].first);
        A(k, 0) = p(0, 0).real() - p(1, 1).real();
        A(k, 1) = 2.0 * p(0, 1).real();
        A(k, 2) = 2.0 * p(0, 1).imag();
        b(k) = intensities[k].second - p(1, 1).real();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-8);
    if (qr.rank() < 3)
        throw invalid_input("tomography_reconstruct: settings are not informationally complete");
    const Eigen::Vector3d x = qr.solve(b);

    Eigen::Matrix2cd m;   // back in the {|V>, |H>} basis
    m << 1.0 - x(0), std::complex<double>(x(1), -x(2)),
         std::complex<double>(x(1), x(2)), x(0);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
    if (es.eigenvalues().minCoeff() < 0.0) {
        const Eigen::Vector2d lam = es.eigenvalues().cwiseMax(0.0);
        const double tr = lam.sum();
        if (tr <= 0.0) throw invalid_input("tomography_reconstruct: intensities admit no physical state");
        m = es.eigenvectors() * (lam / tr).asDiagonal() * es.eigenvectors().adjoint();
    }
    return state_from_matrix(m);
}

std::array<WaveplateSetting, 4> canonical_settings() {
    return {WaveplateSetting{0.0, 0.0},      // H
            WaveplateSetting{45.0, 0.0},     // V
            WaveplateSetting{22.5, 0.0},     // +45 deg
            WaveplateSetting{0.0, 45.0}};    // right circular
}

} // namespace qdeph
