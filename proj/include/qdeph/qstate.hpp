// qstate.hpp — qubit density-matrix algebra, wave-plate state preparation, trace distance, tomography

#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qdeph {

// 2x2 density matrix of the polarization qubit in the {|V>, |H>} basis.
// rho = [[pop_v, coh], [conj(coh), pop_h]] with coh = <V|rho|H>.
struct QubitState {
    double pop_v{1.0};               // population of |V>
    double pop_h{0.0};               // population of |H>
    std::complex<double> coh{0.0};   // off-diagonal element <V|rho|H>
};

// Wave-plate fast-axis angles, degrees from horizontal, interpreted modulo 180.
struct WaveplateSetting {
    double hwp_deg{0.0};
    double qwp_deg{0.0};
};

// Unit trace, positive populations, |coh|^2 <= pop_v*pop_h, all within tol.
bool is_valid_state(const QubitState& rho, double tol = 1e-12);

// rho as an Eigen matrix in the {|V>, |H>} basis (index 0 = V).
Eigen::Matrix2cd to_matrix(const QubitState& rho);
QubitState state_from_matrix(const Eigen::Matrix2cd& m);

// Pure linear polarization produced by a half-wave plate at hwp_deg acting on |V>.
// The plate maps polarization angle a (from H) to 2*theta - a; the input is a = 90 deg.
QubitState prepare_state(double hwp_deg);

// D(a,b) = (1/2) * sum of |eigenvalues| of a-b, computed in closed form from
// trace and determinant of the 2x2 Hermitian difference. Result in [0, 1].
double trace_distance(const QubitState& a, const QubitState& b);

// The +/-45-degree pure pair (coh = +0.5 and -0.5): the state pair whose
// trace distance under the dephasing channel equals |kappa| exactly.
std::pair<QubitState, QubitState> optimal_pair();

// Transmitted intensity at the H output of a polarizing beam splitter behind
// HWP(hwp_deg) followed by QWP(qwp_deg): Tr(rho * P), in [0, 1].
double tomography_intensity(const QubitState& rho, const WaveplateSetting& s);

// Least-squares linear inversion of a set of (setting, intensity) pairs.
// Unknowns are (pop_h, Re coh, Im coh) with unit trace imposed; a result that
// violates positivity is projected back by eigenvalue clipping + renormalization.
// Throws invalid_input when the design matrix of the settings is rank-deficient.
QubitState tomography_reconstruct(const std::vector<std::pair<WaveplateSetting, double>>& intensities);

// The informationally complete set used throughout: H, V, +45 deg, right circular.
std::array<WaveplateSetting, 4> canonical_settings();

} // namespace qdeph
