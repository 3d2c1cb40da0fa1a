// nonmarkov.hpp — trace-distance trajectories, the positive-increment backflow measure, revival location, sweeps

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdeph/environment.hpp"

namespace qdeph {

inline constexpr int default_trajectory_points = 4000;
inline constexpr double default_nd_threshold = 1e-3;

// Ordered (dc, D) samples of the trace-distance evolution of the optimal pair,
// i.e. D(dc) = |kappa(dc)|. dc is uniform on [0, range] and D(0) = 1.
struct Trajectory {
    Eigen::ArrayXd dc;     // mm, strictly increasing, uniform
    Eigen::ArrayXd d;      // in [0, 1]
    std::string source;    // human-readable provenance
};

enum class Dynamics { Markovian, NonMarkovian };

// nd with its classification and, for non-Markovian dynamics only, the revival location.
struct DynamicsReport {
    double nd{0.0};
    Dynamics classification{Dynamics::Markovian};
    std::optional<double> dc_max;   // present iff classification == NonMarkovian
    double nd_threshold{default_nd_threshold};
};

struct NdSweepPoint {
    double dv{0.0};
    std::optional<double> nd;   // absent iff the engine failed at this dv
    std::string error;          // what failed, empty otherwise
};

struct DcMaxSweepPoint {
    double dv{0.0};
    std::optional<double> dc_max;   // absent for Markovian points and engine failures
    std::string error;
};

struct SweepEntry {
    double dv{0.0};
    std::optional<DynamicsReport> report;
    std::string error;
};

// D(dc) on n_points uniform samples of [0, dc_range]. Uses the closed form when
// the parameters are non-degenerate, otherwise falls back to quadrature on the
// matching analytic spectrum (Gaussian for dv = 0). n_points >= 200.
Trajectory trajectory(const EnvParams& params, double dc_range, int n_points = default_trajectory_points);

// Same, driven by quadrature on an arbitrary (e.g. ingested) spectrum.
Trajectory trajectory(const EnvironmentSpectrum& env, double dc_range, int n_points = default_trajectory_points);

// Sum over consecutive samples of max(0, d[i+1] - d[i]): the discrete integral
// of the positive slope of D. Never negative; 0 for non-increasing trajectories.
double blp_measure(const Trajectory& traj);

Dynamics classify(double nd, double nd_threshold = default_nd_threshold);

// dc of the highest interior local maximum of D (strictly above both neighbors,
// topographic prominence >= 1e-6 to ignore floating-point ripples), refined by
// parabolic interpolation through the three bracketing samples. Absent when the
// trajectory has no such maximum (monotone decay).
std::optional<double> dc_max(const Trajectory& traj);

// Full report. The dc_max slot is gated on the classification so the
// "present iff NonMarkovian" invariant holds; if D is still rising at the window
// edge (no interior maximum yet) the argmax after the first rise is used.
DynamicsReport analyze(const Trajectory& traj, double nd_threshold = default_nd_threshold);

// Per-dv reports over a positive increasing grid; engine failures are recorded
// per point and the sweep continues. Trajectories span [0, dv + 4*w0].
std::vector<SweepEntry> sweep_reports(double w0, double q0y, const Eigen::ArrayXd& dv_grid,
                                      int n_points = default_trajectory_points,
                                      double nd_threshold = default_nd_threshold);

std::vector<NdSweepPoint> nd_sweep(double w0, double q0y, const Eigen::ArrayXd& dv_grid,
                                   int n_points = default_trajectory_points);

std::vector<DcMaxSweepPoint> dcmax_sweep(double w0, double q0y, const Eigen::ArrayXd& dv_grid,
                                         int n_points = default_trajectory_points,
                                         double nd_threshold = default_nd_threshold);

} // namespace qdeph
