// environment.hpp — spectral densities of the dephasing environment: analytic builders and data ingestion

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qdeph {

// Analytic environment description. Lengths in mm, momenta in mm^-1, phase in radians.
struct EnvParams {
    double w0{0.88};   // beam waist: sets the Gaussian envelope width of the spectrum
    double q0y{0.0};   // central transverse momentum
    double dv{0.0};    // half-separation of the interfering beams; 0 = unstructured single beam
    double phi{0.0};   // generic coupling phase
};

// Normalized sampled spectral density on a uniform, strictly increasing momentum grid.
struct EnvironmentSpectrum {
    Eigen::ArrayXd q_grid;            // mm^-1
    Eigen::ArrayXd density;           // >= 0, trapezoidal integral = 1
    std::optional<EnvParams> meta;    // provenance when built analytically
};

// General trapezoidal rule (vectorized; grids here are uniform but this does not assume it).
double trapezoid(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

// Grid spacing used by the analytic builders: min(0.02/w0, pi/(20*dv)) for dv > 0,
// 0.02/w0 otherwise. max_spacing > 0 overrides the rule (used by convergence tests).
double default_grid_spacing(double w0, double dv);

// density ~ exp(-w0^2 (q-q0y)^2 / 2), normalized, on q0y +/- 8/w0.
// Throws invalid_input for w0 <= 0. dv in params is ignored.
EnvironmentSpectrum build_gaussian(const EnvParams& params, double max_spacing = 0.0);

// density ~ exp(-w0^2 (q-q0y)^2 / 2) * (1 - cos(2*dv*q)), normalized, on
// q0y +/- (8/w0 + 3*pi/dv) so three full modulation periods lie beyond each tail.
// Throws invalid_input for w0 <= 0 or dv <= 0 (use build_gaussian for dv = 0).
EnvironmentSpectrum build_structured(const EnvParams& params, double max_spacing = 0.0);

// Turns a measured (q, counts) row into a normalized spectrum: subtracts a constant
// baseline (mean of the per-side medians of the outermost baseline_window fraction),
// clips negatives, resamples to a uniform grid by linear interpolation, normalizes.
// Throws invalid_input on fewer than 16 samples, non-increasing q, or an all-zero result.
EnvironmentSpectrum ingest_tabulated(const std::vector<std::pair<double, double>>& rows,
                                     double baseline_window = 0.1);

} // namespace qdeph
