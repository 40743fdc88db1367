#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cqed/steady_state.hpp"

namespace cqed {

// ---------------------------------------------------------------------------
// Generic damped least-squares engine
// ---------------------------------------------------------------------------

// Model callable: maps a parameter vector to predicted values, one per datum.
using ModelFn = std::function<std::vector<double>(const std::vector<double> &)>;

struct LeastSquaresOptions {
    int max_iterations = 200;
    double param_tol = 1e-8;      // relative parameter change on accepted step
    double gradient_tol = 1e-10;  // infinity norm of J^T W r
    double initial_damping = 1e-3;
};

struct LeastSquaresResult {
    std::vector<double> params;
    std::vector<double> covariance;  // row-major p x p, (J^T W J)^{-1}
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

// Levenberg-style damped least squares with a numerical Jacobian. The
// damping is halved on every accepted step and doubled on every rejected
// one; termination on relative parameter change, gradient norm, or the
// iteration cap. Non-finite model output at any iterate aborts.
LeastSquaresResult least_squares(const ModelFn &model, const std::vector<double> &params0,
                                 const std::vector<double> &data,
                                 const std::vector<double> &weights,
                                 const LeastSquaresOptions &options = {});

// ---------------------------------------------------------------------------
// Photon-count surfaces
// ---------------------------------------------------------------------------

// Forward declaration; full definition in spectra.hpp.
struct SpectrumSurface;

// A photocount surface in the format of the measured 2D scans: integer
// counts per exposure bin on a (delta_c, delta_a) grid, each pixel the mean
// of `realisations` repeated exposures.
struct CountSurface {
    std::vector<double> delta_c_grid;  // rad/s, strictly increasing
    std::vector<double> delta_a_grid;  // rad/s, strictly increasing
    std::vector<std::int64_t> counts;  // row-major [i_c * n_a + i_a], >= 0
    double exposure = 1e-3;            // s per bin
    int realisations = 1;              // exposures averaged per pixel
    std::optional<std::uint64_t> seed; // present only for synthetic data
    DriveMode mode = DriveMode::CavityDrive;

    std::size_t n_c() const { return delta_c_grid.size(); }
    std::size_t n_a() const { return delta_a_grid.size(); }
    std::int64_t at(std::size_t ic, std::size_t ia) const {
        return counts[ic * n_a() + ia];
    }
};

// Simulated photon counting: per pixel draws `realisations` Poisson samples
// of mean amplitude*value*exposure and stores their mean rounded to the
// nearest count. Deterministic for a given seed.
CountSurface synthesize_counts(const SpectrumSurface &surface, double amplitude,
                               double exposure, int realisations, std::uint64_t seed);

// Same pixel means without shot noise (counts = round(mean)).
CountSurface noiseless_counts(const SpectrumSurface &surface, double amplitude,
                              double exposure);

// ---------------------------------------------------------------------------
// Two-parameter surface fit (cooperativity and amplitude)
// ---------------------------------------------------------------------------

struct FitInit {
    double c0;
    double amplitude0;
};

struct FitResult {
    double c_hat = 0.0;          // recovered cooperativity, >= 0
    double amplitude_hat = 0.0;  // counts-scale factor
    double residual_norm = 0.0;  // reduced chi-square under Poisson weights
    int iterations = 0;
    bool converged = false;
    std::array<std::array<double, 2>, 2> covariance{};  // (C, amplitude)
};

// Shape of the fitted model at unit amplitude: reflected flux at unit
// incident flux for CavityDrive, probe-independent scaled photon number for
// AtomDrive, with g = sqrt(C*kappa*gamma).
std::vector<double> fit_model_values(DriveMode mode, double kappa, double gamma, double c,
                                     const std::vector<double> &delta_c_grid,
                                     const std::vector<double> &delta_a_grid);

// Fits amplitude*model(C) to the counts with Poisson weights
// (variance per pixel max(counts,1)/realisations). kappa and gamma are fixed
// inputs from independent calibration. When no init is given, C0 comes from
// the rough half-width of the central column via C0 = w/gamma - 1 and A0
// from the off-resonant corner mean.
FitResult fit_surface(const CountSurface &data, DriveMode mode, double kappa, double gamma,
                      std::optional<FitInit> init = {},
                      const LeastSquaresOptions &options = {});

} // namespace cqed
