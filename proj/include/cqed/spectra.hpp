#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cqed/model.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

std::vector<double> linspace(double lo, double hi, std::size_t n);

// Detected-flux surface over a 2D detuning grid. values[i_c][i_a] is stored
// row-major; axes are raw rad/s here, the (Dc/kappa, Da/gamma) normalization
// is applied only at export time.
struct SpectrumSurface {
    std::vector<double> delta_c_grid;  // rad/s, strictly increasing
    std::vector<double> delta_a_grid;  // rad/s, strictly increasing
    std::vector<double> values;        // photons/s, row-major [i_c * n_a + i_a]
    DriveMode mode;
    SystemParams params_used;
    double max_sigma_sq = 0.0;  // largest |sigma|^2 seen; > 0.1 breaches weak excitation

    SpectrumSurface(std::vector<double> delta_c, std::vector<double> delta_a,
                    DriveMode mode_, const SystemParams &params);

    std::size_t n_c() const { return delta_c_grid.size(); }
    std::size_t n_a() const { return delta_a_grid.size(); }
    double at(std::size_t ic, std::size_t ia) const { return values[ic * n_a() + ia]; }
};

struct GridPair {
    std::vector<double> delta_c;
    std::vector<double> delta_a;
};

// Grids mirroring the measured scans: Dc/kappa in [-1.5, 1.5],
// Da/gamma in +-15*max(1, C/3); 28x28 points for CavityDrive and 31x31 for
// AtomDrive, times `refine`.
GridPair default_scan_grids(const SystemParams &params, DriveMode mode,
                            std::size_t refine = 1);

// Full 2D scan of the reflected flux at every (delta_c, delta_a) grid point.
SpectrumSurface scan_2d(const SystemParams &params, const ProbeConfig &probe,
                        const std::vector<double> &delta_c_grid,
                        const std::vector<double> &delta_a_grid);

// 1D cut along Da = Dc (cavity tuned to the free-space atomic resonance):
// the transparency window for CavityDrive, the Purcell-enhanced emission
// peak for AtomDrive.
struct Spectrum1D {
    std::vector<double> detunings;  // rad/s along Da = Dc
    std::vector<double> values;     // photons/s
    DriveMode mode;
    double max_sigma_sq = 0.0;  // weak-excitation diagnostic, as in SpectrumSurface
};

// Requires the grid to span at least +-10*gamma*(1+C); anything narrower
// would bias the width extraction.
Spectrum1D scan_diagonal(const SystemParams &params, const ProbeConfig &probe,
                         const std::vector<double> &detunings);

// Diagonal grid spanning +-span_halfwidths*gamma*(1+C).
std::vector<double> default_diagonal_grid(const SystemParams &params,
                                          std::size_t n_points = 801,
                                          double span_halfwidths = 10.0);

struct LorentzianGuess {
    double center;
    double halfwidth;
    double amplitude;
    double offset;
};

// offset + amplitude * w^2 / ((x-x0)^2 + w^2); amplitude is signed
// (negative for dips). halfwidth is the HWHM, returned positive with its
// standard error from the fit covariance.
struct LorentzianFit {
    double halfwidth;
    double halfwidth_stderr;
    double center;
    double amplitude;
    double offset;
    int iterations;
    bool converged;
};

LorentzianFit lorentzian_halfwidth(const std::vector<double> &x,
                                   const std::vector<double> &y,
                                   std::optional<LorentzianGuess> guess = {});

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

struct LocusPoint {
    double delta_c;  // rad/s
    double delta_a;  // rad/s
};

// Per-column reflection minima of a cavity-drive surface. Columns whose
// minimum sits on the grid edge are excluded and reported; ties resolve to
// the smallest |delta_a|. Retained points trace the avoided-crossing
// hyperbola delta_a = g^2/delta_c.
struct MinimaLocus {
    std::vector<LocusPoint> points;
    std::vector<std::size_t> excluded_columns;
    bool no_coupling = false;  // g = 0: no atomic minimum exists
};

MinimaLocus minima_locus(const SpectrumSurface &surface);

// Positions of the two broad emission maxima along the scaled diagonal
// delta = Da/gamma = Dc/kappa, found by maximizing the atom-drive photon
// number numerically. They sit at +-sqrt(C-1); below C = 1 the spectrum has
// a single central peak and `split` is false.
struct ButterflyPeaks {
    double delta_minus;
    double delta_plus;
    bool split;
};

ButterflyPeaks butterfly_peaks(const SystemParams &params);

// Aggregate of the extracted spectral features, filled per drive mode.
struct FeatureSet {
    MinimaLocus locus;
    std::optional<ButterflyPeaks> butterfly;
    std::optional<LorentzianFit> halfwidth;
};

} // namespace cqed
