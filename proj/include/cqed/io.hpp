#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/fitting.hpp"
#include "cqed/spectra.hpp"

namespace cqed {

inline constexpr int kSchemaVersion = 1;

// Stable text formatting used by every exporter, so repeated runs produce
// byte-identical files.
std::string format_double(double x);       // %.12g, for CSV data
std::string format_double_full(double x);  // %.17g, round-trips exactly

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

// Long format with both raw and normalized axes:
// delta_c_rad_s, delta_a_rad_s, delta_c_over_kappa, delta_a_over_gamma, value
std::string surface_csv(const SpectrumSurface &surface);

// detuning_rad_s, detuning_over_gamma, value
std::string spectrum1d_csv(const Spectrum1D &spectrum, const SystemParams &params);

// t_s, re_a, im_a, re_sigma, im_sigma
std::string trajectory_csv(const Trajectory &traj);

// delta_c_rad_s, delta_a_rad_s, counts
std::string counts_csv(const CountSurface &counts);

// g_mhz, re_plus_mhz, re_minus_mhz, im_plus_mhz, im_minus_mhz,
// mix_plus_atom, mix_minus_atom
std::string sweep_csv(const std::vector<SweepPoint> &sweep);

// ---------------------------------------------------------------------------
// JSON (serialized text; schema_version field in every document)
// ---------------------------------------------------------------------------

std::string surface_json(const SpectrumSurface &surface);
std::string counts_sidecar_json(const CountSurface &counts, const SystemParams *params);
std::string fit_result_json(const FitResult &fit);

// Rebuilds a CountSurface from its CSV and JSON sidecar texts.
CountSurface counts_from_text(const std::string &csv_text, const std::string &sidecar_json);

// System parameters recorded in a counts sidecar, when present (MHz values).
struct SidecarParams {
    double g_mhz;
    double kappa_mhz;
    double gamma_mhz;
};
bool sidecar_system_params(const std::string &sidecar_json, SidecarParams &out);

// ---------------------------------------------------------------------------
// SVG heatmaps
// ---------------------------------------------------------------------------

struct HeatmapPanel {
    const std::vector<double> *values;  // row-major [ix * ny + iy]
    std::string title;
};

struct HeatmapOptions {
    std::string x_label = "x";
    std::string y_label = "y";
    // Overlay polyline in axis coordinates; points outside the axes split it.
    std::vector<std::pair<double, double>> overlay;
};

// One or more panels side by side on shared axes, linear color map per
// panel. x/y are the axis sample coordinates (length nx, ny).
std::string svg_heatmap(const std::vector<HeatmapPanel> &panels,
                        const std::vector<double> &x, const std::vector<double> &y,
                        const HeatmapOptions &options);

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_text_file(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

} // namespace cqed
