#pragma once

#include <cstdint>
#include <string>

#include "cqed/model.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

// Flat key-value run configuration with one section per module. Frequencies
// are ordinary frequencies in MHz (omega/2pi) and exposure is in ms, matching
// the reporting conventions of the CLI. Serialization is canonical, so
// write -> read -> write is byte-stable.
struct RunConfig {
    // [system]
    double g_mhz = 95.0;
    double cooperativity = -1.0;  // >= 0 overrides g_mhz via g = sqrt(C*kappa*gamma)
    double kappa_mhz = 3000.0;
    double gamma_mhz = 3.0;
    double omega_c_mhz = 0.0;
    double omega_a_mhz = 0.0;

    // [probe]
    std::string mode = "cavity";  // cavity | atom
    double j_in = 1.0;            // photons/s incident on the input mirror
    double omega_rabi_mhz = 0.01;
    double kappa_t_mhz = -1.0;  // < 0 -> kappa/2
    double r1 = 1.0;
    double r2 = 1.0;

    // [grid]
    std::uint64_t n_delta_c = 0;  // 0 -> mode default (28 cavity / 31 atom)
    std::uint64_t n_delta_a = 0;
    double delta_c_span_kappa = 1.5;
    double delta_a_span_gamma = 0.0;  // 0 -> auto 15*max(1, C/3)
    std::uint64_t refine = 1;

    // [diagonal]
    std::uint64_t diagonal_points = 801;
    double diagonal_span_halfwidths = 10.0;

    // [dynamics]
    double dt_over_kappa = 0.02;
    double domega_over_gamma = 1e-3;  // group-delay finite-difference step

    // [synth]
    double amplitude = 0.0;     // counts per (photon/s * s); 0 -> use peak_counts
    double peak_counts = 200.0; // target mean counts at the surface maximum
    double exposure_ms = 1.0;
    std::int64_t realisations = 40;
    std::uint64_t seed = 1;
    bool noiseless = false;

    // [fit]
    double c_init = 0.0;          // 0 -> auto from the rough diagonal width
    double amplitude_init = 0.0;  // 0 -> auto from the off-resonant corners
    std::int64_t max_iterations = 200;

    // [output]
    std::string out_dir = "out";
    std::string format = "csv";  // csv | json (json additionally writes .json surfaces)

    bool operator==(const RunConfig &) const = default;

    // Canonical INI-style text.
    std::string to_ini() const;
    static RunConfig from_ini(const std::string &text);

    SystemParams system_params() const;
    ProbeConfig probe_config(const SystemParams &params) const;
};

} // namespace cqed
