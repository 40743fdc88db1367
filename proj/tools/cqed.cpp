// Command-line front end: normal modes, spectra and count surfaces, fits,
// ring-down and group delay. Frequencies are entered and reported in MHz
// (omega/2pi); data files carry raw rad/s axes alongside normalized ones.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cqed/config.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/errors.hpp"
#include "cqed/fitting.hpp"
#include "cqed/io.hpp"
#include "cqed/model.hpp"
#include "cqed/spectra.hpp"
#include "cqed/steady_state.hpp"
#include "cqed/units.hpp"

namespace {

using namespace cqed;

std::string fmt(double x) { return format_double(x); }

std::string mhz(double rad_per_s) { return fmt(angular_to_mhz(rad_per_s)); }

void sanity_warnings(const SystemParams &params) {
    if (params.kappa < params.gamma) {
        std::cerr << "warning: kappa < gamma; check units (kappa/2pi = " << mhz(params.kappa)
                  << " MHz, gamma/2pi = " << mhz(params.gamma) << " MHz)\n";
    }
    if (params.g > 100.0 * params.kappa) {
        std::cerr << "warning: g > 100*kappa; check units (g/2pi = " << mhz(params.g)
                  << " MHz)\n";
    }
}

DriveMode mode_of(const RunConfig &cfg) {
    if (cfg.mode == "cavity") return DriveMode::CavityDrive;
    if (cfg.mode == "atom") return DriveMode::AtomDrive;
    throw InvalidInput("mode must be 'cavity' or 'atom', got '" + cfg.mode + "'");
}

GridPair scan_grids(const RunConfig &cfg, const SystemParams &params, DriveMode mode) {
    const std::size_t base = cfg.n_delta_c > 0
                                 ? static_cast<std::size_t>(cfg.n_delta_c)
                                 : (mode == DriveMode::CavityDrive ? 28u : 31u);
    const std::size_t base_a =
        cfg.n_delta_a > 0 ? static_cast<std::size_t>(cfg.n_delta_a) : base;
    const std::size_t refine = std::max<std::size_t>(1, cfg.refine);
    const double c = cooperativity(params);
    const double a_span = cfg.delta_a_span_gamma > 0.0
                              ? cfg.delta_a_span_gamma * params.gamma
                              : 15.0 * std::max(1.0, c / 3.0) * params.gamma;
    const double c_span = cfg.delta_c_span_kappa * params.kappa;
    return {linspace(-c_span, c_span, base * refine),
            linspace(-a_span, a_span, base_a * refine)};
}

std::string join_path(const std::string &dir, const std::string &name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::vector<std::pair<double, double>> hyperbola_overlay(const SystemParams &params) {
    // Avoided-crossing locus Da = g^2/Dc, i.e. y = C/x in normalized axes.
    std::vector<std::pair<double, double>> pts;
    const double c = cooperativity(params);
    if (c <= 0.0) return pts;
    for (int i = 0; i <= 400; ++i) {
        const double x = -1.5 + 3.0 * i / 400.0;
        if (std::abs(x) < 1e-3) continue;
        pts.emplace_back(x, c / x);
    }
    return pts;
}

int cmd_eigen(const RunConfig &cfg, const std::vector<double> &sweep_g_mhz) {
    const SystemParams params = cfg.system_params();
    sanity_warnings(params);
    const double c = cooperativity(params);

    std::printf("system: g/2pi = %s MHz, kappa/2pi = %s MHz, gamma/2pi = %s MHz\n",
                mhz(params.g).c_str(), mhz(params.kappa).c_str(), mhz(params.gamma).c_str());
    std::printf("cooperativity C = %s\n", fmt(c).c_str());

    const Regime regime = classify_regime(params);
    std::printf("regime = %s (g_ep/2pi = %s MHz, g_sc/2pi = %s MHz)\n",
                regime_name(regime.tag), mhz(regime.g_ep).c_str(), mhz(regime.g_sc).c_str());

    const UndampedModes undamped = undamped_eigenfrequencies(params);
    std::printf("undamped modes (MHz rel. atom): omega_plus = %s, omega_minus = %s\n",
                mhz(undamped.omega_plus - params.omega_a).c_str(),
                mhz(undamped.omega_minus - params.omega_a).c_str());

    const ComplexModePair damped = damped_eigenvalues(params);
    const auto signed_mhz = [](double v) {
        const std::string s = angular_to_mhz(v) >= 0.0 ? "+" : "";
        return s + fmt(angular_to_mhz(v));
    };
    std::printf("damped modes (MHz rel. atom):\n");
    std::printf("  omega_plus  = %s %si  (width %s MHz)\n",
                mhz(damped.omega_plus.real() - params.omega_a).c_str(),
                signed_mhz(damped.omega_plus.imag()).c_str(),
                mhz(-damped.omega_plus.imag()).c_str());
    std::printf("  omega_minus = %s %si  (width %s MHz)\n",
                mhz(damped.omega_minus.real() - params.omega_a).c_str(),
                signed_mhz(damped.omega_minus.imag()).c_str(),
                mhz(-damped.omega_minus.imag()).c_str());
    if (damped.degenerate) {
        std::printf("  exceptional point: eigenvalues coalesce, mixing undefined\n");
    } else {
        std::printf("  mixing(+): atom %s, photon %s\n", fmt(damped.mixing_plus.atom).c_str(),
                    fmt(damped.mixing_plus.photon).c_str());
        std::printf("  mixing(-): atom %s, photon %s\n", fmt(damped.mixing_minus.atom).c_str(),
                    fmt(damped.mixing_minus.photon).c_str());
    }

    if (!sweep_g_mhz.empty()) {
        const auto n = static_cast<std::size_t>(sweep_g_mhz[2]);
        if (n < 2) throw InvalidInput("--sweep-g: need at least 2 points");
        std::vector<double> gs = linspace(mhz_to_angular(sweep_g_mhz[0]),
                                          mhz_to_angular(sweep_g_mhz[1]), n);
        const auto sweep = sweep_coupling(params, gs);
        const std::string path = join_path(cfg.out_dir, "eigen_sweep.csv");
        write_text_file(path, sweep_csv(sweep));
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_scan(const RunConfig &cfg, bool overlay) {
    const SystemParams params = cfg.system_params();
    sanity_warnings(params);
    const DriveMode mode = mode_of(cfg);
    const ProbeConfig probe = cfg.probe_config(params);
    const GridPair grids = scan_grids(cfg, params, mode);

    const SpectrumSurface surface = scan_2d(params, probe, grids.delta_c, grids.delta_a);

    double vmax = 0.0;
    std::size_t peak = 0;
    for (std::size_t i = 0; i < surface.values.size(); ++i) {
        if (surface.values[i] > vmax) {
            vmax = surface.values[i];
            peak = i;
        }
    }
    if (vmax == 0.0) {
        std::cerr << "warning: surface is identically zero (no signal; g = "
                  << mhz(params.g) << " MHz)\n";
    }
    if (surface.max_sigma_sq > 0.1) {
        std::cerr << "warning: weak-excitation limit breached (max |sigma|^2 = "
                  << fmt(surface.max_sigma_sq) << "); reduce the probe strength\n";
    }
    if (mode == DriveMode::AtomDrive && vmax > 0.0) {
        // Alternate emission bookkeeping through the coupling mirror.
        const DetuningPair at_peak{surface.delta_c_grid[peak / surface.n_a()],
                                   surface.delta_a_grid[peak % surface.n_a()]};
        std::printf("peak emission 2*kappa_t*|a|^2 = %s photons/s (detected flux %s)\n",
                    fmt(atom_drive_emission_flux(params, probe, at_peak)).c_str(),
                    fmt(vmax).c_str());
    }

    const std::string csv_path = join_path(cfg.out_dir, "surface.csv");
    write_text_file(csv_path, surface_csv(surface));
    std::printf("wrote %s\n", csv_path.c_str());
    if (cfg.format == "json") {
        const std::string json_path = join_path(cfg.out_dir, "surface.json");
        write_text_file(json_path, surface_json(surface));
        std::printf("wrote %s\n", json_path.c_str());
    }

    std::vector<double> xs, ys;
    for (double d : surface.delta_c_grid) xs.push_back(d / params.kappa);
    for (double d : surface.delta_a_grid) ys.push_back(d / params.gamma);
    HeatmapOptions options;
    options.x_label = "Delta_c / kappa";
    options.y_label = "Delta_a / gamma";
    if (overlay && mode == DriveMode::CavityDrive) options.overlay = hyperbola_overlay(params);
    const std::string title = std::string(mode == DriveMode::CavityDrive
                                              ? "reflection, C = "
                                              : "emission, C = ") +
                              fmt(cooperativity(params));
    const std::string svg_path = join_path(cfg.out_dir, "surface.svg");
    write_text_file(svg_path, svg_heatmap({{&surface.values, title}}, xs, ys, options));
    std::printf("wrote %s\n", svg_path.c_str());
    return 0;
}

int cmd_diagonal(const RunConfig &cfg) {
    const SystemParams params = cfg.system_params();
    sanity_warnings(params);
    const ProbeConfig probe = cfg.probe_config(params);
    const std::vector<double> grid = default_diagonal_grid(
        params, static_cast<std::size_t>(cfg.diagonal_points), cfg.diagonal_span_halfwidths);
    const Spectrum1D spec = scan_diagonal(params, probe, grid);

    const std::string path = join_path(cfg.out_dir, "diagonal.csv");
    write_text_file(path, spectrum1d_csv(spec, params));
    std::printf("wrote %s\n", path.c_str());
    if (spec.max_sigma_sq > 0.1) {
        std::cerr << "warning: weak-excitation limit breached (max |sigma|^2 = "
                  << fmt(spec.max_sigma_sq) << "); reduce the probe strength\n";
    }

    const LorentzianFit fit = lorentzian_halfwidth(spec.detunings, spec.values);
    const double expected = params.gamma * (1.0 + cooperativity(params));
    std::printf("lorentzian HWHM = %s MHz (%s gamma), stderr %s MHz\n",
                mhz(fit.halfwidth).c_str(), fmt(fit.halfwidth / params.gamma).c_str(),
                mhz(fit.halfwidth_stderr).c_str());
    std::printf("gamma*(1+C) = %s MHz, relative difference %s\n", mhz(expected).c_str(),
                fmt(fit.halfwidth / expected - 1.0).c_str());
    return 0;
}

int cmd_synth(const RunConfig &cfg) {
    const SystemParams params = cfg.system_params();
    sanity_warnings(params);
    const DriveMode mode = mode_of(cfg);
    const ProbeConfig probe = cfg.probe_config(params);
    const GridPair grids = scan_grids(cfg, params, mode);
    const SpectrumSurface surface = scan_2d(params, probe, grids.delta_c, grids.delta_a);

    const double exposure = cfg.exposure_ms * 1e-3;
    double vmax = 0.0;
    for (double v : surface.values) vmax = std::max(vmax, v);
    double amplitude = cfg.amplitude;
    if (amplitude <= 0.0) {
        if (vmax <= 0.0) throw NumericalError("synth: zero surface, cannot scale to peak counts");
        amplitude = cfg.peak_counts / (vmax * exposure);
    }

    const CountSurface counts =
        cfg.noiseless
            ? noiseless_counts(surface, amplitude, exposure)
            : synthesize_counts(surface, amplitude, exposure,
                                static_cast<int>(cfg.realisations), cfg.seed);

    const std::string csv_path = join_path(cfg.out_dir, "counts.csv");
    const std::string json_path = join_path(cfg.out_dir, "counts.json");
    write_text_file(csv_path, counts_csv(counts));
    write_text_file(json_path, counts_sidecar_json(counts, &params));
    std::printf("wrote %s\n", csv_path.c_str());
    std::printf("wrote %s\n", json_path.c_str());
    std::printf("amplitude = %s counts/(photons/s * s), exposure = %s ms%s\n",
                fmt(amplitude).c_str(), fmt(cfg.exposure_ms).c_str(),
                cfg.noiseless ? ", noiseless" : "");
    return 0;
}

int cmd_fit(const RunConfig &cfg, const std::string &data_path, std::string sidecar_path,
            bool mode_given) {
    if (sidecar_path.empty()) {
        sidecar_path = data_path;
        const auto dot = sidecar_path.find_last_of('.');
        if (dot != std::string::npos) sidecar_path.resize(dot);
        sidecar_path += ".json";
    }
    const std::string csv_text = read_text_file(data_path);
    const std::string sidecar_text = read_text_file(sidecar_path);
    const CountSurface counts = counts_from_text(csv_text, sidecar_text);

    // kappa/gamma come from the sidecar when the data was synthesized with a
    // recorded system (independent calibration); otherwise from the config.
    SidecarParams sp{};
    double kappa, gamma;
    if (sidecar_system_params(sidecar_text, sp)) {
        kappa = mhz_to_angular(sp.kappa_mhz);
        gamma = mhz_to_angular(sp.gamma_mhz);
    } else {
        const SystemParams params = cfg.system_params();
        kappa = params.kappa;
        gamma = params.gamma;
    }
    const DriveMode mode = mode_given ? mode_of(cfg) : counts.mode;

    std::optional<FitInit> init;
    if (cfg.c_init > 0.0 && cfg.amplitude_init > 0.0) {
        init = FitInit{cfg.c_init, cfg.amplitude_init};
    }
    LeastSquaresOptions options;
    options.max_iterations = static_cast<int>(cfg.max_iterations);

    const FitResult fit = fit_surface(counts, mode, kappa, gamma, init, options);

    const std::string fit_path = join_path(cfg.out_dir, "fit.json");
    write_text_file(fit_path, fit_result_json(fit));
    std::printf("wrote %s\n", fit_path.c_str());

    // Side-by-side data / model / normalized-residual heatmaps.
    std::vector<double> data_values(counts.counts.begin(), counts.counts.end());
    std::vector<double> model_values = fit_model_values(
        mode, kappa, gamma, fit.c_hat, counts.delta_c_grid, counts.delta_a_grid);
    for (double &v : model_values) v *= fit.amplitude_hat;
    std::vector<double> residual(data_values.size());
    for (std::size_t i = 0; i < residual.size(); ++i) {
        const double sigma = std::sqrt(std::max(data_values[i], 1.0) /
                                       static_cast<double>(counts.realisations));
        residual[i] = (data_values[i] - model_values[i]) / sigma;
    }
    std::vector<double> xs, ys;
    for (double d : counts.delta_c_grid) xs.push_back(d / kappa);
    for (double d : counts.delta_a_grid) ys.push_back(d / gamma);
    HeatmapOptions hm;
    hm.x_label = "Delta_c / kappa";
    hm.y_label = "Delta_a / gamma";
    const std::string svg_path = join_path(cfg.out_dir, "fit.svg");
    write_text_file(svg_path, svg_heatmap({{&data_values, "data"},
                                           {&model_values, "model, C = " + fmt(fit.c_hat)},
                                           {&residual, "residual / sigma"}},
                                          xs, ys, hm));
    std::printf("wrote %s\n", svg_path.c_str());

    std::printf("C_hat = %s, amplitude = %s, reduced chi2 = %s, iterations = %d, %s\n",
                fmt(fit.c_hat).c_str(), fmt(fit.amplitude_hat).c_str(),
                fmt(fit.residual_norm).c_str(), fit.iterations,
                fit.converged ? "converged" : "NOT converged");
    if (!fit.converged) {
        std::cerr << "fit did not converge within " << cfg.max_iterations << " iterations\n";
        return 1;
    }
    return 0;
}

int cmd_ringdown(const RunConfig &cfg) {
    const SystemParams params = cfg.system_params();
    sanity_warnings(params);
    const ProbeConfig probe = cfg.probe_config(params);
    const TimeWindow window = default_ringdown_window(params);
    const double rate = ringdown_rate(params, probe, window);
    const double expected = 2.0 * params.gamma * (1.0 + cooperativity(params));

    // Export the shut-off decay for inspection.
    const FieldPair start = steady_field(params, probe, DetuningPair{0.0, 0.0});
    ProbeConfig off = probe;
    off.eta = 0.0;
    off.j_in = 0.0;
    off.omega_rabi = 0.0;
    const Trajectory traj = integrate(params, off, DetuningPair{0.0, 0.0}, start,
                                      window.t_end, cfg.dt_over_kappa / params.kappa);
    const std::string path = join_path(cfg.out_dir, "ringdown.csv");
    write_text_file(path, trajectory_csv(traj));
    std::printf("wrote %s\n", path.c_str());

    std::printf("fit window [%s, %s] s\n", fmt(window.t_start).c_str(),
                fmt(window.t_end).c_str());
    std::printf("ring-down rate = %s 1/s (rate/(2*gamma) = %s)\n", fmt(rate).c_str(),
                fmt(rate / (2.0 * params.gamma)).c_str());
    std::printf("2*gamma*(1+C) = %s 1/s, relative difference %s\n", fmt(expected).c_str(),
                fmt(rate / expected - 1.0).c_str());
    return 0;
}

int cmd_groupdelay(const RunConfig &cfg) {
    const SystemParams params = cfg.system_params();
    sanity_warnings(params);
    const double closed = group_delay_closed_form(params);
    const double numeric = group_delay_numeric(params, cfg.domega_over_gamma * params.gamma);
    std::printf("group delay closed form = %s s (%s / kappa)\n", fmt(closed).c_str(),
                fmt(closed * params.kappa).c_str());
    std::printf("group delay numeric     = %s s\n", fmt(numeric).c_str());
    if (std::abs(closed) >= 1e-6 / params.kappa) {
        std::printf("relative difference = %s\n",
                    fmt(std::abs(numeric - closed) / std::abs(closed)).c_str());
    } else {
        std::printf("absolute difference = %s s\n", fmt(std::abs(numeric - closed)).c_str());
    }
    if (std::abs(closed) < 1e-3 / params.kappa) {
        std::printf("note: zero crossing of the dispersion (g is close to gamma)\n");
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Damped atom-cavity spectroscopy toolkit: normal modes, reflection and "
                 "emission spectra, count synthesis and cooperativity fits"};
    app.require_subcommand(1);
    app.footer("Configuration keys and defaults (frequencies in MHz = omega/2pi, exposure in "
               "ms):\n\n" +
               RunConfig{}.to_ini());

    std::string config_path, out_dir, mode, format, data_path, sidecar_path;
    std::uint64_t seed = 0;
    std::vector<double> sweep_g;
    bool no_overlay = false;

    auto *opt_config =
        app.add_option("--config", config_path, "Run configuration file (INI-style)");
    auto *opt_out = app.add_option("--out", out_dir, "Output directory for data files");
    auto *opt_seed = app.add_option("--seed", seed, "RNG seed for synthetic counts");
    auto *opt_mode =
        app.add_option("--mode", mode, "Drive mode: cavity (reflection) or atom (emission)")
            ->check(CLI::IsMember({"cavity", "atom"}));
    auto *opt_format = app.add_option("--format", format, "Data format: csv or json (adds .json)")
                           ->check(CLI::IsMember({"csv", "json"}));

    auto *eigen = app.add_subcommand(
        "eigen", "Cooperativity, regime and complex normal modes (MHz in, MHz out)");
    eigen->add_option("--sweep-g", sweep_g,
                      "Sweep coupling: start_mhz stop_mhz n_points; writes eigen_sweep.csv")
        ->expected(3);
    auto *scan = app.add_subcommand("scan", "2D detuning scan of the detected flux");
    scan->add_flag("--no-overlay", no_overlay, "Suppress the avoided-crossing overlay");
    auto *diagonal =
        app.add_subcommand("diagonal", "1D spectrum along Delta_a = Delta_c with width fit");
    auto *synth = app.add_subcommand("synth", "Synthesize a photocount surface (CSV + sidecar)");
    auto *fit = app.add_subcommand("fit", "Fit cooperativity and amplitude to a count surface");
    fit->add_option("--data", data_path, "Counts CSV path")->required();
    fit->add_option("--sidecar", sidecar_path, "Sidecar JSON path (default: data with .json)");
    auto *ringdown =
        app.add_subcommand("ringdown", "Resonant drive shut-off decay rate of the slow tail");
    auto *groupdelay =
        app.add_subcommand("groupdelay", "Group delay at resonance: closed form vs numeric");

    for (auto *sub : {eigen, scan, diagonal, synth, fit, ringdown, groupdelay}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);

        RunConfig cfg;
        if (*opt_config) cfg = RunConfig::from_ini(read_text_file(config_path));
        if (*opt_out) cfg.out_dir = out_dir;
        if (*opt_seed) cfg.seed = seed;
        if (*opt_mode) cfg.mode = mode;
        if (*opt_format) cfg.format = format;

        if (eigen->parsed()) return cmd_eigen(cfg, sweep_g);
        if (scan->parsed()) return cmd_scan(cfg, !no_overlay);
        if (diagonal->parsed()) return cmd_diagonal(cfg);
        if (synth->parsed()) return cmd_synth(cfg);
        if (fit->parsed()) return cmd_fit(cfg, data_path, sidecar_path, !!*opt_mode);
        if (ringdown->parsed()) return cmd_ringdown(cfg);
        if (groupdelay->parsed()) return cmd_groupdelay(cfg);
        return 2;
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InvalidInput &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
