#include "cqed/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cqed/errors.hpp"
#include "cqed/units.hpp"

namespace cqed {

namespace {

using nlohmann::json;

const char *mode_name(DriveMode mode) {
    return mode == DriveMode::CavityDrive ? "cavity" : "atom";
}

DriveMode mode_from_name(const std::string &name) {
    if (name == "cavity") return DriveMode::CavityDrive;
    if (name == "atom") return DriveMode::AtomDrive;
    throw InvalidInput("unknown drive mode '" + name + "'");
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double_field(const std::string &s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception &) {
        throw InvalidInput("CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

} // namespace

std::string format_double(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string format_double_full(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string surface_csv(const SpectrumSurface &surface) {
    std::string out = "delta_c_rad_s,delta_a_rad_s,delta_c_over_kappa,delta_a_over_gamma,value\n";
    const double kappa = surface.params_used.kappa;
    const double gamma = surface.params_used.gamma;
    for (std::size_t ic = 0; ic < surface.n_c(); ++ic) {
        for (std::size_t ia = 0; ia < surface.n_a(); ++ia) {
            const double dc = surface.delta_c_grid[ic];
            const double da = surface.delta_a_grid[ia];
            out += format_double(dc) + ',' + format_double(da) + ',' +
                   format_double(dc / kappa) + ',' + format_double(da / gamma) + ',' +
                   format_double(surface.at(ic, ia)) + '\n';
        }
    }
    return out;
}

std::string spectrum1d_csv(const Spectrum1D &spectrum, const SystemParams &params) {
    std::string out = "detuning_rad_s,detuning_over_gamma,value\n";
    for (std::size_t i = 0; i < spectrum.detunings.size(); ++i) {
        const double d = spectrum.detunings[i];
        out += format_double(d) + ',' + format_double(d / params.gamma) + ',' +
               format_double(spectrum.values[i]) + '\n';
    }
    return out;
}

std::string trajectory_csv(const Trajectory &traj) {
    std::string out = "t_s,re_a,im_a,re_sigma,im_sigma\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += format_double(traj.times[i]) + ',' + format_double(traj.a_t[i].real()) + ',' +
               format_double(traj.a_t[i].imag()) + ',' +
               format_double(traj.sigma_t[i].real()) + ',' +
               format_double(traj.sigma_t[i].imag()) + '\n';
    }
    return out;
}

std::string counts_csv(const CountSurface &counts) {
    std::string out = "delta_c_rad_s,delta_a_rad_s,counts\n";
    for (std::size_t ic = 0; ic < counts.n_c(); ++ic) {
        for (std::size_t ia = 0; ia < counts.n_a(); ++ia) {
            out += format_double(counts.delta_c_grid[ic]) + ',' +
                   format_double(counts.delta_a_grid[ia]) + ',' +
                   std::to_string(counts.at(ic, ia)) + '\n';
        }
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint> &sweep) {
    std::string out =
        "g_mhz,re_plus_mhz,re_minus_mhz,im_plus_mhz,im_minus_mhz,mix_plus_atom,mix_minus_atom\n";
    for (const SweepPoint &pt : sweep) {
        out += format_double(angular_to_mhz(pt.g)) + ',' +
               format_double(angular_to_mhz(pt.modes.omega_plus.real())) + ',' +
               format_double(angular_to_mhz(pt.modes.omega_minus.real())) + ',' +
               format_double(angular_to_mhz(pt.modes.omega_plus.imag())) + ',' +
               format_double(angular_to_mhz(pt.modes.omega_minus.imag())) + ',' +
               format_double(pt.modes.mixing_plus.atom) + ',' +
               format_double(pt.modes.mixing_minus.atom) + '\n';
    }
    return out;
}

std::string surface_json(const SpectrumSurface &surface) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["mode"] = mode_name(surface.mode);
    const SystemParams &p = surface.params_used;
    doc["system"] = {{"g_mhz", angular_to_mhz(p.g)},
                     {"kappa_mhz", angular_to_mhz(p.kappa)},
                     {"gamma_mhz", angular_to_mhz(p.gamma)},
                     {"omega_c_mhz", angular_to_mhz(p.omega_c)},
                     {"omega_a_mhz", angular_to_mhz(p.omega_a)},
                     {"cooperativity", cooperativity(p)}};
    doc["delta_c_rad_s"] = surface.delta_c_grid;
    doc["delta_a_rad_s"] = surface.delta_a_grid;
    json norm_c = json::array(), norm_a = json::array();
    for (double d : surface.delta_c_grid) norm_c.push_back(d / p.kappa);
    for (double d : surface.delta_a_grid) norm_a.push_back(d / p.gamma);
    doc["delta_c_over_kappa"] = norm_c;
    doc["delta_a_over_gamma"] = norm_a;
    json rows = json::array();
    for (std::size_t ic = 0; ic < surface.n_c(); ++ic) {
        json row = json::array();
        for (std::size_t ia = 0; ia < surface.n_a(); ++ia) row.push_back(surface.at(ic, ia));
        rows.push_back(std::move(row));
    }
    doc["values"] = std::move(rows);
    doc["max_sigma_sq"] = surface.max_sigma_sq;
    return doc.dump(2) + "\n";
}

std::string counts_sidecar_json(const CountSurface &counts, const SystemParams *params) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["mode"] = mode_name(counts.mode);
    doc["exposure_s"] = counts.exposure;
    doc["realisations"] = counts.realisations;
    if (counts.seed) {
        doc["seed"] = *counts.seed;
    } else {
        doc["seed"] = nullptr;
    }
    doc["delta_c_rad_s"] = counts.delta_c_grid;
    doc["delta_a_rad_s"] = counts.delta_a_grid;
    if (params != nullptr) {
        doc["system"] = {{"g_mhz", angular_to_mhz(params->g)},
                         {"kappa_mhz", angular_to_mhz(params->kappa)},
                         {"gamma_mhz", angular_to_mhz(params->gamma)},
                         {"omega_c_mhz", angular_to_mhz(params->omega_c)},
                         {"omega_a_mhz", angular_to_mhz(params->omega_a)},
                         {"cooperativity", cooperativity(*params)}};
    }
    return doc.dump(2) + "\n";
}

std::string fit_result_json(const FitResult &fit) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["c_hat"] = fit.c_hat;
    doc["amplitude_hat"] = fit.amplitude_hat;
    doc["residual_norm"] = fit.residual_norm;
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    doc["covariance"] = {{fit.covariance[0][0], fit.covariance[0][1]},
                         {fit.covariance[1][0], fit.covariance[1][1]}};
    return doc.dump(2) + "\n";
}

CountSurface counts_from_text(const std::string &csv_text, const std::string &sidecar_json) {
    json doc;
    try {
        doc = json::parse(sidecar_json);
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("counts sidecar: invalid JSON: ") + e.what());
    }

    CountSurface counts;
    try {
        counts.mode = mode_from_name(doc.at("mode").get<std::string>());
        counts.exposure = doc.at("exposure_s").get<double>();
        counts.realisations = doc.at("realisations").get<int>();
        if (doc.contains("seed") && !doc["seed"].is_null()) {
            counts.seed = doc["seed"].get<std::uint64_t>();
        }
        counts.delta_c_grid = doc.at("delta_c_rad_s").get<std::vector<double>>();
        counts.delta_a_grid = doc.at("delta_a_rad_s").get<std::vector<double>>();
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("counts sidecar: missing or bad field: ") + e.what());
    }
    if (counts.delta_c_grid.empty() || counts.delta_a_grid.empty()) {
        throw InvalidInput("counts sidecar: empty grids");
    }
    for (const auto *grid : {&counts.delta_c_grid, &counts.delta_a_grid}) {
        for (std::size_t i = 0; i + 1 < grid->size(); ++i) {
            if (!((*grid)[i] < (*grid)[i + 1])) {
                throw InvalidInput("counts sidecar: grids must be strictly increasing");
            }
        }
    }
    if (!(counts.exposure > 0.0) || counts.realisations < 1) {
        throw InvalidInput("counts sidecar: exposure must be > 0 and realisations >= 1");
    }

    std::istringstream in(csv_text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    counts.counts.clear();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("delta_c", 0) == 0) continue;  // header row
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw InvalidInput("counts CSV line " + std::to_string(line_no) +
                               ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        const double value = parse_double_field(fields[2], line_no);
        if (!(value >= 0.0) || value != std::floor(value)) {
            throw InvalidInput("counts CSV line " + std::to_string(line_no) +
                               ": counts must be non-negative integers");
        }
        counts.counts.push_back(static_cast<std::int64_t>(value));
    }
    const std::size_t expected = counts.n_c() * counts.n_a();
    if (counts.counts.size() != expected) {
        throw InvalidInput("counts CSV: found " + std::to_string(counts.counts.size()) +
                           " rows, sidecar grids imply " + std::to_string(expected));
    }
    return counts;
}

bool sidecar_system_params(const std::string &sidecar_json, SidecarParams &out) {
    json doc;
    try {
        doc = json::parse(sidecar_json);
        if (!doc.contains("system")) return false;
        out.g_mhz = doc["system"].at("g_mhz").get<double>();
        out.kappa_mhz = doc["system"].at("kappa_mhz").get<double>();
        out.gamma_mhz = doc["system"].at("gamma_mhz").get<double>();
    } catch (const json::exception &) {
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace {

struct Rgb {
    double r, g, b;
};

// Coarse viridis anchors, linearly interpolated.
Rgb colormap(double t) {
    static const Rgb stops[] = {
        {68, 1, 84},    {71, 44, 122},  {59, 81, 139},  {44, 113, 142}, {33, 144, 141},
        {39, 173, 129}, {92, 200, 99},  {170, 220, 50}, {253, 231, 37},
    };
    constexpr int n = 9;
    t = std::clamp(t, 0.0, 1.0) * (n - 1);
    const int i = std::min(static_cast<int>(t), n - 2);
    const double f = t - i;
    return {stops[i].r + f * (stops[i + 1].r - stops[i].r),
            stops[i].g + f * (stops[i + 1].g - stops[i].g),
            stops[i].b + f * (stops[i + 1].b - stops[i].b)};
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string color_hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                  static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
    return buf;
}

void append_text(std::string &svg, double x, double y, const std::string &text,
                 const char *anchor, int size = 12) {
    svg += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"" +
           std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
           "\">" + text + "</text>\n";
}

} // namespace

std::string svg_heatmap(const std::vector<HeatmapPanel> &panels, const std::vector<double> &x,
                        const std::vector<double> &y, const HeatmapOptions &options) {
    if (panels.empty() || x.empty() || y.empty()) {
        throw InvalidInput("svg_heatmap: empty panels or axes");
    }
    const std::size_t nx = x.size(), ny = y.size();
    for (const HeatmapPanel &p : panels) {
        if (p.values == nullptr || p.values->size() != nx * ny) {
            throw InvalidInput("svg_heatmap: panel size mismatch");
        }
    }

    constexpr double plot_w = 300.0, plot_h = 300.0;
    constexpr double margin_left = 70.0, margin_bottom = 55.0, margin_top = 35.0;
    constexpr double gap = 30.0;
    const double total_w =
        margin_left + panels.size() * plot_w + (panels.size() - 1) * gap + 20.0;
    const double total_h = margin_top + plot_h + margin_bottom;

    const double x_lo = x.front(), x_hi = x.back();
    const double y_lo = y.front(), y_hi = y.back();
    const double x_span = (x_hi > x_lo) ? x_hi - x_lo : 1.0;
    const double y_span = (y_hi > y_lo) ? y_hi - y_lo : 1.0;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(total_w) +
                      "\" height=\"" + px(total_h) + "\" viewBox=\"0 0 " + px(total_w) + " " +
                      px(total_h) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const double left = margin_left + pi * (plot_w + gap);
        const double top = margin_top;
        const std::vector<double> &v = *panels[pi].values;

        double vmin = v[0], vmax = v[0];
        for (double val : v) {
            vmin = std::min(vmin, val);
            vmax = std::max(vmax, val);
        }
        const double vspan = (vmax > vmin) ? vmax - vmin : 1.0;

        const double cell_w = plot_w / static_cast<double>(nx);
        const double cell_h = plot_h / static_cast<double>(ny);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t iy = 0; iy < ny; ++iy) {
                const double t = (v[ix * ny + iy] - vmin) / vspan;
                // y axis increases upward.
                const double cx = left + ix * cell_w;
                const double cy = top + plot_h - (iy + 1) * cell_h;
                svg += "<rect x=\"" + px(cx) + "\" y=\"" + px(cy) + "\" width=\"" +
                       px(cell_w + 0.5) + "\" height=\"" + px(cell_h + 0.5) + "\" fill=\"" +
                       color_hex(colormap(t)) + "\"/>\n";
            }
        }

        // Overlay polyline split at out-of-range points.
        if (!options.overlay.empty()) {
            std::string points;
            const auto flush = [&]() {
                if (!points.empty()) {
                    svg += "<polyline points=\"" + points +
                           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
                    points.clear();
                }
            };
            for (const auto &[ox, oy] : options.overlay) {
                if (ox < x_lo || ox > x_hi || oy < y_lo || oy > y_hi) {
                    flush();
                    continue;
                }
                const double sx = left + (ox - x_lo) / x_span * plot_w;
                const double sy = top + plot_h - (oy - y_lo) / y_span * plot_h;
                points += px(sx) + "," + px(sy) + " ";
            }
            flush();
        }

        svg += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(plot_w) +
               "\" height=\"" + px(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
        append_text(svg, left + plot_w / 2, top - 10, panels[pi].title, "middle", 13);
        append_text(svg, left + plot_w / 2,
                    top + plot_h + 40, options.x_label, "middle");

        // Ticks: 5 per axis.
        for (int t = 0; t < 5; ++t) {
            const double f = t / 4.0;
            const double tx = left + f * plot_w;
            const double ty = top + plot_h - f * plot_h;
            svg += "<line x1=\"" + px(tx) + "\" y1=\"" + px(top + plot_h) + "\" x2=\"" + px(tx) +
                   "\" y2=\"" + px(top + plot_h + 4) + "\" stroke=\"black\"/>\n";
            append_text(svg, tx, top + plot_h + 18, format_double(x_lo + f * (x_hi - x_lo)),
                        "middle", 10);
            if (pi == 0) {
                svg += "<line x1=\"" + px(left - 4) + "\" y1=\"" + px(ty) + "\" x2=\"" +
                       px(left) + "\" y2=\"" + px(ty) + "\" stroke=\"black\"/>\n";
                append_text(svg, left - 8, ty + 4, format_double(y_lo + f * (y_hi - y_lo)),
                            "end", 10);
            }
        }
    }
    // Vertical axis label.
    svg += "<text x=\"14\" y=\"" + px(margin_top + plot_h / 2) +
           "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           px(margin_top + plot_h / 2) + ")\">" + options.y_label + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

void write_text_file(const std::string &path, const std::string &content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InvalidInput("cannot open for writing: " + path);
    out << content;
    if (!out) throw NumericalError("write failed: " + path);
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace cqed
