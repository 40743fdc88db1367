#include "cqed/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "cqed/errors.hpp"
#include "cqed/io.hpp"
#include "cqed/units.hpp"

namespace cqed {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::function<std::string(const RunConfig &)> get;
    std::function<void(RunConfig &, const std::string &, std::size_t)> set;
};

double parse_double(const std::string &v, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception &) {
        throw InvalidInput("config line " + std::to_string(line) + ": bad number '" + v + "'");
    }
}

std::int64_t parse_int(const std::string &v, std::size_t line) {
    std::int64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw InvalidInput("config line " + std::to_string(line) + ": bad integer '" + v + "'");
    }
    return x;
}

bool parse_bool(const std::string &v, std::size_t line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InvalidInput("config line " + std::to_string(line) + ": bad boolean '" + v + "'");
}

Field dbl(double RunConfig::*member) {
    return {[member](const RunConfig &c) { return format_double_full(c.*member); },
            [member](RunConfig &c, const std::string &v, std::size_t line) {
                c.*member = parse_double(v, line);
            }};
}

Field u64(std::uint64_t RunConfig::*member) {
    return {[member](const RunConfig &c) { return std::to_string(c.*member); },
            [member](RunConfig &c, const std::string &v, std::size_t line) {
                const std::int64_t x = parse_int(v, line);
                if (x < 0) {
                    throw InvalidInput("config line " + std::to_string(line) +
                                       ": value must be >= 0");
                }
                c.*member = static_cast<std::uint64_t>(x);
            }};
}

Field i64(std::int64_t RunConfig::*member) {
    return {[member](const RunConfig &c) { return std::to_string(c.*member); },
            [member](RunConfig &c, const std::string &v, std::size_t line) {
                c.*member = parse_int(v, line);
            }};
}

Field str(std::string RunConfig::*member) {
    return {[member](const RunConfig &c) { return c.*member; },
            [member](RunConfig &c, const std::string &v, std::size_t) { c.*member = v; }};
}

Field bl(bool RunConfig::*member) {
    return {[member](const RunConfig &c) { return std::string(c.*member ? "true" : "false"); },
            [member](RunConfig &c, const std::string &v, std::size_t line) {
                c.*member = parse_bool(v, line);
            }};
}

// Section and key order defines the canonical serialization.
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>> &
schema() {
    static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>>
        s = {
            {"system",
             {{"g_mhz", dbl(&RunConfig::g_mhz)},
              {"cooperativity", dbl(&RunConfig::cooperativity)},
              {"kappa_mhz", dbl(&RunConfig::kappa_mhz)},
              {"gamma_mhz", dbl(&RunConfig::gamma_mhz)},
              {"omega_c_mhz", dbl(&RunConfig::omega_c_mhz)},
              {"omega_a_mhz", dbl(&RunConfig::omega_a_mhz)}}},
            {"probe",
             {{"mode", str(&RunConfig::mode)},
              {"j_in", dbl(&RunConfig::j_in)},
              {"omega_rabi_mhz", dbl(&RunConfig::omega_rabi_mhz)},
              {"kappa_t_mhz", dbl(&RunConfig::kappa_t_mhz)},
              {"r1", dbl(&RunConfig::r1)},
              {"r2", dbl(&RunConfig::r2)}}},
            {"grid",
             {{"n_delta_c", u64(&RunConfig::n_delta_c)},
              {"n_delta_a", u64(&RunConfig::n_delta_a)},
              {"delta_c_span_kappa", dbl(&RunConfig::delta_c_span_kappa)},
              {"delta_a_span_gamma", dbl(&RunConfig::delta_a_span_gamma)},
              {"refine", u64(&RunConfig::refine)}}},
            {"diagonal",
             {{"points", u64(&RunConfig::diagonal_points)},
              {"span_halfwidths", dbl(&RunConfig::diagonal_span_halfwidths)}}},
            {"dynamics",
             {{"dt_over_kappa", dbl(&RunConfig::dt_over_kappa)},
              {"domega_over_gamma", dbl(&RunConfig::domega_over_gamma)}}},
            {"synth",
             {{"amplitude", dbl(&RunConfig::amplitude)},
              {"peak_counts", dbl(&RunConfig::peak_counts)},
              {"exposure_ms", dbl(&RunConfig::exposure_ms)},
              {"realisations", i64(&RunConfig::realisations)},
              {"seed", u64(&RunConfig::seed)},
              {"noiseless", bl(&RunConfig::noiseless)}}},
            {"fit",
             {{"c_init", dbl(&RunConfig::c_init)},
              {"amplitude_init", dbl(&RunConfig::amplitude_init)},
              {"max_iterations", i64(&RunConfig::max_iterations)}}},
            {"output",
             {{"out_dir", str(&RunConfig::out_dir)},
              {"format", str(&RunConfig::format)}}},
        };
    return s;
}

} // namespace

std::string RunConfig::to_ini() const {
    std::string out;
    for (const auto &[section, fields] : schema()) {
        out += "[" + section + "]\n";
        for (const auto &[key, field] : fields) {
            out += key + " = " + field.get(*this) + "\n";
        }
        out += "\n";
    }
    return out;
}

RunConfig RunConfig::from_ini(const std::string &text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw InvalidInput("config line " + std::to_string(line_no) +
                                   ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            bool known = false;
            for (const auto &[name, fields] : schema()) known |= (name == section);
            if (!known) {
                throw InvalidInput("config line " + std::to_string(line_no) +
                                   ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput("config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty()) {
            throw InvalidInput("config line " + std::to_string(line_no) +
                               ": key '" + key + "' outside any section");
        }
        bool found = false;
        for (const auto &[name, fields] : schema()) {
            if (name != section) continue;
            for (const auto &[fkey, field] : fields) {
                if (fkey == key) {
                    field.set(cfg, value, line_no);
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            throw InvalidInput("config line " + std::to_string(line_no) + ": unknown key '" +
                               key + "' in section [" + section + "]");
        }
    }
    return cfg;
}

SystemParams RunConfig::system_params() const {
    if (cooperativity >= 0.0) {
        return SystemParams::from_cooperativity(
            cooperativity, mhz_to_angular(kappa_mhz), mhz_to_angular(gamma_mhz),
            mhz_to_angular(omega_c_mhz), mhz_to_angular(omega_a_mhz));
    }
    return SystemParams::from_mhz(g_mhz, kappa_mhz, gamma_mhz, omega_c_mhz, omega_a_mhz);
}

ProbeConfig RunConfig::probe_config(const SystemParams &params) const {
    const double kt = kappa_t_mhz < 0.0 ? 0.5 * params.kappa : mhz_to_angular(kappa_t_mhz);
    if (mode == "cavity") {
        return ProbeConfig::cavity_drive(j_in, kt, r1, r2);
    }
    if (mode == "atom") {
        return ProbeConfig::atom_drive(mhz_to_angular(omega_rabi_mhz), kt, r2);
    }
    throw InvalidInput("config: probe mode must be 'cavity' or 'atom', got '" + mode + "'");
}

} // namespace cqed
