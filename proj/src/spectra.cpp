#include "cqed/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/errors.hpp"
#include "cqed/fitting.hpp"

namespace cqed {

namespace {

void check_grid(const std::vector<double> &grid, const char *name) {
    if (grid.empty()) throw InvalidInput(std::string(name) + ": grid is empty");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) {
            throw InvalidInput(std::string(name) + ": grid must be strictly increasing");
        }
    }
}

// Golden-section maximization on [lo, hi] for a unimodal bracket.
double golden_max(const std::function<double(double)> &f, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> v(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
    v.back() = hi;
    return v;
}

SpectrumSurface::SpectrumSurface(std::vector<double> delta_c, std::vector<double> delta_a,
                                 DriveMode mode_, const SystemParams &params)
    : delta_c_grid(std::move(delta_c)),
      delta_a_grid(std::move(delta_a)),
      mode(mode_),
      params_used(params) {
    check_grid(delta_c_grid, "SpectrumSurface delta_c");
    check_grid(delta_a_grid, "SpectrumSurface delta_a");
    values.assign(n_c() * n_a(), 0.0);
}

GridPair default_scan_grids(const SystemParams &params, DriveMode mode,
                            std::size_t refine) {
    if (refine == 0) throw InvalidInput("default_scan_grids: refine must be >= 1");
    const std::size_t base = (mode == DriveMode::CavityDrive) ? 28 : 31;
    const std::size_t n = base * refine;
    const double c = cooperativity(params);
    const double a_span = 15.0 * std::max(1.0, c / 3.0) * params.gamma;
    return {linspace(-1.5 * params.kappa, 1.5 * params.kappa, n),
            linspace(-a_span, a_span, n)};
}

SpectrumSurface scan_2d(const SystemParams &params, const ProbeConfig &probe,
                        const std::vector<double> &delta_c_grid,
                        const std::vector<double> &delta_a_grid) {
    SpectrumSurface surface(delta_c_grid, delta_a_grid, probe.mode, params);
    for (std::size_t ic = 0; ic < surface.n_c(); ++ic) {
        for (std::size_t ia = 0; ia < surface.n_a(); ++ia) {
            const DetuningPair det{surface.delta_c_grid[ic], surface.delta_a_grid[ia]};
            surface.values[ic * surface.n_a() + ia] = reflected_flux(params, probe, det);
            const FieldPair field = steady_field(params, probe, det);
            surface.max_sigma_sq = std::max(surface.max_sigma_sq, std::norm(field.sigma));
        }
    }
    return surface;
}

std::vector<double> default_diagonal_grid(const SystemParams &params, std::size_t n_points,
                                          double span_halfwidths) {
    const double w = params.gamma * (1.0 + cooperativity(params));
    return linspace(-span_halfwidths * w, span_halfwidths * w, n_points);
}

Spectrum1D scan_diagonal(const SystemParams &params, const ProbeConfig &probe,
                         const std::vector<double> &detunings) {
    check_grid(detunings, "scan_diagonal");
    const double min_span = 10.0 * params.gamma * (1.0 + cooperativity(params));
    if (detunings.front() > -min_span * (1.0 - 1e-12) ||
        detunings.back() < min_span * (1.0 - 1e-12)) {
        throw InvalidInput("scan_diagonal: grid must span at least +-10*gamma*(1+C)");
    }
    Spectrum1D spec;
    spec.mode = probe.mode;
    spec.detunings = detunings;
    spec.values.reserve(detunings.size());
    for (double d : detunings) {
        const DetuningPair det{d, d};
        spec.values.push_back(reflected_flux(params, probe, det));
        spec.max_sigma_sq =
            std::max(spec.max_sigma_sq, std::norm(steady_field(params, probe, det).sigma));
    }
    return spec;
}

LorentzianFit lorentzian_halfwidth(const std::vector<double> &x, const std::vector<double> &y,
                                   std::optional<LorentzianGuess> guess) {
    if (x.size() != y.size() || x.size() < 5) {
        throw InvalidInput("lorentzian_halfwidth: need matching x/y with >= 5 samples");
    }
    check_grid(x, "lorentzian_halfwidth x");
    const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
    if (!(*max_it > *min_it)) {
        throw InvalidInput("lorentzian_halfwidth: degenerate flat spectrum");
    }

    LorentzianGuess g0{};
    if (guess) {
        g0 = *guess;
    } else {
        // Edges approximate the background; the stronger deviation from it
        // decides whether the feature is a peak or a dip.
        const double edge = 0.5 * (y.front() + y.back());
        const double dev_max = *max_it - edge;
        const double dev_min = *min_it - edge;
        const bool peak = dev_max >= -dev_min;
        const std::size_t i0 = peak
            ? static_cast<std::size_t>(std::distance(y.begin(), max_it))
            : static_cast<std::size_t>(std::distance(y.begin(), min_it));
        g0.offset = edge;
        g0.amplitude = y[i0] - edge;
        g0.center = x[i0];
        // Half-crossing scan outward from the extremum.
        const double half = edge + 0.5 * g0.amplitude;
        double w_lo = x.back() - x.front(), w_hi = w_lo;
        for (std::size_t i = i0; i + 1 < y.size(); ++i) {
            if ((peak && y[i + 1] <= half) || (!peak && y[i + 1] >= half)) {
                w_hi = x[i + 1] - g0.center;
                break;
            }
        }
        for (std::size_t i = i0; i > 0; --i) {
            if ((peak && y[i - 1] <= half) || (!peak && y[i - 1] >= half)) {
                w_lo = g0.center - x[i - 1];
                break;
            }
        }
        g0.halfwidth = std::max(0.5 * (w_lo + w_hi), x[1] - x[0]);
    }

    const auto model = [&x](const std::vector<double> &p) {
        const double x0 = p[0], w = p[1], amp = p[2], off = p[3];
        std::vector<double> out(x.size());
        const double w2 = w * w;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double dx = x[i] - x0;
            out[i] = off + amp * w2 / (dx * dx + w2);
        }
        return out;
    };

    const std::vector<double> weights(x.size(), 1.0);
    const LeastSquaresResult res = least_squares(
        model, {g0.center, g0.halfwidth, g0.amplitude, g0.offset}, y, weights);
    if (!res.converged) {
        throw NumericalError("lorentzian_halfwidth: fit did not converge: " + res.message);
    }

    LorentzianFit fit;
    fit.center = res.params[0];
    fit.halfwidth = std::abs(res.params[1]);  // model depends on w^2 only
    fit.amplitude = res.params[2];
    fit.offset = res.params[3];
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    // Unit weights are uncalibrated; scale the covariance by reduced chi2.
    const double var_w = res.covariance[1 * 4 + 1] * res.reduced_chi2;
    fit.halfwidth_stderr = var_w > 0.0 ? std::sqrt(var_w) : 0.0;
    return fit;
}

MinimaLocus minima_locus(const SpectrumSurface &surface) {
    if (surface.mode != DriveMode::CavityDrive) {
        throw InvalidInput("minima_locus: requires a cavity-drive surface");
    }
    const SystemParams &params = surface.params_used;
    MinimaLocus locus;
    if (params.g == 0.0) {
        locus.no_coupling = true;
        return locus;
    }
    if (surface.n_a() < 3) {
        throw InvalidInput("minima_locus: need at least 3 delta_a samples per column");
    }
    const double w = params.gamma * (1.0 + cooperativity(params));
    const double step_a = surface.delta_a_grid[1] - surface.delta_a_grid[0];
    if (step_a > 0.25 * w * (1.0 + 1e-12)) {
        throw InvalidInput("minima_locus: delta_a resolution coarser than gamma*(1+C)/4");
    }

    for (std::size_t ic = 0; ic < surface.n_c(); ++ic) {
        const double dc = surface.delta_c_grid[ic];
        if (std::abs(dc) <= 2.0 * params.gamma) continue;
        std::size_t best = 0;
        for (std::size_t ia = 1; ia < surface.n_a(); ++ia) {
            const double v = surface.at(ic, ia);
            const double vb = surface.at(ic, best);
            if (v < vb ||
                (v == vb && std::abs(surface.delta_a_grid[ia]) <
                                std::abs(surface.delta_a_grid[best]))) {
                best = ia;
            }
        }
        if (best == 0 || best + 1 == surface.n_a()) {
            locus.excluded_columns.push_back(ic);
        } else {
            locus.points.push_back({dc, surface.delta_a_grid[best]});
        }
    }
    return locus;
}

ButterflyPeaks butterfly_peaks(const SystemParams &params) {
    const double c = cooperativity(params);
    const ProbeConfig probe = ProbeConfig::atom_drive(0.01 * params.gamma, 0.5 * params.kappa);
    const auto photon_number = [&](double delta) {
        return scaled_photon_number(params, probe,
                                    DetuningPair{params.kappa * delta, params.gamma * delta});
    };
    if (c < 1.0) {
        return {0.0, 0.0, false};
    }
    // The spectrum is even in delta; bracket the positive-side maximum with a
    // coarse scan, then refine.
    const double hi = std::sqrt(std::max(c - 1.0, 0.0)) + 3.0;
    const std::size_t n_coarse = 400;
    double best_delta = 0.0, best_val = photon_number(0.0);
    for (std::size_t i = 1; i < n_coarse; ++i) {
        const double d = hi * static_cast<double>(i) / static_cast<double>(n_coarse - 1);
        const double v = photon_number(d);
        if (v > best_val) {
            best_val = v;
            best_delta = d;
        }
    }
    const double span = hi / static_cast<double>(n_coarse - 1);
    const double peak =
        golden_max(photon_number, std::max(0.0, best_delta - span), best_delta + span);
    // At C = 1 the spectrum is flat to fourth order around delta = 0, so the
    // maximizer resolves the peak position only to ~eps^(1/4).
    const bool split = peak > 1e-3;
    return {split ? -peak : 0.0, split ? peak : 0.0, split};
}

} // namespace cqed
