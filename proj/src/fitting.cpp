#include "cqed/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cqed/errors.hpp"
#include "cqed/spectra.hpp"

namespace cqed {

namespace {

bool all_finite(const std::vector<double> &v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Gaussian elimination with partial pivoting; a is row-major n x n, b length
// n; solution written into b. Returns false on a singular system.
bool solve_dense(std::vector<double> a, std::vector<double> &b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        }
        if (a[pivot * n + col] == 0.0 || !std::isfinite(a[pivot * n + col])) return false;
        if (pivot != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t row = n; row-- > 0;) {
        double s = b[row];
        for (std::size_t k = row + 1; k < n; ++k) s -= a[row * n + k] * b[k];
        b[row] = s / a[row * n + row];
    }
    return all_finite(b);
}

// Inverse via column-by-column solves; returns empty on singular input.
std::vector<double> invert_dense(const std::vector<double> &a, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        if (!solve_dense(a, e, n)) return {};
        for (std::size_t r = 0; r < n; ++r) inv[r * n + col] = e[r];
    }
    return inv;
}

} // namespace

LeastSquaresResult least_squares(const ModelFn &model, const std::vector<double> &params0,
                                 const std::vector<double> &data,
                                 const std::vector<double> &weights,
                                 const LeastSquaresOptions &options) {
    const std::size_t n = data.size();
    const std::size_t np = params0.size();
    if (np == 0 || n < np) throw InvalidInput("least_squares: need more data than parameters");
    if (weights.size() != n) throw InvalidInput("least_squares: weights/data size mismatch");
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw InvalidInput("least_squares: weights must be positive and finite");
        }
    }

    const auto chi2_of = [&](const std::vector<double> &pred) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = data[i] - pred[i];
            s += weights[i] * r * r;
        }
        return s;
    };

    const auto eval = [&](const std::vector<double> &p, int iterate) {
        std::vector<double> pred = model(p);
        if (pred.size() != n) throw InvalidInput("least_squares: model output size mismatch");
        if (!all_finite(pred)) {
            throw NumericalError("least_squares: non-finite model output at iterate " +
                                 std::to_string(iterate));
        }
        return pred;
    };

    std::vector<double> p = params0;
    std::vector<double> pred = eval(p, 0);
    double chi2 = chi2_of(pred);
    double damping = options.initial_damping;

    LeastSquaresResult result;
    result.params = p;
    result.chi2 = chi2;

    std::vector<double> jac(n * np);  // d model_i / d p_j
    std::vector<double> jtj(np * np, 0.0), grad(np, 0.0);
    int iter = 0;
    bool converged = false;
    bool jacobian_fresh = false;
    std::string message = "iteration cap exceeded";

    while (iter < options.max_iterations && !converged) {
        ++iter;

        // Forward-difference Jacobian about p; a rejected step leaves p (and
        // therefore the Jacobian and gradient) unchanged.
        if (!jacobian_fresh) {
            for (std::size_t j = 0; j < np; ++j) {
                const double h = 1e-7 * (std::abs(p[j]) + 1e-7);
                std::vector<double> pj = p;
                pj[j] += h;
                const std::vector<double> predj = eval(pj, iter);
                for (std::size_t i = 0; i < n; ++i) {
                    jac[i * np + j] = (predj[i] - pred[i]) / h;
                }
            }
            // Normal equations J^T W J and gradient J^T W r.
            std::fill(jtj.begin(), jtj.end(), 0.0);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = data[i] - pred[i];
                for (std::size_t j = 0; j < np; ++j) {
                    const double wj = weights[i] * jac[i * np + j];
                    grad[j] += wj * r;
                    for (std::size_t k = j; k < np; ++k) {
                        jtj[j * np + k] += wj * jac[i * np + k];
                    }
                }
            }
            for (std::size_t j = 0; j < np; ++j) {
                for (std::size_t k = 0; k < j; ++k) jtj[j * np + k] = jtj[k * np + j];
            }
            jacobian_fresh = true;
        }

        double grad_norm = 0.0;
        for (double gv : grad) grad_norm = std::max(grad_norm, std::abs(gv));
        if (grad_norm < options.gradient_tol) {
            converged = true;
            message = "gradient norm below tolerance";
            break;
        }

        // Damped step: (J^T W J + damping * diag(J^T W J)) delta = J^T W r.
        std::vector<double> lhs = jtj;
        for (std::size_t j = 0; j < np; ++j) {
            double d = jtj[j * np + j];
            if (d == 0.0) d = 1.0;  // dead parameter; damping keeps it solvable
            lhs[j * np + j] = d * (1.0 + damping);
        }
        std::vector<double> delta = grad;
        if (!solve_dense(lhs, delta, np)) {
            throw NumericalError("least_squares: singular normal equations at iterate " +
                                 std::to_string(iter));
        }

        std::vector<double> trial = p;
        for (std::size_t j = 0; j < np; ++j) trial[j] += delta[j];
        const std::vector<double> trial_pred = eval(trial, iter);
        const double trial_chi2 = chi2_of(trial_pred);

        if (trial_chi2 <= chi2) {
            double rel_change = 0.0;
            for (std::size_t j = 0; j < np; ++j) {
                rel_change = std::max(rel_change,
                                      std::abs(delta[j]) / (std::abs(p[j]) + 1e-30));
            }
            p = trial;
            pred = trial_pred;
            chi2 = trial_chi2;
            damping *= 0.5;
            jacobian_fresh = false;
            if (rel_change < options.param_tol) {
                converged = true;
                message = "relative parameter change below tolerance";
            }
        } else {
            damping = std::max(damping * 2.0, 1e-15);
        }
    }

    result.params = p;
    result.chi2 = chi2;
    result.reduced_chi2 = (n > np) ? chi2 / static_cast<double>(n - np) : chi2;
    result.iterations = iter;
    result.converged = converged;
    result.message = message;

    // Covariance (J^T W J)^{-1} at the final iterate.
    {
        std::vector<double> predf = pred;
        std::vector<double> jtj(np * np, 0.0);
        for (std::size_t j = 0; j < np; ++j) {
            const double h = 1e-7 * (std::abs(p[j]) + 1e-7);
            std::vector<double> pj = p;
            pj[j] += h;
            const std::vector<double> predj = eval(pj, result.iterations);
            for (std::size_t i = 0; i < n; ++i) jac[i * np + j] = (predj[i] - predf[i]) / h;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < np; ++j) {
                const double wj = weights[i] * jac[i * np + j];
                for (std::size_t k = j; k < np; ++k) jtj[j * np + k] += wj * jac[i * np + k];
            }
        }
        for (std::size_t j = 0; j < np; ++j) {
            for (std::size_t k = 0; k < j; ++k) jtj[j * np + k] = jtj[k * np + j];
        }
        result.covariance = invert_dense(jtj, np);
        if (result.covariance.empty()) {
            result.covariance.assign(np * np, std::numeric_limits<double>::quiet_NaN());
        }
    }
    return result;
}

CountSurface synthesize_counts(const SpectrumSurface &surface, double amplitude,
                               double exposure, int realisations, std::uint64_t seed) {
    if (!(exposure > 0.0)) throw InvalidInput("synthesize_counts: exposure must be > 0");
    if (realisations < 1) throw InvalidInput("synthesize_counts: realisations must be >= 1");
    if (!(amplitude >= 0.0)) throw InvalidInput("synthesize_counts: amplitude must be >= 0");

    CountSurface out;
    out.delta_c_grid = surface.delta_c_grid;
    out.delta_a_grid = surface.delta_a_grid;
    out.exposure = exposure;
    out.realisations = realisations;
    out.seed = seed;
    out.mode = surface.mode;
    out.counts.resize(surface.values.size());

    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < surface.values.size(); ++i) {
        const double mean = amplitude * surface.values[i] * exposure;
        if (!(mean <= 1e9)) {
            throw InvalidInput("synthesize_counts: mean counts exceed counter range");
        }
        if (mean <= 0.0) {
            out.counts[i] = 0;
            continue;
        }
        std::poisson_distribution<std::int64_t> draw(mean);
        std::int64_t total = 0;
        for (int r = 0; r < realisations; ++r) total += draw(rng);
        out.counts[i] = std::llround(static_cast<double>(total) /
                                     static_cast<double>(realisations));
    }
    return out;
}

CountSurface noiseless_counts(const SpectrumSurface &surface, double amplitude,
                              double exposure) {
    if (!(exposure > 0.0)) throw InvalidInput("noiseless_counts: exposure must be > 0");
    CountSurface out;
    out.delta_c_grid = surface.delta_c_grid;
    out.delta_a_grid = surface.delta_a_grid;
    out.exposure = exposure;
    out.realisations = 1;
    out.mode = surface.mode;
    out.counts.resize(surface.values.size());
    for (std::size_t i = 0; i < surface.values.size(); ++i) {
        const double mean = amplitude * surface.values[i] * exposure;
        if (!(mean <= 1e18)) {
            throw InvalidInput("noiseless_counts: mean counts exceed counter range");
        }
        out.counts[i] = std::llround(mean);
    }
    return out;
}

std::vector<double> fit_model_values(DriveMode mode, double kappa, double gamma, double c,
                                     const std::vector<double> &delta_c_grid,
                                     const std::vector<double> &delta_a_grid) {
    // Even extension in C keeps the model defined when the optimizer probes
    // below zero; the physical estimate is |C|.
    const SystemParams params = SystemParams::from_cooperativity(std::abs(c), kappa, gamma);
    const ProbeConfig probe = (mode == DriveMode::CavityDrive)
                                  ? ProbeConfig::cavity_drive(1.0, 0.5 * kappa)
                                  : ProbeConfig::atom_drive(0.01 * gamma, 0.5 * kappa);
    std::vector<double> out;
    out.reserve(delta_c_grid.size() * delta_a_grid.size());
    for (double dc : delta_c_grid) {
        for (double da : delta_a_grid) {
            const DetuningPair det{dc, da};
            out.push_back(mode == DriveMode::CavityDrive
                              ? reflected_flux(params, probe, det)
                              : scaled_photon_number(params, probe, det));
        }
    }
    return out;
}

namespace {

// Rough half-width of the feature in the column nearest delta_c = 0; both
// drive modes show a peak of HWHM gamma*(1+C) there.
double rough_column_halfwidth(const CountSurface &data) {
    std::size_t ic = 0;
    for (std::size_t i = 1; i < data.n_c(); ++i) {
        if (std::abs(data.delta_c_grid[i]) < std::abs(data.delta_c_grid[ic])) ic = i;
    }
    std::size_t peak = 0;
    for (std::size_t ia = 1; ia < data.n_a(); ++ia) {
        if (data.at(ic, ia) > data.at(ic, peak)) peak = ia;
    }
    const double base = std::min(data.at(ic, 0), data.at(ic, data.n_a() - 1));
    const double half = 0.5 * (static_cast<double>(data.at(ic, peak)) + base);
    double w_hi = data.delta_a_grid.back() - data.delta_a_grid[peak];
    for (std::size_t ia = peak; ia + 1 < data.n_a(); ++ia) {
        if (static_cast<double>(data.at(ic, ia + 1)) <= half) {
            w_hi = data.delta_a_grid[ia + 1] - data.delta_a_grid[peak];
            break;
        }
    }
    double w_lo = data.delta_a_grid[peak] - data.delta_a_grid.front();
    for (std::size_t ia = peak; ia > 0; --ia) {
        if (static_cast<double>(data.at(ic, ia - 1)) <= half) {
            w_lo = data.delta_a_grid[peak] - data.delta_a_grid[ia - 1];
            break;
        }
    }
    return 0.5 * (w_lo + w_hi);
}

} // namespace

FitResult fit_surface(const CountSurface &data, DriveMode mode, double kappa, double gamma,
                      std::optional<FitInit> init, const LeastSquaresOptions &options) {
    if (data.counts.size() != data.n_c() * data.n_a() || data.counts.empty()) {
        throw InvalidInput("fit_surface: counts/grid size mismatch");
    }
    if (!(kappa > 0.0) || !(gamma > 0.0)) {
        throw InvalidInput("fit_surface: kappa and gamma must be > 0");
    }
    if (data.realisations < 1) throw InvalidInput("fit_surface: realisations must be >= 1");

    std::vector<double> counts(data.counts.size());
    std::vector<double> weights(data.counts.size());
    for (std::size_t i = 0; i < data.counts.size(); ++i) {
        if (data.counts[i] < 0) throw InvalidInput("fit_surface: negative counts");
        counts[i] = static_cast<double>(data.counts[i]);
        // Poisson shot noise of an averaged pixel: var = max(counts, 1)/realisations.
        weights[i] = static_cast<double>(data.realisations) / std::max(counts[i], 1.0);
    }

    FitInit start{};
    if (init) {
        if (!(init->c0 > 0.0)) throw InvalidInput("fit_surface: init C0 must be > 0");
        start = *init;
    } else {
        const double w_rough = rough_column_halfwidth(data);
        start.c0 = std::max(w_rough / gamma - 1.0, 0.1);
        const std::vector<double> m0 =
            fit_model_values(mode, kappa, gamma, start.c0, data.delta_c_grid, data.delta_a_grid);
        const std::size_t nc = data.n_c(), na = data.n_a();
        const std::size_t corners[4] = {0, na - 1, (nc - 1) * na, nc * na - 1};
        double corner_counts = 0.0, corner_model = 0.0, model_max = 0.0;
        for (double v : m0) model_max = std::max(model_max, v);
        for (std::size_t idx : corners) {
            corner_counts += counts[idx];
            corner_model += m0[idx];
        }
        if (corner_model > 4e-9 * model_max && corner_counts > 0.0) {
            start.amplitude0 = corner_counts / corner_model;
        } else {
            const double peak = *std::max_element(counts.begin(), counts.end());
            start.amplitude0 = model_max > 0.0 ? std::max(peak, 1.0) / model_max : 1.0;
        }
    }

    const auto model = [&](const std::vector<double> &p) {
        std::vector<double> values =
            fit_model_values(mode, kappa, gamma, p[0], data.delta_c_grid, data.delta_a_grid);
        for (double &v : values) v *= p[1];
        return values;
    };

    const LeastSquaresResult res =
        least_squares(model, {start.c0, start.amplitude0}, counts, weights, options);

    FitResult fit;
    fit.c_hat = std::abs(res.params[0]);
    fit.amplitude_hat = res.params[1];
    fit.residual_norm = res.reduced_chi2;
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 2; ++k) {
            fit.covariance[r][k] = res.covariance[r * 2 + k];
            if (!std::isfinite(fit.covariance[r][k])) {
                throw NumericalError(
                    "fit_surface: singular normal equations (flat model, parameters "
                    "unidentifiable)");
            }
        }
    }
    return fit;
}

} // namespace cqed
