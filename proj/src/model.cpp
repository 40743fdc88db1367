#include "cqed/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "cqed/errors.hpp"
#include "cqed/units.hpp"

namespace cqed {

namespace {

bool all_finite(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// Mixing weights for eigenvalue lambda of [[A, -g], [-g, B]] in the
// (atom, photon) basis. The two candidate eigenvector forms (g, A-lambda)
// and (B-lambda, g) are algebraically equivalent; the larger one is kept to
// avoid cancellation (and to stay well defined at g = 0).
MixingWeights mixing_for(Complex lambda, Complex a_diag, Complex b_diag, double g) {
    const Complex va_atom{g, 0.0}, va_photon = a_diag - lambda;
    const Complex vb_atom = b_diag - lambda, vb_photon{g, 0.0};
    const double na = std::norm(va_atom) + std::norm(va_photon);
    const double nb = std::norm(vb_atom) + std::norm(vb_photon);
    if (na >= nb) {
        return {std::norm(va_atom) / na, std::norm(va_photon) / na};
    }
    return {std::norm(vb_atom) / nb, std::norm(vb_photon) / nb};
}

// Assign (+,-) labels: larger real part wins; on a tie the photon-like root
// with the larger |Im| is "+", so "-" is always the narrow atom-like mode.
bool first_is_plus(Complex r1, Complex r2) {
    const double scale = std::abs(r1) + std::abs(r2);
    if (std::abs(r1.real() - r2.real()) > 1e-12 * scale) {
        return r1.real() > r2.real();
    }
    return std::abs(r1.imag()) > std::abs(r2.imag());
}

ComplexModePair label_pair(Complex r1, Complex r2, Complex a_diag, Complex b_diag,
                           double g, bool degenerate) {
    ComplexModePair out;
    if (!first_is_plus(r1, r2)) std::swap(r1, r2);
    out.omega_plus = r1;
    out.omega_minus = r2;
    out.degenerate = degenerate;
    if (degenerate) {
        out.mixing_plus = {kUndefined, kUndefined};
        out.mixing_minus = {kUndefined, kUndefined};
    } else {
        out.mixing_plus = mixing_for(r1, a_diag, b_diag, g);
        out.mixing_minus = mixing_for(r2, a_diag, b_diag, g);
    }
    return out;
}

} // namespace

SystemParams::SystemParams(double g_, double kappa_, double gamma_,
                           double omega_c_, double omega_a_)
    : g(g_), kappa(kappa_), gamma(gamma_), omega_c(omega_c_), omega_a(omega_a_) {
    if (!all_finite({g, kappa, gamma, omega_c, omega_a})) {
        throw InvalidInput("SystemParams: all rates and frequencies must be finite");
    }
    if (g < 0.0) throw InvalidInput("SystemParams: coupling g must be >= 0");
    if (kappa <= 0.0) throw InvalidInput("SystemParams: cavity decay kappa must be > 0");
    if (gamma <= 0.0) throw InvalidInput("SystemParams: atomic decay gamma must be > 0");
}

SystemParams SystemParams::from_mhz(double g_mhz, double kappa_mhz, double gamma_mhz,
                                    double omega_c_mhz, double omega_a_mhz) {
    return SystemParams(mhz_to_angular(g_mhz), mhz_to_angular(kappa_mhz),
                        mhz_to_angular(gamma_mhz), mhz_to_angular(omega_c_mhz),
                        mhz_to_angular(omega_a_mhz));
}

SystemParams SystemParams::from_cooperativity(double c, double kappa, double gamma,
                                              double omega_c, double omega_a) {
    if (!(c >= 0.0)) throw InvalidInput("SystemParams: cooperativity must be >= 0");
    return SystemParams(std::sqrt(c * kappa * gamma), kappa, gamma, omega_c, omega_a);
}

double cooperativity(const SystemParams &params) {
    return params.g * params.g / (params.kappa * params.gamma);
}

const char *regime_name(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::Purcell: return "Purcell";
        case RegimeTag::Intermediate: return "Intermediate";
        case RegimeTag::StrongCoupling: return "StrongCoupling";
    }
    return "?";
}

Regime classify_regime(const SystemParams &params) {
    if (!(params.kappa > params.gamma)) {
        throw InvalidInput("classify_regime: requires kappa > gamma");
    }
    Regime r;
    r.g_ep = 0.5 * (params.kappa - params.gamma);
    r.g_sc = std::sqrt(0.5 * (params.kappa * params.kappa + params.gamma * params.gamma));
    if (params.g < r.g_ep) {
        r.tag = RegimeTag::Purcell;
    } else if (params.g < r.g_sc) {
        r.tag = RegimeTag::Intermediate;
    } else {
        r.tag = RegimeTag::StrongCoupling;
    }
    return r;
}

UndampedModes undamped_eigenfrequencies(const SystemParams &params) {
    const double half_det = 0.5 * params.detuning_ca();
    // hypot keeps the splitting exactly 2g on resonance and is overflow-safe.
    const double root = std::hypot(params.g, half_det);
    return {params.omega_a + half_det + root, params.omega_a + half_det - root};
}

ComplexModePair damped_eigenvalues(const SystemParams &params) {
    const Complex a_diag{params.omega_a, -params.gamma};
    const Complex b_diag{params.omega_c, -params.kappa};
    if (params.g == 0.0) {
        // Uncoupled: the eigenvalues are the bare lines themselves; skip the
        // mean +- sqrt round trip so they come back bit-exact.
        return label_pair(a_diag, b_diag, a_diag, b_diag, 0.0, a_diag == b_diag);
    }
    const Complex mean = 0.5 * (a_diag + b_diag);
    const Complex half_split = 0.5 * (b_diag - a_diag);  // [D - i(kappa-gamma)]/2
    const Complex radicand = params.g * params.g + half_split * half_split;
    const Complex root = std::sqrt(radicand);
    const Complex r1 = mean + root;
    const Complex r2 = mean - root;
    const bool degenerate = (r1 == r2);
    return label_pair(r1, r2, a_diag, b_diag, params.g, degenerate);
}

ComplexModePair eigensolve_2x2(const SystemParams &params) {
    Eigen::Matrix2cd m;
    m << Complex{params.omega_a, -params.gamma}, Complex{-params.g, 0.0},
         Complex{-params.g, 0.0}, Complex{params.omega_c, -params.kappa};
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensolve_2x2: eigensolver failed to converge");
    }
    const Complex l0 = solver.eigenvalues()(0);
    const Complex l1 = solver.eigenvalues()(1);

    // Defective only at the exceptional point; detected there by eigenvalue
    // coalescence (the split reopens as sqrt of any perturbation, so a tight
    // relative threshold only fires essentially on the EP itself).
    const double scale = std::abs(l0) + std::abs(l1) + params.kappa + params.gamma;
    if (std::abs(l0 - l1) <= 1e-7 * scale) {
        const Complex degenerate_value = 0.5 * (l0 + l1);
        ComplexModePair out;
        out.omega_plus = degenerate_value;
        out.omega_minus = degenerate_value;
        out.degenerate = true;
        out.mixing_plus = {kUndefined, kUndefined};
        out.mixing_minus = {kUndefined, kUndefined};
        return out;
    }

    ComplexModePair out;
    const bool zero_first = first_is_plus(l0, l1);
    const int ip = zero_first ? 0 : 1;
    const int im = zero_first ? 1 : 0;
    out.omega_plus = solver.eigenvalues()(ip);
    out.omega_minus = solver.eigenvalues()(im);
    const auto weight = [&](int col) {
        const double wa = std::norm(solver.eigenvectors()(0, col));
        const double wp = std::norm(solver.eigenvectors()(1, col));
        const double n = wa + wp;
        return MixingWeights{wa / n, wp / n};
    };
    out.mixing_plus = weight(ip);
    out.mixing_minus = weight(im);
    return out;
}

std::vector<SweepPoint> sweep_coupling(const SystemParams &base,
                                       const std::vector<double> &g_values) {
    std::vector<SweepPoint> sweep;
    sweep.reserve(g_values.size());
    for (double g : g_values) {
        SystemParams p(g, base.kappa, base.gamma, base.omega_c, base.omega_a);
        ComplexModePair modes = damped_eigenvalues(p);
        if (!sweep.empty() && !modes.degenerate) {
            // Continuity: keep each branch closest to its predecessor rather
            // than re-deriving labels, which would swap across the EP.
            const ComplexModePair &prev = sweep.back().modes;
            const double keep = std::abs(modes.omega_plus - prev.omega_plus) +
                                std::abs(modes.omega_minus - prev.omega_minus);
            const double swap = std::abs(modes.omega_plus - prev.omega_minus) +
                                std::abs(modes.omega_minus - prev.omega_plus);
            if (swap < keep) {
                std::swap(modes.omega_plus, modes.omega_minus);
                std::swap(modes.mixing_plus, modes.mixing_minus);
            }
        }
        sweep.push_back({g, modes});
    }
    return sweep;
}

} // namespace cqed
