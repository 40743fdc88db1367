#pragma once

#include <complex>
#include <vector>

namespace cqed {

using Complex = std::complex<double>;

// Physical rates and frequencies of the coupled atom-cavity system, all as
// angular frequencies in rad/s.
//
// Conventions: the excited-state population decays at 2*gamma and the
// intracavity photon number at 2*kappa, so gamma and kappa are the
// half-widths (HWHM) of the bare atomic and cavity lines. g is the
// atom-field coupling; for an atomic ensemble it stands for the collective
// coupling g*sqrt(N_eff), which is taken as an input here (the weighted
// atom-number integral N_eff itself is not modelled).
struct SystemParams {
    double g;        // atom-field coupling (rad/s), >= 0
    double kappa;    // cavity field half-decay rate (rad/s), > 0
    double gamma;    // atomic dipole half-decay rate (rad/s), > 0
    double omega_c;  // bare cavity resonance (rad/s)
    double omega_a;  // bare atomic resonance (rad/s)

    SystemParams(double g_, double kappa_, double gamma_,
                 double omega_c_ = 0.0, double omega_a_ = 0.0);

    // Convenience: ordinary frequencies in MHz (value/2pi), as quoted in reports.
    static SystemParams from_mhz(double g_mhz, double kappa_mhz, double gamma_mhz,
                                 double omega_c_mhz = 0.0, double omega_a_mhz = 0.0);

    // Coupling derived from a target cooperativity, g = sqrt(C*kappa*gamma).
    static SystemParams from_cooperativity(double c, double kappa, double gamma,
                                           double omega_c = 0.0, double omega_a = 0.0);

    double detuning_ca() const { return omega_c - omega_a; }
};

// C = g^2 / (kappa*gamma), the ratio of coherent scattering into the cavity
// mode to free-space scattering.
double cooperativity(const SystemParams &params);

enum class RegimeTag { Purcell, Intermediate, StrongCoupling };

// Coupling-strength regime with its two boundary couplings:
//   g_ep = (kappa-gamma)/2          exceptional point of the damped modes
//   g_sc = sqrt((kappa^2+gamma^2)/2) resolved normal-mode splitting
// Tags are half-open: Purcell g < g_ep; Intermediate g_ep <= g < g_sc;
// StrongCoupling g >= g_sc.
struct Regime {
    RegimeTag tag;
    double g_ep;  // rad/s
    double g_sc;  // rad/s
};

const char *regime_name(RegimeTag tag);

// Requires kappa > gamma; the regime taxonomy assumes the cavity decays
// faster than the atom and is not silently relabelled otherwise.
Regime classify_regime(const SystemParams &params);

// Eigenfrequencies of the undamped single-excitation doublet:
//   omega_pm - omega_a = D/2 +- sqrt(g^2 + (D/2)^2),  D = omega_c - omega_a.
// Returned with first >= second; the splitting on resonance is exactly 2g.
struct UndampedModes {
    double omega_plus;
    double omega_minus;
};

UndampedModes undamped_eigenfrequencies(const SystemParams &params);

// Bare-state content of one damped eigenmode: |c|^2 weights of the excited
// atom and the one-photon state. Sum to 1 when defined.
struct MixingWeights {
    double atom;
    double photon;
};

// The two complex eigenvalues of the damped single-excitation problem,
// Im <= 0 (decaying modes), with their bare-state mixing weights.
//
// Branch convention: omega_plus is the root with the larger real part; on a
// real-part tie (resonant Purcell regime) omega_plus is the photon-like
// branch with the larger |Im|, leaving omega_minus as the narrow atom-like
// mode. At the exceptional point the eigenvalues coalesce, `degenerate` is
// set, and the mixing weights are NaN (the matrix is defective).
struct ComplexModePair {
    Complex omega_plus;
    Complex omega_minus;
    MixingWeights mixing_plus;
    MixingWeights mixing_minus;
    bool degenerate = false;
};

// Closed-form eigenvalues
//   omega_pm - omega_a = [D - i(kappa+gamma)]/2
//                        +- sqrt(g^2 + ([D - i(kappa-gamma)]/2)^2)
// of the non-Hermitian single-excitation matrix (see eigensolve_2x2).
ComplexModePair damped_eigenvalues(const SystemParams &params);

// Numerical oracle for damped_eigenvalues: diagonalizes
//   [[omega_a - i*gamma, -g], [-g, omega_c - i*kappa]]
// with a dense complex eigensolver. Agrees with the closed form to 1e-10
// relative after branch matching; eigenvector norms yield the mixing weights.
ComplexModePair eigensolve_2x2(const SystemParams &params);

// One row of a coupling sweep with branch continuity: each point's
// eigenvalues are matched to the nearest ones of the previous point, so the
// branches stay continuous across the exceptional point instead of swapping
// with the raw principal square root.
struct SweepPoint {
    double g;  // rad/s
    ComplexModePair modes;
};

std::vector<SweepPoint> sweep_coupling(const SystemParams &base,
                                       const std::vector<double> &g_values);

} // namespace cqed
