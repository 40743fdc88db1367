#pragma once

#include <complex>

#include "cqed/model.hpp"

namespace cqed {

enum class DriveMode { CavityDrive, AtomDrive };

// Probe configuration for one of the two drive geometries.
//
// CavityDrive: coherent light enters through the input-output mirror with
// incident flux j_in (photons/s); the drive amplitude obeys
// eta^2 = 2*kappa_t*j_in where kappa_t is the transmission contribution of
// kappa through that mirror. AtomDrive: the atoms are illuminated from the
// side with Rabi frequency omega_rabi, and j_in = eta = 0.
struct ProbeConfig {
    DriveMode mode;
    double eta = 0.0;         // sqrt(photons/s), cavity drive amplitude
    double omega_rabi = 0.0;  // rad/s, atom drive Rabi frequency
    double j_in = 0.0;        // photons/s incident on the input mirror
    double kappa_t = 0.0;     // rad/s, input-mirror transmission rate
    double r1 = 1.0;          // power reflection, input-output mirror
    double r2 = 1.0;          // power reflection, back mirror
    double omega_p = 0.0;     // rad/s, probe frequency (informational)

    static ProbeConfig cavity_drive(double j_in, double kappa_t,
                                    double r1 = 1.0, double r2 = 1.0);
    static ProbeConfig atom_drive(double omega_rabi, double kappa_t, double r2 = 1.0);

    // With-copies for probe-strength sweeps.
    ProbeConfig with_flux(double j_in) const;
    ProbeConfig with_rabi(double omega_rabi) const;
};

// Probe detunings Delta_{a,c} = omega_p - omega_{a,c}, rad/s.
struct DetuningPair {
    double delta_c;
    double delta_a;

    DetuningPair(double delta_c_, double delta_a_);

    static DetuningPair from_probe(const SystemParams &params, double omega_p) {
        return {omega_p - params.omega_c, omega_p - params.omega_a};
    }
};

// Steady-state coherent amplitudes a = <a_hat>, sigma = <sigma_hat>. The
// weak-excitation treatment assumes |sigma|^2 << 1.
struct FieldPair {
    Complex a;
    Complex sigma;

    // Validity flag of the weak-excitation approximation: |sigma|^2 > 0.1.
    bool weak_excitation_breach() const { return std::norm(sigma) > 0.1; }
};

// Cavity-driven steady state:
//   a     = eta / [(kappa - i*Dc) + g^2/(gamma - i*Da)]
//   sigma = i*g*a / (gamma - i*Da)
FieldPair field_cavity_drive(const SystemParams &params, const ProbeConfig &probe,
                             const DetuningPair &det);

// Atom-driven steady state:
//   a     = -(g*Omega/2) / [(kappa - i*Dc)(gamma - i*Da) + g^2]
//   sigma = i*(g*a + Omega/2) / (gamma - i*Da)
FieldPair field_atom_drive(const SystemParams &params, const ProbeConfig &probe,
                           const DetuningPair &det);

// Mode dispatch to one of the two closed forms above.
FieldPair steady_field(const SystemParams &params, const ProbeConfig &probe,
                       const DetuningPair &det);

// Independent route to the same steady state: solves the 2x2 linear system
// of the equations of motion directly (Cramer) instead of the closed forms.
// Used as a sign-transcription cross-check against the formulas above.
FieldPair steady_field_linear(const SystemParams &params, const ProbeConfig &probe,
                              const DetuningPair &det);

// Detected photon flux from the input-output relation,
//   j_out = | -sqrt(R1*j) + sqrt(R2*kappa)*a |^2   (photons/s),
// with a from the mode-appropriate steady state (AtomDrive has j = 0).
double reflected_flux(const SystemParams &params, const ProbeConfig &probe,
                      const DetuningPair &det);

// Transmission through the coupling mirror in the atom-driven geometry:
// 2*kappa_t*|a|^2 photons/s.
double atom_drive_emission_flux(const SystemParams &params, const ProbeConfig &probe,
                                const DetuningPair &det);

// The driven atoms act as a secondary narrow-band probe of the cavity:
//   eta_eff = -(g*Omega/2) / (gamma - i*Da).
// Feeding eta_eff through the cavity-drive form reproduces the atom-drive
// steady state identically.
Complex effective_drive(const SystemParams &params, const ProbeConfig &probe,
                        const DetuningPair &det);

// Probe-strength-independent photon numbers:
//   CavityDrive: |a|^2 * (kappa/eta)^2
//   AtomDrive:   |a|^2 * (g^2 + kappa*gamma)^2 / (g*Omega/2)^2  (1 on resonance)
double scaled_photon_number(const SystemParams &params, const ProbeConfig &probe,
                            const DetuningPair &det);

} // namespace cqed
