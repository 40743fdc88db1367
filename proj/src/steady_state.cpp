#include "cqed/steady_state.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

void check_reflections(double r1, double r2) {
    if (!(r1 >= 0.0 && r1 <= 1.0) || !(r2 >= 0.0 && r2 <= 1.0)) {
        throw InvalidInput("ProbeConfig: power reflection coefficients must lie in [0,1]");
    }
}

void check_probe(const SystemParams &params, const ProbeConfig &probe) {
    if (probe.kappa_t > params.kappa) {
        throw InvalidInput("ProbeConfig: kappa_t exceeds kappa");
    }
}

const Complex kImag{0.0, 1.0};

} // namespace

ProbeConfig ProbeConfig::cavity_drive(double j_in, double kappa_t, double r1, double r2) {
    check_reflections(r1, r2);
    if (!(j_in >= 0.0) || !std::isfinite(j_in)) {
        throw InvalidInput("ProbeConfig: incident flux must be finite and >= 0");
    }
    if (!(kappa_t >= 0.0) || !std::isfinite(kappa_t)) {
        throw InvalidInput("ProbeConfig: kappa_t must be finite and >= 0");
    }
    ProbeConfig p;
    p.mode = DriveMode::CavityDrive;
    p.j_in = j_in;
    p.kappa_t = kappa_t;
    p.eta = std::sqrt(2.0 * kappa_t * j_in);
    p.r1 = r1;
    p.r2 = r2;
    return p;
}

ProbeConfig ProbeConfig::atom_drive(double omega_rabi, double kappa_t, double r2) {
    check_reflections(1.0, r2);
    if (!std::isfinite(omega_rabi)) {
        throw InvalidInput("ProbeConfig: Rabi frequency must be finite");
    }
    if (!(kappa_t >= 0.0) || !std::isfinite(kappa_t)) {
        throw InvalidInput("ProbeConfig: kappa_t must be finite and >= 0");
    }
    ProbeConfig p;
    p.mode = DriveMode::AtomDrive;
    p.omega_rabi = omega_rabi;
    p.kappa_t = kappa_t;
    p.r2 = r2;
    return p;
}

ProbeConfig ProbeConfig::with_flux(double j) const {
    ProbeConfig p = cavity_drive(j, kappa_t, r1, r2);
    p.omega_p = omega_p;
    return p;
}

ProbeConfig ProbeConfig::with_rabi(double omega) const {
    ProbeConfig p = atom_drive(omega, kappa_t, r2);
    p.omega_p = omega_p;
    return p;
}

DetuningPair::DetuningPair(double delta_c_, double delta_a_)
    : delta_c(delta_c_), delta_a(delta_a_) {
    if (!std::isfinite(delta_c) || !std::isfinite(delta_a)) {
        throw InvalidInput("DetuningPair: detunings must be finite");
    }
}

FieldPair field_cavity_drive(const SystemParams &params, const ProbeConfig &probe,
                             const DetuningPair &det) {
    if (probe.mode != DriveMode::CavityDrive) {
        throw InvalidInput("field_cavity_drive: probe is not in cavity-drive mode");
    }
    check_probe(params, probe);
    const Complex atom_pole{params.gamma, -det.delta_a};    // gamma - i*Da
    const Complex cavity_pole{params.kappa, -det.delta_c};  // kappa - i*Dc
    const Complex a = probe.eta / (cavity_pole + params.g * params.g / atom_pole);
    const Complex sigma = kImag * params.g * a / atom_pole;
    return {a, sigma};
}

FieldPair field_atom_drive(const SystemParams &params, const ProbeConfig &probe,
                           const DetuningPair &det) {
    if (probe.mode != DriveMode::AtomDrive) {
        throw InvalidInput("field_atom_drive: probe is not in atom-drive mode");
    }
    check_probe(params, probe);
    const Complex atom_pole{params.gamma, -det.delta_a};
    const Complex cavity_pole{params.kappa, -det.delta_c};
    const double half_rabi = 0.5 * probe.omega_rabi;
    const Complex a =
        -(params.g * half_rabi) / (cavity_pole * atom_pole + params.g * params.g);
    const Complex sigma = kImag * (params.g * a + half_rabi) / atom_pole;
    return {a, sigma};
}

FieldPair steady_field(const SystemParams &params, const ProbeConfig &probe,
                       const DetuningPair &det) {
    return probe.mode == DriveMode::CavityDrive ? field_cavity_drive(params, probe, det)
                                                : field_atom_drive(params, probe, det);
}

FieldPair steady_field_linear(const SystemParams &params, const ProbeConfig &probe,
                              const DetuningPair &det) {
    check_probe(params, probe);
    // Steady state of
    //   d(sigma)/dt = -(gamma - i*Da) sigma + i g a + i Omega/2   = 0
    //   d(a)/dt     = -(kappa - i*Dc) a     + i g sigma + eta     = 0
    // solved by Cramer's rule in the (sigma, a) unknowns.
    const Complex m00{-params.gamma, det.delta_a};
    const Complex m11{-params.kappa, det.delta_c};
    const Complex m01 = kImag * params.g;
    const Complex rhs0 = -kImag * 0.5 * probe.omega_rabi;
    const Complex rhs1{-probe.eta, 0.0};
    const Complex det_m = m00 * m11 - m01 * m01;
    const Complex sigma = (rhs0 * m11 - m01 * rhs1) / det_m;
    const Complex a = (m00 * rhs1 - rhs0 * m01) / det_m;
    return {a, sigma};
}

double reflected_flux(const SystemParams &params, const ProbeConfig &probe,
                      const DetuningPair &det) {
    check_reflections(probe.r1, probe.r2);
    double j = 0.0;
    FieldPair field;
    if (probe.mode == DriveMode::CavityDrive) {
        if (!(probe.j_in > 0.0)) {
            throw InvalidInput("reflected_flux: cavity drive requires j_in > 0");
        }
        j = probe.j_in;
        field = field_cavity_drive(params, probe, det);
    } else {
        field = field_atom_drive(params, probe, det);
    }
    const Complex amplitude =
        -std::sqrt(probe.r1 * j) + std::sqrt(probe.r2 * params.kappa) * field.a;
    return std::norm(amplitude);
}

double atom_drive_emission_flux(const SystemParams &params, const ProbeConfig &probe,
                                const DetuningPair &det) {
    const FieldPair field = field_atom_drive(params, probe, det);
    return 2.0 * probe.kappa_t * std::norm(field.a);
}

Complex effective_drive(const SystemParams &params, const ProbeConfig &probe,
                        const DetuningPair &det) {
    if (probe.mode != DriveMode::AtomDrive) {
        throw InvalidInput("effective_drive: probe is not in atom-drive mode");
    }
    const Complex atom_pole{params.gamma, -det.delta_a};
    return -(params.g * 0.5 * probe.omega_rabi) / atom_pole;
}

double scaled_photon_number(const SystemParams &params, const ProbeConfig &probe,
                            const DetuningPair &det) {
    check_probe(params, probe);
    const Complex atom_pole{params.gamma, -det.delta_a};
    const Complex cavity_pole{params.kappa, -det.delta_c};
    const double g2 = params.g * params.g;
    if (probe.mode == DriveMode::CavityDrive) {
        // |a|^2 (kappa/eta)^2 with the drive amplitude cancelled analytically.
        const Complex denom = cavity_pole + g2 / atom_pole;
        return params.kappa * params.kappa / std::norm(denom);
    }
    // |a|^2 (g^2 + kappa*gamma)^2 / (g*Omega/2)^2; finite also for g -> 0.
    const double peak_denom = g2 + params.kappa * params.gamma;
    return peak_denom * peak_denom / std::norm(cavity_pole * atom_pole + g2);
}

} // namespace cqed
