#include "cqed/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

struct State {
    Complex sigma;
    Complex a;
};

State operator+(State x, State y) { return {x.sigma + y.sigma, x.a + y.a}; }
State operator*(double s, State x) { return {s * x.sigma, s * x.a}; }

bool finite(const State &s) {
    return std::isfinite(s.sigma.real()) && std::isfinite(s.sigma.imag()) &&
           std::isfinite(s.a.real()) && std::isfinite(s.a.imag());
}

} // namespace

double default_dt(const SystemParams &params) { return 0.02 / params.kappa; }

Trajectory integrate(const SystemParams &params, const ProbeConfig &probe,
                     const DetuningPair &det, const FieldPair &initial,
                     double duration, double dt) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw InvalidInput("integrate: duration must be finite and > 0");
    }
    if (!(dt > 0.0) || dt > 0.05 / params.kappa) {
        throw InvalidInput("integrate: require 0 < dt <= 0.05/kappa");
    }

    const Complex m_ss{-params.gamma, det.delta_a};
    const Complex m_aa{-params.kappa, det.delta_c};
    const Complex coupling{0.0, params.g};
    const Complex drive_sigma{0.0, 0.5 * probe.omega_rabi};
    const Complex drive_a{probe.eta, 0.0};

    const auto rhs = [&](const State &y) -> State {
        return {m_ss * y.sigma + coupling * y.a + drive_sigma,
                m_aa * y.a + coupling * y.sigma + drive_a};
    };

    const auto n_steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
    if (n_steps > 50'000'000) {
        throw InvalidInput("integrate: more than 5e7 steps requested; increase dt or "
                           "shorten the duration");
    }

    Trajectory traj;
    traj.drive = probe;
    traj.detuning = det;
    traj.times.reserve(n_steps + 1);
    traj.a_t.reserve(n_steps + 1);
    traj.sigma_t.reserve(n_steps + 1);

    State y{initial.sigma, initial.a};
    traj.times.push_back(0.0);
    traj.sigma_t.push_back(y.sigma);
    traj.a_t.push_back(y.a);

    for (std::size_t step = 1; step <= n_steps; ++step) {
        const State k1 = rhs(y);
        const State k2 = rhs(y + (0.5 * dt) * k1);
        const State k3 = rhs(y + (0.5 * dt) * k2);
        const State k4 = rhs(y + dt * k3);
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!finite(y)) {
            throw NumericalError("integrate: non-finite state at t = " +
                                 std::to_string(static_cast<double>(step) * dt));
        }
        traj.times.push_back(static_cast<double>(step) * dt);
        traj.sigma_t.push_back(y.sigma);
        traj.a_t.push_back(y.a);
    }
    return traj;
}

TimeWindow default_ringdown_window(const SystemParams &params) {
    const double slow_rate = 2.0 * params.gamma * (1.0 + cooperativity(params));
    const double t0 = 5.0 / params.kappa;
    return {t0, t0 + 3.0 / slow_rate};
}

double fit_log_power_rate(const Trajectory &traj, double t0, double t1) {
    if (!(t1 > t0)) throw InvalidInput("fit_log_power_rate: empty window");

    // Use |a|^2 unless the cavity amplitude never built up at all, in which
    // case the atomic coherence carries the decay (g = 0 atom drive leaves
    // a identically zero and only sigma rings down).
    double max_a = 0.0, max_sigma = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        max_a = std::max(max_a, std::abs(traj.a_t[i]));
        max_sigma = std::max(max_sigma, std::abs(traj.sigma_t[i]));
    }
    const bool use_sigma = max_a < 1e-12 * max_sigma;
    const std::vector<Complex> &signal = use_sigma ? traj.sigma_t : traj.a_t;

    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < t0 || t > t1) continue;
        const double power = std::norm(signal[i]);
        if (power <= 0.0) continue;  // exact zero crossing sample
        const double y = std::log(power);
        sum_t += t;
        sum_y += y;
        sum_tt += t * t;
        sum_ty += t * y;
        ++n;
    }
    if (n < 3) throw NumericalError("fit_log_power_rate: too few samples in window");
    const double denom = static_cast<double>(n) * sum_tt - sum_t * sum_t;
    if (denom == 0.0) throw NumericalError("fit_log_power_rate: degenerate window");
    const double slope = (static_cast<double>(n) * sum_ty - sum_t * sum_y) / denom;
    return -slope;
}

double ringdown_rate(const SystemParams &params, const ProbeConfig &probe_then_off,
                     const TimeWindow &window) {
    if (!(window.t_start >= 5.0 / params.kappa)) {
        throw InvalidInput("ringdown_rate: t_start must be >= 5/kappa (past the fast transient)");
    }
    const double slow_rate = 2.0 * params.gamma * (1.0 + cooperativity(params));
    if (window.t_end - window.t_start < 3.0 / slow_rate * (1.0 - 1e-12)) {
        throw InvalidInput("ringdown_rate: window shorter than 3 decay constants of the slow rate");
    }

    const DetuningPair resonant{0.0, 0.0};
    const FieldPair start = steady_field(params, probe_then_off, resonant);

    ProbeConfig off = probe_then_off;
    off.eta = 0.0;
    off.j_in = 0.0;
    off.omega_rabi = 0.0;

    const Trajectory traj =
        integrate(params, off, resonant, start, window.t_end, default_dt(params));
    return fit_log_power_rate(traj, window.t_start, window.t_end);
}

double group_delay_closed_form(const SystemParams &params) {
    const double g2 = params.g * params.g;
    const double gamma2 = params.gamma * params.gamma;
    return (1.0 / params.kappa) * (1.0 - g2 / gamma2) /
           (1.0 + g2 / (params.kappa * params.gamma));
}

double group_delay_numeric(const SystemParams &params, double domega) {
    if (!(domega > 0.0) || domega > params.gamma / 100.0) {
        throw InvalidInput("group_delay_numeric: require 0 < domega <= gamma/100");
    }
    // arg(a/eta) is arg(a) for the real positive drive amplitude below.
    const ProbeConfig probe = ProbeConfig::cavity_drive(1.0, 0.5 * params.kappa);
    const auto phase_at = [&](double delta) {
        const FieldPair f = field_cavity_drive(params, probe, DetuningPair{delta, delta});
        return std::arg(f.a);
    };
    const double raw = phase_at(domega) - phase_at(-domega);
    const double step = std::remainder(raw, 2.0 * std::numbers::pi);
    if (std::abs(step) >= std::numbers::pi * (1.0 - 1e-9)) {
        throw NumericalError(
            "group_delay_numeric: phase step exceeds pi between samples; shrink domega");
    }
    return step / (2.0 * domega);
}

} // namespace cqed
