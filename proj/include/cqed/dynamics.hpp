#pragma once

#include <vector>

#include "cqed/model.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

// Time-domain solution of the coupled equations of motion in the probe
// rotating frame. Uniform step; values are finite throughout (integration
// blow-up raises instead of being stored).
struct Trajectory {
    std::vector<double> times;     // s, strictly increasing, uniform step
    std::vector<Complex> a_t;      // cavity amplitude
    std::vector<Complex> sigma_t;  // atomic coherence
    ProbeConfig drive;             // drive snapshot
    DetuningPair detuning{0.0, 0.0};
};

// Classical fixed-step RK4 integration of
//   d(sigma)/dt = -(gamma - i*Da) sigma + i g a + i Omega/2
//   d(a)/dt     = -(kappa - i*Dc) a     + i g sigma + eta
// from `initial` over `duration`. Requires dt <= 0.05/kappa. Converges to
// the closed-form steady state for any drive.
Trajectory integrate(const SystemParams &params, const ProbeConfig &probe,
                     const DetuningPair &det, const FieldPair &initial,
                     double duration, double dt);

// Default integrator step, kappa*dt = 0.02.
double default_dt(const SystemParams &params);

struct TimeWindow {
    double t_start;  // s
    double t_end;    // s
};

// Ring-down fit window recommended for the slow tail:
// [5/kappa, 5/kappa + 3/(2*gamma*(1+C))].
TimeWindow default_ringdown_window(const SystemParams &params);

// Least-squares slope of ln|a(t)|^2 over [t0, t1]; returns the decay rate
// (positive for decaying power). Falls back to ln|sigma(t)|^2 when the
// cavity amplitude is identically zero (uncoupled atom drive).
double fit_log_power_rate(const Trajectory &traj, double t0, double t1);

// Drives the system to its resonant (Da = Dc = 0) steady state, shuts the
// drive off, integrates the free decay and fits the window. In the Purcell
// regime the returned rate is 2*gamma*(1+C), the slow-tail decay of the
// intracavity power. Requires t_start >= 5/kappa and a window at least
// 3 decay constants of the expected slow rate long.
double ringdown_rate(const SystemParams &params, const ProbeConfig &probe_then_off,
                     const TimeWindow &window);

// Group delay of the cavity transfer function a/eta at resonance along
// Da = Dc, Taylor-expanded:
//   T_g = (1/kappa) * (1 - g^2/gamma^2) / (1 + g^2/(kappa*gamma)).
// Positive 1/kappa for the empty cavity, zero at g = gamma, approaching the
// superluminal advance -1/gamma deep in the transparency regime.
double group_delay_closed_form(const SystemParams &params);

// Same quantity by central finite difference of arg(a/eta) across resonance.
// Requires domega <= gamma/100; raises if the phase step exceeds pi (with
// the advice to shrink domega).
double group_delay_numeric(const SystemParams &params, double domega);

} // namespace cqed
