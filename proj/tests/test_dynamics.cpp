#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "cqed/dynamics.hpp"
#include "cqed/errors.hpp"
#include "cqed/units.hpp"

using namespace cqed;

namespace {

SystemParams defaults() { return SystemParams::from_mhz(95.0, 3000.0, 3.0); }

SystemParams with_c(double c) {
    return SystemParams::from_cooperativity(c, mhz_to_angular(3000.0), mhz_to_angular(3.0));
}

// Slowest decay rate of the probe-frame dynamics: the detunings act as bare
// line positions relative to the probe, so the detuned system's eigenvalues
// set the transient lifetime.
double slowest_rate(const SystemParams &p, const DetuningPair &det) {
    const SystemParams shifted(p.g, p.kappa, p.gamma, -det.delta_c, -det.delta_a);
    const ComplexModePair m = damped_eigenvalues(shifted);
    return std::min(-m.omega_plus.imag(), -m.omega_minus.imag());
}

} // namespace

TEST_CASE("integrate preconditions") {
    const SystemParams p = defaults();
    const ProbeConfig probe = ProbeConfig::cavity_drive(1.0, 0.5 * p.kappa);
    const DetuningPair det{0.0, 0.0};
    const FieldPair zero{};
    CHECK_THROWS_AS(integrate(p, probe, det, zero, 1.0 / p.kappa, 0.06 / p.kappa),
                    InvalidInput);
    CHECK_THROWS_AS(integrate(p, probe, det, zero, 0.0, 0.02 / p.kappa), InvalidInput);
    CHECK_THROWS_AS(integrate(p, probe, det, zero, 1.0 / p.kappa, -1.0), InvalidInput);
}

TEST_CASE("integration blow-up is reported, not returned") {
    // A detuning far beyond the RK4 stability region at the maximum allowed
    // step makes the scheme amplify instead of decay.
    const SystemParams p = defaults();
    const ProbeConfig probe = ProbeConfig::cavity_drive(1.0, 0.5 * p.kappa);
    const DetuningPair det{100.0 * p.kappa, 0.0};
    FieldPair init;
    init.a = Complex(1.0, 0.0);
    CHECK_THROWS_AS(
        integrate(p, probe, det, init, 5000.0 * 0.05 / p.kappa, 0.05 / p.kappa),
        NumericalError);
}

TEST_CASE("trajectory converges to the cavity-drive steady state") {
    const SystemParams p = defaults();
    const ProbeConfig probe = ProbeConfig::cavity_drive(2.0e5, 0.5 * p.kappa);
    const DetuningPair det{0.0, 0.0};
    const Trajectory traj =
        integrate(p, probe, det, FieldPair{}, 20.0 / p.gamma, default_dt(p));
    const FieldPair ss = field_cavity_drive(p, probe, det);
    CHECK(std::abs(traj.a_t.back() - ss.a) / std::abs(ss.a) < 1e-6);
    CHECK(std::abs(traj.sigma_t.back() - ss.sigma) / std::abs(ss.sigma) < 1e-6);
    // Uniform strictly increasing times.
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        CHECK(traj.times[i] > traj.times[i - 1]);
    }
}

TEST_CASE("trajectory converges to the atom-drive steady state") {
    const SystemParams p = defaults();
    const ProbeConfig probe = ProbeConfig::atom_drive(0.05 * p.gamma, 0.5 * p.kappa);
    const DetuningPair det{0.0, 0.0};
    const Trajectory traj =
        integrate(p, probe, det, FieldPair{}, 20.0 / p.gamma, default_dt(p));
    const FieldPair ss = field_atom_drive(p, probe, det);
    CHECK(std::abs(traj.a_t.back() - ss.a) / std::abs(ss.a) < 1e-6);
    CHECK(std::abs(traj.sigma_t.back() - ss.sigma) / std::abs(ss.sigma) < 1e-6);
}

TEST_CASE("bare cavity ring-down matches the analytic decay") {
    const SystemParams p = SystemParams::from_mhz(0.0, 3000.0, 3.0);
    const ProbeConfig off = ProbeConfig::cavity_drive(0.0, 0.5 * p.kappa);
    FieldPair init;
    init.a = Complex(1.0, 0.0);
    const Trajectory traj =
        integrate(p, off, DetuningPair{0.0, 0.0}, init, 3.0 / p.kappa, default_dt(p));
    const double t_end = traj.times.back();
    const double expected = std::exp(-2.0 * p.kappa * t_end);
    CHECK(std::abs(std::norm(traj.a_t.back()) - expected) / expected < 1e-8);
}

TEST_CASE("steady-state equivalence on random configurations") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double gamma = mhz_to_angular(3.0);
    for (int i = 0; i < 30; ++i) {
        const double kappa = gamma * (2.0 + 300.0 * uni(rng));
        const double g = uni(rng) * 2.0 * kappa;
        const SystemParams p(g, kappa, gamma);
        const DetuningPair det{(uni(rng) - 0.5) * 4.0 * kappa,
                               (uni(rng) - 0.5) * 4.0 * kappa};
        const bool cavity = uni(rng) < 0.5;
        const ProbeConfig probe =
            cavity ? ProbeConfig::cavity_drive(1e3 + 1e5 * uni(rng), 0.5 * kappa)
                   : ProbeConfig::atom_drive((0.1 + uni(rng)) * gamma, 0.5 * kappa);
        const FieldPair ss = steady_field(p, probe, det);
        const double duration = 35.0 / slowest_rate(p, det);
        const Trajectory traj = integrate(p, probe, det, FieldPair{}, duration, default_dt(p));
        const double scale = std::abs(ss.a) + std::abs(ss.sigma);
        CHECK(std::abs(traj.a_t.back() - ss.a) <= 1e-6 * scale);
        CHECK(std::abs(traj.sigma_t.back() - ss.sigma) <= 1e-6 * scale);
    }
}

TEST_CASE("free transient matches the matrix-exponential solution pointwise") {
    // Independent oracle: diagonalize the probe-frame dynamics matrix and
    // propagate the initial state analytically.
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double gamma = mhz_to_angular(3.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double kappa = gamma * (50.0 + 950.0 * std::abs(uni(rng)));
        const SystemParams p(std::abs(uni(rng)) * kappa, kappa, gamma);
        const DetuningPair det{uni(rng) * kappa, uni(rng) * kappa};
        FieldPair init;
        init.sigma = Complex(uni(rng), uni(rng));
        init.a = Complex(uni(rng), uni(rng));

        Eigen::Matrix2cd m;
        m << Complex(-p.gamma, det.delta_a), Complex(0.0, p.g),
             Complex(0.0, p.g), Complex(-p.kappa, det.delta_c);
        const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> eig(m, true);
        REQUIRE(eig.info() == Eigen::Success);
        const Eigen::Vector2cd coeffs =
            eig.eigenvectors().colPivHouseholderQr().solve(
                Eigen::Vector2cd(init.sigma, init.a));

        const ProbeConfig off = ProbeConfig::cavity_drive(0.0, 0.5 * p.kappa);
        const double duration = 0.5 / p.gamma;
        const Trajectory traj = integrate(p, off, det, init, duration, 0.005 / p.kappa);

        const double scale = std::abs(init.sigma) + std::abs(init.a);
        for (std::size_t i = 0; i < traj.times.size(); i += traj.times.size() / 7) {
            const double t = traj.times[i];
            const Eigen::Vector2cd expected =
                eig.eigenvectors() *
                Eigen::Vector2cd(coeffs(0) * std::exp(eig.eigenvalues()(0) * t),
                                 coeffs(1) * std::exp(eig.eigenvalues()(1) * t));
            CHECK(std::abs(traj.sigma_t[i] - expected(0)) <= 1e-7 * scale);
            CHECK(std::abs(traj.a_t[i] - expected(1)) <= 1e-7 * scale);
        }
    }
}

TEST_CASE("probe-frame dynamics matrix shares its spectrum with the damped modes") {
    // Frame correspondence: eig(M) = -i*(omega_pm - omega_p), with the
    // detunings playing the bare lines relative to the probe.
    std::mt19937_64 rng(556);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double gamma = mhz_to_angular(3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double kappa = gamma * (2.0 + 998.0 * std::abs(uni(rng)));
        const double omega_p = mhz_to_angular(500.0 * uni(rng));
        const SystemParams p(std::abs(uni(rng)) * 2.0 * kappa, kappa, gamma,
                             omega_p - uni(rng) * 3.0 * kappa,
                             omega_p - uni(rng) * 3.0 * kappa);
        const DetuningPair det = DetuningPair::from_probe(p, omega_p);

        Eigen::Matrix2cd m;
        m << Complex(-p.gamma, det.delta_a), Complex(0.0, p.g),
             Complex(0.0, p.g), Complex(-p.kappa, det.delta_c);
        const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> eig(m, false);
        REQUIRE(eig.info() == Eigen::Success);

        const ComplexModePair modes = damped_eigenvalues(p);
        const Complex expect0 = Complex(0.0, -1.0) * (modes.omega_plus - omega_p);
        const Complex expect1 = Complex(0.0, -1.0) * (modes.omega_minus - omega_p);
        const Complex l0 = eig.eigenvalues()(0);
        const Complex l1 = eig.eigenvalues()(1);
        const double straight = std::abs(l0 - expect0) + std::abs(l1 - expect1);
        const double crossed = std::abs(l0 - expect1) + std::abs(l1 - expect0);
        const double scale = std::abs(l0) + std::abs(l1) + kappa;
        CHECK(std::min(straight, crossed) <= 1e-9 * scale);
    }
}

TEST_CASE("trajectories are linear in the drive strength") {
    const SystemParams p = defaults();
    const DetuningPair det{0.5 * p.kappa, -3.0 * p.gamma};
    const ProbeConfig base = ProbeConfig::cavity_drive(1.0e4, 0.5 * p.kappa);
    const ProbeConfig twice = base.with_flux(4.0 * base.j_in);   // eta doubles
    const ProbeConfig tenfold = base.with_flux(100.0 * base.j_in);
    const double duration = 3.0 / p.gamma;
    const Trajectory t1 = integrate(p, base, det, FieldPair{}, duration, default_dt(p));
    const Trajectory t2 = integrate(p, twice, det, FieldPair{}, duration, default_dt(p));
    const Trajectory t10 = integrate(p, tenfold, det, FieldPair{}, duration, default_dt(p));
    REQUIRE(t1.times.size() == t2.times.size());
    for (std::size_t i = 0; i < t1.times.size(); i += 7) {
        CHECK(t2.a_t[i] == 2.0 * t1.a_t[i]);  // power-of-two scaling is exact
        CHECK(std::abs(t10.a_t[i] - 10.0 * t1.a_t[i]) <=
              1e-12 * (std::abs(t10.a_t[i]) + 1e-300));
    }
}

TEST_CASE("RK4 order: halving dt reduces the endpoint error ~16x") {
    const SystemParams p = SystemParams::from_mhz(0.0, 3000.0, 3.0);
    const ProbeConfig off = ProbeConfig::cavity_drive(0.0, 0.5 * p.kappa);
    FieldPair init;
    init.a = Complex(1.0, 0.0);
    const auto endpoint_error = [&](double dt) {
        const Trajectory traj =
            integrate(p, off, DetuningPair{0.0, 0.0}, init, 3.0 / p.kappa, dt);
        const double analytic = std::exp(-p.kappa * traj.times.back());
        return std::abs(traj.a_t.back().real() - analytic);
    };
    const double ratio = endpoint_error(0.04 / p.kappa) / endpoint_error(0.02 / p.kappa);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("ring-down rate recovers 2*gamma*(1+C) in the Purcell regime") {
    SUBCASE("C near 1 (reference coupling)") {
        const SystemParams p = defaults();
        const ProbeConfig probe = ProbeConfig::cavity_drive(1.0e5, 0.5 * p.kappa);
        const double rate = ringdown_rate(p, probe, default_ringdown_window(p));
        const double expected = 2.0 * p.gamma * (1.0 + cooperativity(p));
        CHECK(rate == doctest::Approx(expected).epsilon(0.02));
    }
    SUBCASE("C = 13.4 (largest measured cooperativity)") {
        const SystemParams p = with_c(13.4);
        const ProbeConfig probe = ProbeConfig::cavity_drive(1.0e5, 0.5 * p.kappa);
        const double rate = ringdown_rate(p, probe, default_ringdown_window(p));
        CHECK(rate == doctest::Approx(2.0 * p.gamma * 14.4).epsilon(0.02));
        // Cross-check against the slow eigenmode decay.
        const ComplexModePair m = damped_eigenvalues(p);
        CHECK(rate == doctest::Approx(-2.0 * m.omega_minus.imag()).epsilon(0.005));
    }
    SUBCASE("g = 0, cavity drive: bare ring-down at 2*kappa") {
        const SystemParams p = SystemParams::from_mhz(0.0, 3000.0, 3.0);
        const ProbeConfig probe = ProbeConfig::cavity_drive(1.0e5, 0.5 * p.kappa);
        const double rate = ringdown_rate(p, probe, default_ringdown_window(p));
        CHECK(rate == doctest::Approx(2.0 * p.kappa).epsilon(1e-4));
    }
    SUBCASE("g = 0, atom drive: sigma-dominated tail at 2*gamma") {
        const SystemParams p = SystemParams::from_mhz(0.0, 3000.0, 3.0);
        const ProbeConfig probe = ProbeConfig::atom_drive(0.1 * p.gamma, 0.5 * p.kappa);
        const double rate = ringdown_rate(p, probe, default_ringdown_window(p));
        CHECK(rate == doctest::Approx(2.0 * p.gamma).epsilon(1e-4));
    }
    SUBCASE("window preconditions") {
        const SystemParams p = defaults();
        const ProbeConfig probe = ProbeConfig::cavity_drive(1.0e5, 0.5 * p.kappa);
        CHECK_THROWS_AS(ringdown_rate(p, probe, TimeWindow{1.0 / p.kappa, 1.0 / p.gamma}),
                        InvalidInput);
        CHECK_THROWS_AS(
            ringdown_rate(p, probe, TimeWindow{5.0 / p.kappa, 5.5 / p.kappa}),
            InvalidInput);
    }
}

TEST_CASE("two-scale ring-down: fast cavity transient, slow Purcell tail") {
    for (double c : {1.0, 5.0, 10.0}) {
        const SystemParams p = with_c(c);
        const ProbeConfig probe = ProbeConfig::cavity_drive(1.0e5, 0.5 * p.kappa);
        const FieldPair start = steady_field(p, probe, DetuningPair{0.0, 0.0});
        ProbeConfig off = probe;
        off.eta = 0.0;
        off.j_in = 0.0;
        const TimeWindow window = default_ringdown_window(p);
        const Trajectory traj = integrate(p, off, DetuningPair{0.0, 0.0}, start,
                                          window.t_end, default_dt(p));
        const double early = fit_log_power_rate(traj, 0.0, 1.0 / p.kappa);
        const double late = fit_log_power_rate(traj, window.t_start, window.t_end);
        CHECK(std::abs(early) > 10.0 * late);
        CHECK(late > 0.0);
    }
}

TEST_CASE("group delay closed form") {
    const double gamma = mhz_to_angular(3.0);
    SUBCASE("empty cavity: 1/kappa exactly") {
        const SystemParams p(0.0, 1000.0 * gamma, gamma);
        CHECK(group_delay_closed_form(p) == 1.0 / p.kappa);
    }
    SUBCASE("zero crossing at g = gamma") {
        const SystemParams p(gamma, 1000.0 * gamma, gamma);
        CHECK(group_delay_closed_form(p) == 0.0);
    }
    SUBCASE("finite-g value at g = 100*gamma, kappa = 1000*gamma") {
        // (1 - 1e4)/(1 + 10) / kappa: about -0.909/gamma, i.e. the -1/gamma
        // limit is still 9% away at this coupling.
        const SystemParams p(100.0 * gamma, 1000.0 * gamma, gamma);
        const double expected = (1.0 - 1e4) / (1.0 + 10.0) / p.kappa;
        CHECK(group_delay_closed_form(p) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(group_delay_closed_form(p) * gamma == doctest::Approx(-0.909).epsilon(1e-3));
    }
    SUBCASE("the -1/gamma advance emerges once C >> 1") {
        const SystemParams p(100.0 * gamma, 100.0 * gamma, gamma);  // C = 100
        CHECK(group_delay_closed_form(p) * gamma == doctest::Approx(-1.0).epsilon(0.02));
    }
    SUBCASE("dispersion sign flips at g = gamma") {
        CHECK(group_delay_closed_form(SystemParams(0.8 * gamma, 1000.0 * gamma, gamma)) > 0.0);
        CHECK(group_delay_closed_form(SystemParams(1.2 * gamma, 1000.0 * gamma, gamma)) < 0.0);
    }
}

TEST_CASE("group delay numeric derivative matches the closed form") {
    SUBCASE("bare cavity") {
        const SystemParams p = SystemParams::from_mhz(0.0, 3000.0, 3.0);
        const double numeric = group_delay_numeric(p, p.gamma / 1000.0);
        CHECK(numeric == doctest::Approx(1.0 / p.kappa).epsilon(1e-6));
    }
    SUBCASE("reference coupling") {
        const SystemParams p = defaults();
        const double closed = group_delay_closed_form(p);
        const double numeric = group_delay_numeric(p, p.gamma / 1000.0);
        CHECK(std::abs(numeric - closed) / std::abs(closed) < 1e-3);
    }
    SUBCASE("zero crossing") {
        const SystemParams p(mhz_to_angular(3.0), mhz_to_angular(3000.0),
                             mhz_to_angular(3.0));
        CHECK(std::abs(group_delay_numeric(p, p.gamma / 1000.0)) < 1e-3 / p.kappa);
    }
    SUBCASE("step size precondition") {
        const SystemParams p = defaults();
        CHECK_THROWS_AS(group_delay_numeric(p, p.gamma), InvalidInput);
    }
}
