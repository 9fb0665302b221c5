#include <doctest.h>

#include <cmath>
#include <vector>

#include "swsys/csv.hpp"
#include "swsys/sim.hpp"

#include "test_families.hpp"

using namespace swsys;

namespace {

std::vector<Expr> unit_input() { return {parse_expression("1")}; }
std::vector<Expr> zero_input() { return {parse_expression("0")}; }

}  // namespace

TEST_CASE("integrator hits the analytic solution of xdot = -x") {
    auto fam = test_support::scalar_linear_family();
    const double x0[] = {1.0};
    auto traj = integrate(fam, no_switch_signal(1), zero_input(), x0, 1.0, 1e-3);
    CHECK(std::abs(traj.x.back() - std::exp(-1.0)) <= 1e-6);
    CHECK(traj.t.back() == doctest::Approx(1.0));
    CHECK(!traj.diverged);
}

TEST_CASE("observed convergence order of RK4 is at least 3.5") {
    auto fam = test_support::scalar_linear_family();
    const double x0[] = {1.0};
    auto err = [&](double dt) {
        auto traj = integrate(fam, no_switch_signal(1), zero_input(), x0, 1.0, dt);
        return std::abs(traj.x.back() - std::exp(-1.0));
    };
    const double e1 = err(1e-2), e2 = err(5e-3), e3 = err(2.5e-3);
    CHECK(std::log2(e1 / e2) >= 3.5);
    CHECK(std::log2(e2 / e3) >= 3.5);
}

TEST_CASE("switch-aligned integration across a contraction/expansion pair") {
    // xdot = -x on ]0,1], xdot = +x on ]1,2]: x(2) = x0.
    SwitchedFamily fam = test_support::scalar_linear_family();
    SubsystemSpec grow = fam.subsystems[0];
    grow.index = 2;
    grow.f = {parse_expression("x1", std::set<std::string>{"x1", "v1"})};
    grow.lambda = -1.0;
    fam.subsystems.push_back(grow);
    fam.transitions = {{1, 2}, {2, 1}};
    fam.mu[{1, 2}] = 1.0;
    fam.mu[{2, 1}] = 1.0;

    SwitchingSignal sig;
    sig.taus = {0.0, 1.0};
    sig.modes = {1, 2};
    const double x0[] = {1.0};
    auto traj = integrate(fam, sig, zero_input(), x0, 2.0, 1e-3);
    CHECK(std::abs(traj.x.back() - 1.0) <= 1e-5);

    // The switching instant is a grid point and the recorded mode sequence
    // is sigma exactly (right-continuous).
    bool found = false;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.t[k] == 1.0) {
            found = true;
            CHECK(traj.mode[k] == 2);
        }
        CHECK(traj.mode[k] == sig.mode_at(traj.t[k]));
    }
    CHECK(found);
}

TEST_CASE("two-mode example trajectory stays bounded under the generated signal") {
    auto fam = test_support::sec4_family();
    auto bounds = test_support::sec4_bound_set();
    AdmissibleOptions opts;
    opts.mode_cycle = {1, 2};
    opts.grid_step = 0.05;
    auto sig = generate_admissible_signal(bounds, 40.0, opts);

    const double x0[] = {100.0, 100.0};
    auto traj = integrate(fam, sig, unit_input(), x0, 40.0, 1e-3);
    CHECK(!traj.diverged);
    CHECK(traj.sup_norm() < 1e3);
    CHECK(traj.final_norm() < traj.norm_x.front());
    CHECK(traj.final_norm() < 10.0);

    // Every switching instant within the horizon is a grid point.
    for (double tau : sig.taus) {
        if (tau > 40.0) continue;
        bool found = false;
        for (double t : traj.t)
            if (t == tau) found = true;
        CHECK(found);
    }
}

TEST_CASE("time-varying input is sampled at the RK4 substages") {
    // xdot = -x + sin(t): x(t) = (x0 + 1/2) e^{-t} + (sin t - cos t)/2.
    auto fam = test_support::scalar_linear_family();
    const std::vector<Expr> input = {parse_expression("sin(t)", std::set<std::string>{"t"})};
    const double x0[] = {1.0};
    auto traj = integrate(fam, no_switch_signal(1), input, x0, 1.0, 1e-3);
    const double expected = 1.5 * std::exp(-1.0) + 0.5 * (std::sin(1.0) - std::cos(1.0));
    CHECK(std::abs(traj.x.back() - expected) <= 1e-9);
}

TEST_CASE("expression domain problems abort with a time stamp") {
    SwitchedFamily fam = test_support::scalar_linear_family();
    fam.subsystems[0].f = {parse_expression("-sqrt(x1)", std::set<std::string>{"x1", "v1"})};
    const double x0[] = {-1.0};  // sqrt of a negative state
    auto traj = integrate(fam, no_switch_signal(1), zero_input(), x0, 1.0, 1e-2);
    CHECK(traj.aborted);
    CHECK(traj.abort_time > 0.0);
    CHECK(!traj.abort_reason.empty());
}

TEST_CASE("divergence is flagged and does not abort the batch") {
    SwitchedFamily fam = test_support::scalar_linear_family();
    fam.subsystems[0].f = {parse_expression("x1", std::set<std::string>{"x1", "v1"})};
    fam.subsystems[0].lambda = -1.0;  // expanding forever
    BatchOptions opts;
    opts.n_runs = 3;
    opts.seed = 5;
    opts.t_end = 40.0;
    opts.dt = 1e-2;
    opts.box.ranges = {{1.0, 2.0}};
    auto summaries = batch_simulate(fam, no_switch_signal(1), zero_input(), opts);
    REQUIRE(summaries.size() == 3);
    for (const auto& s : summaries) CHECK(s.diverged);
}

TEST_CASE("batch is reproducible and degenerate boxes pin the initial state") {
    auto fam = test_support::scalar_linear_family();
    BatchOptions opts;
    opts.n_runs = 4;
    opts.seed = 42;
    opts.t_end = 1.0;
    opts.dt = 1e-2;
    opts.box.ranges = {{-3.0, 3.0}};

    auto a = batch_simulate(fam, no_switch_signal(1), unit_input(), opts);
    auto b = batch_simulate(fam, no_switch_signal(1), unit_input(), opts);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x0 == b[i].x0);              // bit-identical
        CHECK(a[i].final_norm == b[i].final_norm);
        CHECK(a[i].sup_norm == b[i].sup_norm);
    }

    opts.n_runs = 1;
    opts.box.ranges = {{2.0, 2.0}};
    auto pinned = batch_simulate(fam, no_switch_signal(1), unit_input(), opts);
    const double x0[] = {2.0};
    auto direct = integrate(fam, no_switch_signal(1), unit_input(), x0, 1.0, 1e-2);
    CHECK(pinned[0].final_norm == direct.final_norm());
}

TEST_CASE("certified envelope holds along simulated trajectories") {
    auto fam = test_support::scalar_linear_family();
    auto bounds = test_support::scalar_linear_bound_set();
    std::vector<double> horizons;
    for (int i = 1; i <= 100; ++i) horizons.push_back(0.5 * i);
    std::vector<SwitchingSignal> sigs = {no_switch_signal(1)};
    auto outcome =
        assemble_certificate(fam, bounds, RateFunction::linear(1.0), 0.0, horizons, sigs);
    REQUIRE(outcome.issued());

    const double x0[] = {-50.0};
    auto traj = integrate(fam, no_switch_signal(1), unit_input(), x0, 20.0, 1e-3);
    auto rep = check_envelope(traj, *outcome.certificate, traj.input_sup_norm());
    CHECK(rep.pass);
    CHECK(rep.violations == 0);

    // The t = 0 grid point is part of the check.
    CHECK(traj.norm_x.front() <=
          outcome.certificate->beta(traj.norm_x.front(), 0.0) + outcome.certificate->chi(1.0));

    SUBCASE("a deliberately shrunken envelope is caught") {
        ISSCertificate weak = *outcome.certificate;
        weak.c /= 10.0;
        weak.psi_bar2 /= 10.0;
        auto bad = check_envelope(traj, weak, traj.input_sup_norm());
        CHECK(!bad.pass);
        CHECK(bad.violations > 0);
    }
}

TEST_CASE("cascade bound holds along trajectories when assumptions verify") {
    auto fam = test_support::scalar_linear_family();
    const double x0[] = {4.0};
    SUBCASE("with input") {
        auto traj = integrate(fam, no_switch_signal(1), unit_input(), x0, 10.0, 1e-3);
        auto rep = check_cascade(traj, fam, no_switch_signal(1),
                                 fam.gamma_at(traj.input_sup_norm()));
        CHECK(rep.assumptions_verified);
        CHECK(rep.pass);
    }
    SUBCASE("zero input: classical Lyapunov decay") {
        auto traj = integrate(fam, no_switch_signal(1), zero_input(), x0, 5.0, 1e-3);
        auto rep = check_cascade(traj, fam, no_switch_signal(1), 0.0);
        CHECK(rep.pass);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const double v = 0.5 * traj.x[k] * traj.x[k];
            CHECK(v <= std::exp(-traj.t[k]) * 8.0 + 1e-9);
        }
    }
    SUBCASE("two-mode example is labeled assumption-unverified") {
        auto fam4 = test_support::sec4_family();
        SwitchingSignal sig;
        sig.taus = {0.0, 5.0, 5.04};
        sig.modes = {1, 2, 1};
        const double y0[] = {1.0, 1.0};
        auto traj = integrate(fam4, sig, unit_input(), y0, 8.0, 1e-3);
        auto rep = check_cascade(traj, fam4, sig, 0.0);
        CHECK(!rep.assumptions_verified);
    }
}

TEST_CASE("trajectory CSV round trip") {
    auto fam = test_support::scalar_linear_family();
    const double x0[] = {1.5};
    auto traj = integrate(fam, no_switch_signal(1), unit_input(), x0, 0.01, 1e-3);
    std::string text = trajectory_to_csv(traj);
    CHECK(text.rfind("t,mode,x1,v1,normx\n", 0) == 0);
    auto back = trajectory_from_csv(text, 1, 1);
    CHECK(trajectory_to_csv(back) == text);
}
