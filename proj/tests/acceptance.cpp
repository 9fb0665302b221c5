// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "swsys/builtin_configs.hpp"
#include "swsys/commands.hpp"
#include "swsys/config.hpp"
#include "swsys/csv.hpp"
#include "swsys/swsys.hpp"

#include "test_generators.hpp"

using namespace swsys;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("swsys_acceptance_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

ProjectConfig sec4_config() { return parse_config_text(std::string(builtin::kSec4Config)); }

ProjectConfig scalar_config() {
    return parse_config_text(std::string(builtin::kScalarLinearConfig));
}

// -----------------------------------------------------------------------
// 1. Bundled two-mode study: generated signal passes all bound checks; the
//    50-run batch from [-1000, 1000]^2 over [0, 40] at dt = 1e-3 stays
//    bounded with final norms below 1% of the initial norm plus 10.
//    Wall time must stay within 60 s.
// -----------------------------------------------------------------------
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;

    auto out = fresh_dir("c1");
    CommandOptions opts;
    opts.out_dir = out.string();
    {
        const fs::path cfg_path = out / "sec4_config.json";
        std::ofstream cfg_out(cfg_path);
        cfg_out << builtin::kSec4Config;
        opts.config_path = cfg_path.string();
    }

    if (cmd_generate(opts) != 0) {
        report(1, "two-mode reproduction", false, "signal generation failed");
        return;
    }
    auto cfg = sec4_config();
    auto sig = signal_from_csv(read_text(out / "signal.csv"));
    auto bounds_rep = check_signal_bounds(sig, cfg.bounds, 40.0, 0.01);
    if (!bounds_rep.pass) {
        pass = false;
        detail += "bound check failed; ";
    }

    BatchOptions batch;
    batch.n_runs = 50;
    batch.seed = cfg.simulation->seed;
    batch.t_end = 40.0;
    batch.dt = 1e-3;
    batch.box = cfg.simulation->batch_box;
    auto summaries = batch_simulate(cfg.family, sig, cfg.simulation->inputs, batch);
    int bad = 0;
    double worst_final = 0.0;
    for (const RunSummary& s : summaries) {
        if (s.diverged || s.aborted) ++bad;
        if (s.final_norm > 0.01 * s.initial_norm + 10.0) ++bad;
        worst_final = std::max(worst_final, s.final_norm);
    }
    if (bad > 0) {
        pass = false;
        detail += std::to_string(bad) + " runs out of envelope; ";
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > 60.0) {
        pass = false;
        detail += "took too long; ";
    }
    detail += "50 runs bounded, worst final norm " + format_double(worst_final) + ", " +
              std::to_string(sig.n_switches()) + " switches, " + format_double(elapsed) + " s";
    report(1, "two-mode reproduction", pass, detail);
}

// -----------------------------------------------------------------------
// 2. Coefficient-route arithmetic matches a brute-force grid evaluation of
//    the weighted sum to 1e-12 on 500 points over s in [0, 100], and the
//    check report states both the recomputed and the declared -1.725e-5
//    coefficient.
// -----------------------------------------------------------------------
void criterion2() {
    auto cfg = sec4_config();
    auto input = make_rate_condition_input(cfg.family, cfg.bounds);
    auto rep = check_condition_c1(input, cfg.certificate->rho, cfg.certificate->c1,
                                  cfg.certificate->grid);

    bool pass = true;
    std::string detail;
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double s = 100.0 * i / 499.0;
        double direct = 0.0;
        for (const WeightedRate& e : input.entries) direct += e.weight * e.rate(0.0, s);
        const double routed = rep.lhs_eval(s);
        const double err = std::abs(direct - routed);
        worst = std::max(worst, err);
        if (err > 1e-12 * std::max(1.0, std::abs(direct))) pass = false;
    }
    if (!pass) detail += "coefficient route disagrees with brute force; ";

    auto out = fresh_dir("c2");
    CommandOptions opts;
    {
        const fs::path cfg_path = out / "sec4_config.json";
        std::ofstream cfg_out(cfg_path);
        cfg_out << builtin::kSec4Config;
        opts.config_path = cfg_path.string();
    }
    opts.out_dir = out.string();
    const int code = cmd_check(opts);
    std::string text = read_text(out / "check_report.txt");
    if (code != 1) {
        pass = false;
        detail += "expected refusal exit 1; ";
    }
    if (!contains(text, "rate_condition.reference.declared.s^1.5: -1.725e-05") ||
        !contains(text, "rate_condition.reference.recomputed.s^1.5: 0.00155786") ||
        !contains(text, "rate_condition.reference.mismatch: true")) {
        pass = false;
        detail += "report missing declared/recomputed coefficient lines; ";
    }
    detail += "max route disagreement " + format_double(worst);
    report(2, "weighted-sum condition arithmetic", pass, detail);
}

// -----------------------------------------------------------------------
// 3. Summability: equispaced gaps d in {0.5, 1, 2}, (k1, k2) in
//    {(1, 0), (0.5, 1)}: partial sums up to t = 1e3 are nondecreasing,
//    converge with tail changes below 1e-9, and are dominated by the
//    affine tail bound; same for k1 s^(3/2) + k2 with the quadrature bound.
// -----------------------------------------------------------------------
void criterion3() {
    bool pass = true;
    std::string detail;
    double min_slack = 1e300;
    const double n0 = 1.0;  // equispaced placement needs a unit count offset

    for (double d : {0.5, 1.0, 2.0}) {
        std::vector<double> taus = {0.0};
        for (double tau = d; tau <= 1000.0 + 1e-9; tau += d) taus.push_back(tau);
        const std::vector<double> horizons(taus.begin() + 1, taus.end());
        for (auto [k1, k2] : {std::pair{1.0, 0.0}, std::pair{0.5, 1.0}}) {
            for (bool three_halves : {false, true}) {
                RateFunction rho = three_halves ? RateFunction::three_halves(k1, k2)
                                                : RateFunction::linear(k1, k2);
                auto sums = summability_partial_sums(rho, taus, horizons);
                for (std::size_t i = 1; i < sums.size(); ++i)
                    if (sums[i] < sums[i - 1] - 1e-15) pass = false;
                const std::size_t tail = sums.size() - sums.size() / 5;
                for (std::size_t i = std::max<std::size_t>(tail, 1); i < sums.size(); ++i)
                    if (std::abs(sums[i] - sums[i - 1]) >= 1e-9) pass = false;
                const double bound = three_halves ? three_halves_tail_bound(k1, k2, d, n0)
                                                  : affine_tail_bound(k1, k2, d, n0);
                const double max_sum = *std::max_element(sums.begin(), sums.end());
                min_slack = std::min(min_slack, bound - max_sum);
                if (!(bound - max_sum >= 0.0)) pass = false;
            }
        }
    }
    detail = "minimum bound slack " + format_double(min_slack);
    report(3, "summability convergence and tail bounds", pass, detail);
}

// -----------------------------------------------------------------------
// 4. psi1/psi2 hand cases match closed forms to 1e-12; the holding-time and
//    duration/count computations of psi1 agree to 1e-12 on 100 random
//    signals.
// -----------------------------------------------------------------------
void criterion4() {
    bool pass = true;
    std::string detail;
    auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };

    auto scalar = scalar_config().family;
    if (!close(compute_psi1(scalar, no_switch_signal(1), 2.0), std::exp(-2.0))) pass = false;
    if (!close(compute_psi2(scalar, no_switch_signal(1), 2.0), 1.0 - std::exp(-2.0))) pass = false;
    if (!close(compute_psi2(scalar, no_switch_signal(1), 60.0), 1.0)) pass = false;

    // Two ISS modes, mu_12 = 2, switch at 1, t = 2.
    auto cfg4 = sec4_config();
    SwitchedFamily fam = cfg4.family;
    fam.subsystems[0].lambda = 1.0;
    fam.subsystems[1].lambda = 1.0;
    fam.mu[{1, 2}] = 2.0;
    fam.mu[{2, 1}] = 1.0;
    SwitchingSignal one_switch;
    one_switch.taus = {0.0, 1.0};
    one_switch.modes = {1, 2};
    if (!close(compute_psi1(fam, one_switch, 2.0), 2.0 * std::exp(-2.0))) pass = false;

    // ISS then non-ISS: exp(-1 + 1 + ln mu_12).
    SwitchedFamily mixed = cfg4.family;
    mixed.subsystems[0].lambda = 1.0;
    mixed.subsystems[1].lambda = -1.0;
    mixed.mu[{1, 2}] = 3.0;
    if (!close(compute_psi1(mixed, one_switch, 2.0), 3.0)) pass = false;

    // Two equal ISS modes with mu = 1: psi2 equals the single-mode value.
    SwitchedFamily twin = cfg4.family;
    twin.subsystems[0].lambda = 1.0;
    twin.subsystems[1].lambda = 1.0;
    twin.subsystems[1].V = twin.subsystems[0].V;
    twin.mu[{1, 2}] = 1.0;
    twin.mu[{2, 1}] = 1.0;
    SwitchingSignal three;
    three.taus = {0.0, 0.7, 1.9, 2.4};
    three.modes = {1, 2, 1, 2};
    if (!close(compute_psi2(twin, three, 3.3), 1.0 - std::exp(-3.3))) pass = false;

    test_support::Rng rng(4242);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto sig = test_support::random_signal(rng, 2, 8, 0.05, 1.5);
        const double t = sig.taus.back() + rng.uniform(0.1, 2.0);
        const double a = compute_psi1(cfg4.family, sig, t);
        const double b = compute_psi1_durations(cfg4.family, sig, t);
        worst = std::max(worst, std::abs(a - b) / std::max({1.0, a, b}));
        if (!close(a, b)) pass = false;
    }
    detail = "dual psi1 routes, worst relative gap " + format_double(worst);
    report(4, "psi1/psi2 exactness", pass, detail);
}

// -----------------------------------------------------------------------
// 5. Integrator accuracy: |x(1) - e^{-1}| <= 1e-6 at dt = 1e-3 and observed
//    convergence order >= 3.5 across dt in {1e-2, 5e-3, 2.5e-3}.
// -----------------------------------------------------------------------
void criterion5() {
    auto fam = scalar_config().family;
    const std::vector<Expr> zero = {parse_expression("0")};
    const double x0[] = {1.0};
    auto err = [&](double dt) {
        auto traj = integrate(fam, no_switch_signal(1), zero, x0, 1.0, dt);
        return std::abs(traj.x.back() - std::exp(-1.0));
    };
    const double e_fine = err(1e-3);
    const double e1 = err(1e-2), e2 = err(5e-3), e3 = err(2.5e-3);
    const double order21 = std::log2(e1 / e2);
    const double order32 = std::log2(e2 / e3);
    const bool pass = e_fine <= 1e-6 && order21 >= 3.5 && order32 >= 3.5;
    report(5, "integrator accuracy and order", pass,
           "error " + format_double(e_fine) + ", orders " + format_double(order21) + " / " +
               format_double(order32));
}

// -----------------------------------------------------------------------
// 6. ADT embeddings: verdicts match the thresholds exactly for 10 random
//    uniform families, and the induced linear rates pass the weighted-sum
//    condition with c1 = 0 whenever the embedding holds.
// -----------------------------------------------------------------------
void criterion6() {
    bool pass = true;
    test_support::Rng rng(616);
    for (int i = 0; i < 10; ++i) {
        const double lambda_s = rng.uniform(0.5, 3.0);
        const double lambda_u = rng.uniform(0.5, 3.0);
        const double mu = rng.uniform(1.0, 4.0);
        const double rho_bar = rng.uniform(0.05, 0.95) * lambda_s / (lambda_s + lambda_u);
        const double threshold =
            std::log(mu) / (lambda_s * (1.0 - rho_bar) - lambda_u * rho_bar);
        const double tau_a = threshold > 0.0 ? threshold * rng.uniform(0.5, 1.5)
                                             : rng.uniform(0.1, 1.0);
        auto res = check_adt_mixed(lambda_s, lambda_u, mu, rho_bar, tau_a);
        if (res.threshold != threshold) pass = false;
        if (res.holds != (tau_a > threshold)) pass = false;
        if (res.holds && !(res.rate_condition && res.rate_condition->pass())) pass = false;
    }
    for (int i = 0; i < 10; ++i) {
        const double lambda0 = rng.uniform(0.5, 3.0);
        const double mu = rng.uniform(1.0, 4.0);
        const double threshold = std::log(mu) / lambda0;
        auto at = [&](double tau_a) { return check_adt_all_iss(lambda0, mu, tau_a); };
        if (at(threshold > 0.0 ? threshold : 1e-9).holds != (threshold <= 0.0)) pass = false;
        auto above = at(threshold > 0.0 ? threshold * 1.01 : 1e-6);
        if (!above.holds || above.threshold != threshold) pass = false;
        if (!(above.rate_condition && above.rate_condition->pass())) pass = false;
        if (threshold > 0.0 && at(threshold * 0.99).holds) pass = false;
    }
    report(6, "average-dwell-time embeddings", pass, "20 random families");
}

// -----------------------------------------------------------------------
// 7. Certified-envelope soundness for the scalar linear family: zero
//    violations over 20 seeded runs with v = 1 and x0 in [-100, 100].
// -----------------------------------------------------------------------
void criterion7() {
    auto cfg = scalar_config();
    std::vector<SwitchingSignal> sigs = {no_switch_signal(1)};
    auto outcome = assemble_certificate(cfg.family, cfg.bounds, cfg.certificate->rho,
                                        cfg.certificate->c1, cfg.certificate->horizons, sigs,
                                        cfg.certificate->grid);
    if (!outcome.issued()) {
        report(7, "certified-envelope soundness", false, "certificate refused");
        return;
    }
    long violations = 0;
    long points = 0;
    BatchOptions batch;
    batch.n_runs = 20;
    batch.seed = cfg.simulation->seed;
    batch.t_end = cfg.simulation->t_end;
    batch.dt = cfg.simulation->dt;
    batch.box = cfg.simulation->batch_box;
    auto sink = [&](const Trajectory& traj, const RunSummary&) {
        auto rep = check_envelope(traj, *outcome.certificate, traj.input_sup_norm());
        violations += rep.violations;
        points += rep.points;
    };
    batch_simulate(cfg.family, no_switch_signal(1), cfg.simulation->inputs, batch, sink);
    report(7, "certified-envelope soundness", violations == 0,
           std::to_string(points) + " grid points, " + std::to_string(violations) +
               " violations");
}

// -----------------------------------------------------------------------
// 8. Property suite, 1000 seeded instances each: partition identity, count
//    identity, duration additivity, generator/checker round trips,
//    parse/print round trips, derivative vs finite differences.
// -----------------------------------------------------------------------
void criterion8() {
    bool pass = true;
    std::string failed;

    {  // partition + count + additivity (1000 each over the same draws)
        test_support::Rng rng(88);
        int bad_partition = 0, bad_count = 0, bad_additivity = 0;
        for (int i = 0; i < 1000; ++i) {
            auto sig = test_support::random_signal(rng);
            const double t_max = sig.taus.back() + 2.0;
            double s = rng.uniform(0.0, t_max - 0.2);
            double t = rng.uniform(s + 0.02, t_max);
            double u = rng.uniform(s + 0.01, t - 0.01);

            double total = 0.0;
            for (int mode = 1; mode <= 3; ++mode) total += activation_duration(sig, mode, s, t);
            if (std::abs(total - (t - s)) > 1e-12 * std::max(1.0, t - s)) ++bad_partition;

            int by_pair = 0;
            for (int a = 1; a <= 3; ++a)
                for (int b = 1; b <= 3; ++b)
                    if (a != b) by_pair += switch_count(sig, a, b, 0.0, t);
            if (by_pair != total_switch_count(sig, 0.0, t)) ++bad_count;

            for (int mode = 1; mode <= 3; ++mode) {
                const double lhs = activation_duration(sig, mode, s, u) +
                                   activation_duration(sig, mode, u, t);
                if (std::abs(lhs - activation_duration(sig, mode, s, t)) > 1e-12)
                    ++bad_additivity;
            }
        }
        if (bad_partition || bad_count || bad_additivity) {
            pass = false;
            failed += "identities; ";
        }
    }

    {  // generator/checker round trips
        test_support::Rng rng(99);
        int bad = 0;
        for (int i = 0; i < 500; ++i) {  // dwell-time generator
            const double tau_a = rng.uniform(0.3, 2.0);
            const double n0 = 1.0 + static_cast<double>(rng.next() % 2);
            const double t = rng.uniform(5.0, 15.0);
            const double jitter = rng.uniform(0.0, 0.5);
            auto sig = generate_adt_signal(tau_a, n0, t, {1, 2}, rng.next(), jitter);
            if (!check_adt_property(sig, tau_a, n0, t, t / 100.0)) ++bad;
        }
        for (int i = 0; i < 250; ++i) {  // worst-case placement
            RateBoundSet b;
            const double slope = rng.uniform(0.3, 1.5);
            b.switching[{1, 2}] = {RateFunction::linear(slope / 2.0), 1.0};
            b.switching[{2, 1}] = {RateFunction::linear(slope / 2.0), 1.0};
            const double t = rng.uniform(5.0, 12.0);
            WorstCaseOptions opts;
            opts.mode_cycle = {1, 2};
            opts.verify_grid_step = 0.2;
            try {
                auto sig = generate_worst_case_signal(b, t, opts);
                if (!check_signal_bounds(sig, b, t, 0.2).pass) ++bad;
            } catch (const GenerationError&) {
                ++bad;
            }
        }
        for (int i = 0; i < 250; ++i) {  // periodic-excursion generator
            RateBoundSet b;
            b.iss[1] = {RateFunction::linear(rng.uniform(0.05, 0.3)), rng.uniform(0.1, 1.0)};
            b.non_iss[2] = {RateFunction::linear(0.1), rng.uniform(1.0, 3.0)};
            b.switching[{1, 2}] = {RateFunction::linear(rng.uniform(0.2, 0.5)), 1.0};
            b.switching[{2, 1}] = {RateFunction::linear(rng.uniform(0.2, 0.5)), 1.0};
            AdmissibleOptions opts;
            opts.mode_cycle = {1, 2};
            opts.grid_step = 0.2;
            try {
                auto sig = generate_admissible_signal(b, 20.0, opts);
                if (!check_signal_bounds(sig, b, 20.0, 0.2).pass) ++bad;
            } catch (const GenerationError&) {
                ++bad;
            }
        }
        if (bad) {
            pass = false;
            failed += "generator round trips (" + std::to_string(bad) + "); ";
        }
    }

    {  // parse/print round trips
        test_support::Rng rng(111);
        int done = 0, bad = 0;
        while (done < 1000) {
            auto inst = test_support::random_expr_instance(rng);
            if (!inst) continue;
            auto [expr, bindings, var] = *inst;
            try {
                Expr reparsed = parse_expression(expr.to_string());
                const double a = expr.evaluate(bindings);
                const double b = reparsed.evaluate(bindings);
                if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) ++bad;
            } catch (const ExprError&) {
                ++bad;
            }
            ++done;
        }
        if (bad) {
            pass = false;
            failed += "parse/print (" + std::to_string(bad) + "); ";
        }
    }

    {  // derivative vs central differences
        test_support::Rng rng(121);
        int done = 0, bad = 0;
        while (done < 1000) {
            auto inst = test_support::random_expr_instance(rng);
            if (!inst) continue;
            auto [expr, bindings, var] = *inst;
            double exact = 0.0, fd = 0.0;
            if (!test_support::fd_check(expr, bindings, var, exact, fd)) continue;
            if (std::abs(exact - fd) > 1e-5 * std::max({1.0, std::abs(exact), std::abs(fd)}))
                ++bad;
            ++done;
        }
        if (bad) {
            pass = false;
            failed += "derivative vs finite differences (" + std::to_string(bad) + "); ";
        }
    }

    report(8, "property suite (1000 seeded instances each)", pass,
           pass ? "identities, round trips, derivatives" : failed);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 8 criteria passed\n");
    return 0;
}
