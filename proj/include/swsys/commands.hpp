#pragma once

// =============================================================================
// Command workflows behind the CLI: check, simulate, generate, and the
// bundled two-mode reproduction. Each command loads a config, runs the
// pipeline, writes report/CSV artifacts into the output directory, and
// returns the process exit code.
//
// Exit codes (stable contract):
//   0  success / certificate issued
//   1  checked-and-refused, generation infeasible, or divergence
//   2  invalid input (configuration errors)
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swsys/builtin_configs.hpp"
#include "swsys/certificate.hpp"
#include "swsys/config.hpp"
#include "swsys/csv.hpp"
#include "swsys/report.hpp"
#include "swsys/sim.hpp"

namespace swsys {

struct CommandOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;  // overrides config seeds
    bool allow_divergence = false;
};

namespace detail_cmd {

namespace fs = std::filesystem;

inline void ensure_out_dir(const CommandOptions& opts) {
    fs::create_directories(opts.out_dir);
}

inline int config_failure(const CommandOptions& opts, const ConfigError& e,
                          const std::string& report_name) {
    ensure_out_dir(opts);
    Report rep;
    rep.kv("status", "invalid-config");
    for (const std::string& msg : e.errors()) rep.line("error: " + msg);
    rep.write(fs::path(opts.out_dir) / report_name);
    std::cerr << e.what() << "\n";
    return 2;
}

/// Horizon on which signal-side checks run.
inline double signal_horizon(const ProjectConfig& cfg) {
    if (cfg.signal && cfg.signal->t_end > 0.0) return cfg.signal->t_end;
    if (cfg.simulation) return cfg.simulation->t_end;
    if (cfg.signal && cfg.signal->kind == SignalSpec::Kind::Inline)
        return std::max(10.0, cfg.signal->inline_signal.taus.back() * 1.5);
    return 10.0;
}

/// Builds the concrete signal named by the config's signal block.
inline SwitchingSignal materialize_signal(const ProjectConfig& cfg,
                                          const std::optional<std::uint64_t>& seed_override) {
    if (!cfg.signal) throw SignalError("config has no signal block");
    const SignalSpec& spec = *cfg.signal;
    const double horizon = signal_horizon(cfg);
    switch (spec.kind) {
        case SignalSpec::Kind::Inline:
            return spec.inline_signal;
        case SignalSpec::Kind::Admissible: {
            AdmissibleOptions opts;
            opts.mode_cycle = spec.mode_cycle;
            opts.grid_step = spec.check_grid_step;
            return generate_admissible_signal(cfg.bounds, horizon, opts);
        }
        case SignalSpec::Kind::WorstCase: {
            WorstCaseOptions opts;
            opts.mode_cycle = spec.mode_cycle;
            opts.place_offset_switches = spec.offset_switches;
            opts.verify_grid_step = spec.check_grid_step;
            return generate_worst_case_signal(cfg.bounds, horizon, opts);
        }
        case SignalSpec::Kind::Adt: {
            const std::uint64_t seed = seed_override.value_or(spec.seed);
            auto sig = generate_adt_signal(spec.tau_a, spec.n0, horizon, spec.mode_cycle, seed,
                                           spec.jitter);
            if (!check_adt_property(sig, spec.tau_a, spec.n0, horizon, spec.check_grid_step))
                throw GenerationError("generated signal failed the dwell-time recheck");
            return sig;
        }
    }
    throw SignalError("unreachable");
}

inline std::string power_key(double p) { return "s^" + format_double(p); }

inline void write_family_section(Report& rep, const ProjectConfig& cfg) {
    const SwitchedFamily& fam = cfg.family;
    rep.section("family");
    rep.kv("family.modes", fam.n_modes());
    auto part = partition_modes(fam);
    std::string iss, non_iss;
    for (int m : part.iss) iss += (iss.empty() ? "" : " ") + std::to_string(m);
    for (int m : part.non_iss) non_iss += (non_iss.empty() ? "" : " ") + std::to_string(m);
    rep.kv("family.iss_modes", iss.empty() ? "-" : iss);
    rep.kv("family.non_iss_modes", non_iss.empty() ? "-" : non_iss);

    bool all_pass = true;
    for (const SubsystemSpec& sub : fam.subsystems) {
        const std::string key = "family.mode" + std::to_string(sub.index);
        auto sandwich = check_lyapunov_sandwich(fam, sub.index, cfg.checks.state_box,
                                                cfg.checks.n_samples, cfg.checks.seed);
        rep.kv(key + ".sandwich", sandwich.pass ? "pass" : "violated");
        rep.kv(key + ".sandwich.samples", sandwich.samples_checked);
        if (!sandwich.pass) rep.kv(key + ".sandwich.violations", sandwich.violation_count);

        auto decay = check_lyapunov_decay(fam, sub.index, cfg.checks.state_box,
                                          cfg.checks.input_box, cfg.checks.n_samples,
                                          cfg.checks.seed);
        rep.kv(key + ".decay", decay.pass ? "pass" : "violated");
        rep.kv(key + ".decay.worst_margin", decay.worst_margin);
        if (!decay.pass) {
            rep.kv(key + ".decay.violations", decay.violation_count);
            if (!decay.violations.empty()) {
                std::string at;
                for (double x : decay.violations.front().state)
                    at += (at.empty() ? "" : ", ") + format_double(x);
                rep.kv(key + ".decay.first_violation_state", "(" + at + ")");
                rep.kv(key + ".decay.first_violation_lhs", decay.violations.front().lhs);
                rep.kv(key + ".decay.first_violation_bound", decay.violations.front().bound);
            }
        }
        all_pass = all_pass && sandwich.pass && decay.pass;
    }
    for (const auto& [pair, mu_value] : fam.mu) {
        const std::string key = "family.mu_" + std::to_string(pair.first) + "_" +
                                std::to_string(pair.second);
        auto mu_rep = check_mu_compatibility(fam, pair.first, pair.second, cfg.checks.state_box,
                                             cfg.checks.n_samples, cfg.checks.seed);
        rep.kv(key, mu_rep.pass ? "pass" : "violated");
        rep.kv(key + ".declared", mu_value);
        rep.kv(key + ".sampled_max_ratio", mu_rep.mu_hat);
        all_pass = all_pass && mu_rep.pass;
    }
    auto gamma_rep = check_gamma_candidacy(fam);
    rep.kv("family.gamma.zero_at_zero", gamma_rep.zero_at_zero);
    rep.kv("family.gamma.strictly_increasing", gamma_rep.increasing);
    rep.kv("family.assumptions", all_pass ? "verified-at-samples" : "unverified");
}

inline void write_signal_section(Report& rep, const ProjectConfig& cfg,
                                 const SwitchingSignal& sig, double horizon) {
    rep.section("signal");
    rep.kv("signal.switches", sig.n_switches());
    rep.kv("signal.last_switch", sig.taus.back());
    rep.kv("signal.initial_mode", sig.initial_mode());
    const double step = cfg.signal ? cfg.signal->check_grid_step : 0.01;
    auto bounds_rep = check_signal_bounds(sig, cfg.bounds, horizon, step);
    rep.kv("signal.bounds", bounds_rep.pass ? "pass" : "violated");
    rep.kv("signal.bounds.horizon", horizon);
    rep.kv("signal.bounds.grid_step", step);
    rep.kv("signal.bounds.intervals_checked", bounds_rep.intervals_checked);
    rep.kv("signal.bounds.worst_slack", bounds_rep.worst_slack);
    if (bounds_rep.first_violation)
        rep.kv("signal.bounds.first_violation", bounds_rep.first_violation->describe());
}

inline void write_rate_condition_section(Report& rep, const CertificateSpec& spec,
                                      const RateConditionReport& cond) {
    rep.section("rate_condition");
    for (auto [p, c] : cond.lhs_coefficients) rep.kv("rate_condition.lhs." + power_key(p), c);
    rep.kv("rate_condition.lhs.constant", cond.lhs_constant);
    for (auto [p, c] : cond.combined_coefficients)
        rep.kv("rate_condition.combined." + power_key(p), c);
    rep.kv("rate_condition.combined.constant", cond.combined_constant);
    rep.kv("rate_condition.termwise", cond.termwise_pass ? "pass" : "violated");
    rep.kv("rate_condition.grid", cond.grid_pass ? "pass" : "violated");
    rep.kv("rate_condition.grid.worst_slack", cond.worst_slack);
    rep.kv("rate_condition.grid.worst_s", cond.worst_s);

    if (!spec.reference_lhs_terms.empty()) {
        bool mismatch = false;
        for (const RateTerm& term : spec.reference_lhs_terms) {
            const std::string key = power_key(term.power);
            rep.kv("rate_condition.reference.declared." + key, term.coef);
            auto it = cond.lhs_coefficients.find(term.power);
            const double recomputed = it == cond.lhs_coefficients.end() ? 0.0 : it->second;
            rep.kv("rate_condition.reference.recomputed." + key, recomputed);
            if (std::abs(recomputed - term.coef) >
                1e-12 * std::max({1.0, std::abs(recomputed), std::abs(term.coef)}))
                mismatch = true;
        }
        rep.kv("rate_condition.reference.mismatch", mismatch);
        if (mismatch)
            rep.line("note: recomputed left-side coefficients disagree with the declared "
                     "reference values; the recomputed arithmetic is authoritative here");
    }
}

inline void write_certificate_section(Report& rep, const CertificateOutcome& outcome) {
    rep.section("summability");
    for (std::size_t i = 0; i < outcome.summability.size(); ++i) {
        const std::string key = "summability.signal" + std::to_string(i);
        rep.kv(key + ".stabilized", outcome.summability[i].stabilized);
        rep.kv(key + ".c2", outcome.summability[i].c2_estimate);
        rep.kv(key + ".max_tail_change", outcome.summability[i].max_tail_change);
    }
    rep.section("certificate");
    if (outcome.issued()) {
        const ISSCertificate& cert = *outcome.certificate;
        rep.kv("certificate", "issued");
        rep.kv("certificate.c", cert.c);
        rep.kv("certificate.c1", cert.c1);
        rep.kv("certificate.c2", cert.c2);
        rep.kv("certificate.psi_bar2", cert.psi_bar2);
        rep.kv("certificate.beta",
               "alpha_upper(r) * exp(c + c1 - rho(0, s)) with alpha_upper(r) = " +
                   format_double(cert.alpha_upper.coef) + "*r^" +
                   format_double(cert.alpha_upper.power));
        rep.kv("certificate.chi", "gamma(r) * psi_bar2");
    } else {
        rep.kv("certificate", "refused");
        rep.kv("refusal.condition", outcome.refusal->condition);
        rep.kv("refusal.witness", outcome.refusal->witness);
        rep.kv("certificate.c", outcome.c);
        rep.kv("certificate.c2_estimate", outcome.c2);
        rep.kv("certificate.psi_bar2_estimate", outcome.psi_bar2);
    }
}

}  // namespace detail_cmd

/// check: family sampled checks, signal bound checks, certificate assembly.
/// Exit 0 iff a certificate is issued; the report is always written.
inline int cmd_check(const CommandOptions& opts) {
    namespace fs = std::filesystem;
    detail_cmd::ensure_out_dir(opts);
    ProjectConfig cfg;
    try {
        cfg = load_config(opts.config_path);
    } catch (const ConfigError& e) {
        return detail_cmd::config_failure(opts, e, "check_report.txt");
    }
    Report rep;
    rep.kv("command", "check");
    rep.kv("config", opts.config_path);

    if (!cfg.certificate) {
        rep.kv("status", "invalid-config");
        rep.line("error: certificate: block required by the check command");
        rep.write(fs::path(opts.out_dir) / "check_report.txt");
        std::cerr << "check requires a certificate block\n";
        return 2;
    }
    if (!cfg.signal) {
        rep.kv("status", "invalid-config");
        rep.line("error: signal: block required by the check command");
        rep.write(fs::path(opts.out_dir) / "check_report.txt");
        std::cerr << "check requires a signal block\n";
        return 2;
    }

    detail_cmd::write_family_section(rep, cfg);

    SwitchingSignal sig;
    try {
        sig = detail_cmd::materialize_signal(cfg, opts.seed);
    } catch (const SignalError& e) {
        rep.section("signal");
        rep.kv("signal", "generation-failed");
        rep.kv("signal.error", e.what());
        rep.kv("status", "refused");
        rep.write(fs::path(opts.out_dir) / "check_report.txt");
        std::cerr << "signal generation failed: " << e.what() << "\n";
        return 1;
    }
    const double horizon = detail_cmd::signal_horizon(cfg);
    detail_cmd::write_signal_section(rep, cfg, sig, horizon);

    const CertificateSpec& spec = *cfg.certificate;
    std::vector<SwitchingSignal> signals = {sig};
    auto outcome = assemble_certificate(cfg.family, cfg.bounds, spec.rho, spec.c1, spec.horizons,
                                        signals, spec.grid);
    detail_cmd::write_rate_condition_section(rep, spec, outcome.rate_condition);
    detail_cmd::write_certificate_section(rep, outcome);
    rep.kv("status", outcome.issued() ? "certified" : "refused");
    rep.write(fs::path(opts.out_dir) / "check_report.txt");
    return outcome.issued() ? 0 : 1;
}

/// generate: materialize the configured signal, verify it against the bound
/// set (round trip through the CSV codec included), and write signal.csv.
inline int cmd_generate(const CommandOptions& opts) {
    namespace fs = std::filesystem;
    detail_cmd::ensure_out_dir(opts);
    ProjectConfig cfg;
    try {
        cfg = load_config(opts.config_path);
    } catch (const ConfigError& e) {
        return detail_cmd::config_failure(opts, e, "generate_report.txt");
    }
    Report rep;
    rep.kv("command", "generate");
    rep.kv("config", opts.config_path);
    if (!cfg.signal) {
        rep.kv("status", "invalid-config");
        rep.line("error: signal: block required by the generate command");
        rep.write(fs::path(opts.out_dir) / "generate_report.txt");
        std::cerr << "generate requires a signal block\n";
        return 2;
    }
    SwitchingSignal sig;
    try {
        sig = detail_cmd::materialize_signal(cfg, opts.seed);
    } catch (const SignalError& e) {
        rep.kv("status", "generation-failed");
        rep.kv("error", e.what());
        rep.write(fs::path(opts.out_dir) / "generate_report.txt");
        std::cerr << "signal generation failed: " << e.what() << "\n";
        return 1;
    }
    const double horizon = detail_cmd::signal_horizon(cfg);
    detail_cmd::write_signal_section(rep, cfg, sig, horizon);

    // Round trip through the codec before writing anything.
    const std::string text = signal_to_csv(sig);
    SwitchingSignal reparsed = signal_from_csv(text);
    if (signal_to_csv(reparsed) != text) {
        rep.kv("status", "round-trip-failed");
        rep.write(fs::path(opts.out_dir) / "generate_report.txt");
        std::cerr << "signal CSV round trip failed\n";
        return 1;
    }
    const double step = cfg.signal->check_grid_step;
    auto bounds_rep = check_signal_bounds(reparsed, cfg.bounds, horizon, step);
    if (!bounds_rep.pass) {
        rep.kv("status", "bounds-violated");
        rep.kv("error", bounds_rep.first_violation->describe());
        rep.write(fs::path(opts.out_dir) / "generate_report.txt");
        std::cerr << "generated signal violates its bounds: "
                  << bounds_rep.first_violation->describe() << "\n";
        return 1;
    }

    std::ofstream out(fs::path(opts.out_dir) / "signal.csv");
    out << text;
    rep.kv("status", "generated");
    rep.kv("output", (fs::path(opts.out_dir) / "signal.csv").string());
    rep.write(fs::path(opts.out_dir) / "generate_report.txt");
    return 0;
}

/// simulate: seeded batch over the initial-condition box, per-run CSVs when
/// configured, envelope/cascade checks when a certificate is available.
/// Exit 1 when any run diverges and divergence is not explicitly allowed.
inline int cmd_simulate(const CommandOptions& opts) {
    namespace fs = std::filesystem;
    detail_cmd::ensure_out_dir(opts);
    ProjectConfig cfg;
    try {
        cfg = load_config(opts.config_path);
    } catch (const ConfigError& e) {
        return detail_cmd::config_failure(opts, e, "simulate_report.txt");
    }
    Report rep;
    rep.kv("command", "simulate");
    rep.kv("config", opts.config_path);
    if (!cfg.simulation || !cfg.signal) {
        rep.kv("status", "invalid-config");
        rep.line("error: simulation and signal blocks are required by the simulate command");
        rep.write(fs::path(opts.out_dir) / "simulate_report.txt");
        std::cerr << "simulate requires simulation and signal blocks\n";
        return 2;
    }
    const SimulationSpec& sim = *cfg.simulation;

    SwitchingSignal sig;
    try {
        sig = detail_cmd::materialize_signal(cfg, opts.seed);
    } catch (const SignalError& e) {
        rep.kv("status", "generation-failed");
        rep.kv("error", e.what());
        rep.write(fs::path(opts.out_dir) / "simulate_report.txt");
        std::cerr << "signal generation failed: " << e.what() << "\n";
        return 1;
    }

    // Certificate, when the config carries the block; refusal just disables
    // the envelope checks.
    std::optional<ISSCertificate> cert;
    if (cfg.certificate) {
        std::vector<SwitchingSignal> signals = {sig};
        auto outcome = assemble_certificate(cfg.family, cfg.bounds, cfg.certificate->rho,
                                            cfg.certificate->c1, cfg.certificate->horizons,
                                            signals, cfg.certificate->grid);
        if (outcome.issued()) cert = outcome.certificate;
        rep.kv("certificate", outcome.issued() ? "issued" : "refused");
        if (!outcome.issued()) rep.kv("certificate.refusal", outcome.refusal->condition);
    }

    BatchOptions batch;
    batch.n_runs = sim.n_runs;
    batch.seed = opts.seed.value_or(sim.seed);
    batch.t_end = sim.t_end;
    batch.dt = sim.dt;
    if (sim.x0) {
        batch.box.ranges.clear();
        for (double v : *sim.x0) batch.box.ranges.push_back({v, v});
    } else {
        batch.box = sim.batch_box;
    }

    long envelope_violations = 0, cascade_violations = 0;
    long envelope_runs = 0;
    bool cascade_assumptions = true;
    auto sink = [&](const Trajectory& traj, const RunSummary& summary) {
        if (sim.write_trajectories) {
            std::ostringstream name;
            name << "run_" << summary.run << ".csv";
            write_trajectory_csv(fs::path(opts.out_dir) / name.str(), traj);
        }
        if (cert && !traj.diverged && !traj.aborted) {
            const double v_sup = traj.input_sup_norm();
            auto env = check_envelope(traj, *cert, v_sup);
            envelope_violations += env.violations;
            ++envelope_runs;
            auto casc = check_cascade(traj, cfg.family, sig, cfg.family.gamma_at(v_sup));
            cascade_assumptions = cascade_assumptions && casc.assumptions_verified;
            if (casc.assumptions_verified) cascade_violations += casc.violations;
        }
    };
    auto summaries = batch_simulate(cfg.family, sig, sim.inputs, batch, sink);

    // Summary CSV.
    {
        std::ofstream out(fs::path(opts.out_dir) / "summary.csv");
        out << "run";
        for (int i = 1; i <= cfg.family.state_dim; ++i) out << ",x0_" << i;
        out << ",initial_norm,sup_norm,final_norm,diverged\n";
        for (const RunSummary& s : summaries) {
            out << s.run;
            for (double v : s.x0) out << "," << format_double(v);
            out << "," << format_double(s.initial_norm) << "," << format_double(s.sup_norm) << ","
                << format_double(s.final_norm) << "," << (s.diverged ? 1 : 0) << "\n";
        }
    }

    long diverged = 0;
    double max_final = 0.0, max_sup = 0.0;
    for (const RunSummary& s : summaries) {
        if (s.diverged || s.aborted) ++diverged;
        max_final = std::max(max_final, s.final_norm);
        max_sup = std::max(max_sup, s.sup_norm);
    }
    rep.section("batch");
    rep.kv("batch.runs", static_cast<long>(summaries.size()));
    rep.kv("batch.seed", static_cast<long>(batch.seed));
    rep.kv("batch.diverged", diverged);
    rep.kv("batch.max_sup_norm", max_sup);
    rep.kv("batch.max_final_norm", max_final);
    if (cert) {
        rep.section("envelope");
        rep.kv("envelope.runs_checked", envelope_runs);
        rep.kv("envelope.violations", envelope_violations);
        rep.kv("cascade.assumptions_verified", cascade_assumptions);
        if (cascade_assumptions)
            rep.kv("cascade.violations", cascade_violations);
        else
            rep.kv("cascade", "assumption-unverified; no pass/fail claim");
    }
    const bool fail = diverged > 0 && !opts.allow_divergence;
    rep.kv("status", fail ? "diverged" : "completed");
    rep.write(fs::path(opts.out_dir) / "simulate_report.txt");
    return fail ? 1 : 0;
}

/// reproduce-sec4: writes the embedded two-mode study config, then runs
/// generate, check and simulate on it. The check step's refusal (recomputed
/// inequality arithmetic) is the documented expected outcome and does not
/// fail the reproduction; generation failure or divergence does.
inline int cmd_reproduce_sec4(const CommandOptions& opts) {
    namespace fs = std::filesystem;
    detail_cmd::ensure_out_dir(opts);
    CommandOptions sub = opts;
    if (sub.config_path.empty()) {
        const fs::path path = fs::path(opts.out_dir) / "sec4_config.json";
        std::ofstream out(path);
        out << builtin::kSec4Config;
        sub.config_path = path.string();
    }
    const int gen = cmd_generate(sub);
    if (gen != 0) return gen;
    const int check = cmd_check(sub);
    if (check == 2) return 2;
    const int simulate = cmd_simulate(sub);
    if (simulate != 0) return simulate;

    Report rep;
    rep.kv("command", "reproduce-sec4");
    rep.kv("config", sub.config_path);
    rep.kv("generate", "ok");
    rep.kv("check", check == 0 ? "certified" : "refused (see check_report.txt)");
    rep.kv("simulate", "ok");
    rep.kv("status", "completed");
    rep.write(fs::path(opts.out_dir) / "reproduce_report.txt");
    return 0;
}

}  // namespace swsys
