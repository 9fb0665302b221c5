#pragma once

// =============================================================================
// Trajectory simulation: classical RK4 with fixed step and switch-aligned
// stepping, seeded batch runs, and along-trajectory checks of the certified
// envelope and the Lyapunov cascade bound.
// =============================================================================
// Between switching instants the vector fields are smooth, so piecewise
// classical solutions realize the Caratheodory solution of the switched
// system; no step ever straddles a switching instant. Inputs are expression
// functions of t only; their essential sup norm is taken over the trajectory
// grid.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swsys/certificate.hpp"
#include "swsys/expr.hpp"
#include "swsys/family.hpp"
#include "swsys/signal.hpp"

namespace swsys {

class SimulationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    int state_dim = 0;
    int input_dim = 0;
    std::vector<double> t;
    std::vector<int> mode;        // sigma(t_k), right-continuous
    std::vector<double> x;        // row-major, [k * state_dim + i]
    std::vector<double> v;        // row-major, [k * input_dim + j]
    std::vector<double> norm_x;
    bool diverged = false;
    bool aborted = false;
    double abort_time = 0.0;
    std::string abort_reason;

    std::size_t size() const { return t.size(); }

    std::span<const double> state(std::size_t k) const {
        return {x.data() + k * static_cast<std::size_t>(state_dim),
                static_cast<std::size_t>(state_dim)};
    }
    std::span<const double> input(std::size_t k) const {
        return {v.data() + k * static_cast<std::size_t>(input_dim),
                static_cast<std::size_t>(input_dim)};
    }

    double sup_norm() const {
        double m = 0.0;
        for (double n : norm_x) m = std::max(m, n);
        return m;
    }
    double final_norm() const { return norm_x.empty() ? 0.0 : norm_x.back(); }

    /// Essential sup of |v| over the grid up to and including t_end.
    double input_sup_norm() const {
        double m = 0.0;
        for (std::size_t k = 0; k < size(); ++k) {
            double s = 0.0;
            for (double value : input(k)) s += value * value;
            m = std::max(m, std::sqrt(s));
        }
        return m;
    }
};

inline constexpr double kDivergenceThreshold = 1e12;

namespace detail_sim {

struct CompiledField {
    std::vector<CompiledExpr> components;  // over slots [x1..xd, v1..vm]
};

inline std::vector<std::string> state_input_order(int d, int m) {
    std::vector<std::string> order;
    for (int i = 1; i <= d; ++i) order.push_back("x" + std::to_string(i));
    for (int j = 1; j <= m; ++j) order.push_back("v" + std::to_string(j));
    return order;
}

}  // namespace detail_sim

/// Integrates the switched system from x0 over [0, t_end]. Fixed-step RK4;
/// the step is shortened to land exactly on every switching instant, and the
/// mode active on ]tau_i, tau_{i+1}] is modes[i]. Aborts with a divergence
/// flag when |x| exceeds 1e12 and with an abort record on a non-finite
/// derivative (expression domain error).
inline Trajectory integrate(const SwitchedFamily& fam, const SwitchingSignal& sig,
                            const std::vector<Expr>& input, std::span<const double> x0,
                            double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw SimulationError("t_end and dt must be positive");
    if (static_cast<int>(x0.size()) != fam.state_dim)
        throw SimulationError("x0 dimension mismatch");
    if (static_cast<int>(input.size()) != fam.input_dim)
        throw SimulationError("input expression count must match input_dim");
    sig.validate_transitions(fam.transitions);

    const int d = fam.state_dim;
    const int m = fam.input_dim;
    const auto order = detail_sim::state_input_order(d, m);
    std::vector<detail_sim::CompiledField> fields(static_cast<std::size_t>(fam.n_modes()));
    for (const SubsystemSpec& s : fam.subsystems) {
        auto& field = fields[static_cast<std::size_t>(s.index - 1)];
        for (const Expr& component : s.f) field.components.emplace_back(component, order);
    }
    const std::vector<std::string> time_order = {"t"};
    std::vector<CompiledExpr> input_fns;
    for (const Expr& e : input) input_fns.emplace_back(e, time_order);

    Trajectory traj;
    traj.state_dim = d;
    traj.input_dim = m;

    std::vector<double> state(x0.begin(), x0.end());
    std::vector<double> slots(static_cast<std::size_t>(d + m), 0.0);
    std::vector<double> k1(d), k2(d), k3(d), k4(d), scratch(d);
    std::vector<double> v_lo(m), v_mid(m), v_hi(m);

    auto eval_inputs = [&](double time, std::vector<double>& out) {
        const double tv[1] = {time};
        for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(j)] = input_fns[static_cast<std::size_t>(j)](tv);
    };
    auto deriv = [&](const detail_sim::CompiledField& field, const std::vector<double>& xs,
                     const std::vector<double>& vs, std::vector<double>& out) {
        for (int i = 0; i < d; ++i) slots[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)];
        for (int j = 0; j < m; ++j) slots[static_cast<std::size_t>(d + j)] = vs[static_cast<std::size_t>(j)];
        for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] = field.components[static_cast<std::size_t>(i)](slots);
    };
    auto norm = [&](const std::vector<double>& xs) {
        double s = 0.0;
        for (double value : xs) s += value * value;
        return std::sqrt(s);
    };
    auto record = [&](double time) {
        traj.t.push_back(time);
        traj.mode.push_back(sig.mode_at(time));
        traj.x.insert(traj.x.end(), state.begin(), state.end());
        eval_inputs(time, v_lo);
        traj.v.insert(traj.v.end(), v_lo.begin(), v_lo.end());
        traj.norm_x.push_back(norm(state));
    };

    record(0.0);

    // Segment endpoints: switching instants in ]0, t_end[ plus t_end.
    std::vector<double> endpoints;
    for (double tau : sig.taus)
        if (tau > 0.0 && tau < t_end) endpoints.push_back(tau);
    endpoints.push_back(t_end);

    double seg_start = 0.0;
    for (double seg_end : endpoints) {
        const auto& field = fields[static_cast<std::size_t>(sig.mode_at(seg_start) - 1)];
        const double span = seg_end - seg_start;
        const long full_steps = static_cast<long>(std::floor(span / dt + 1e-9));
        long step_index = 0;
        double t_cur = seg_start;
        while (t_cur < seg_end - 1e-15) {
            double t_next = step_index < full_steps ? seg_start + (step_index + 1) * dt : seg_end;
            if (t_next > seg_end) t_next = seg_end;
            const double h = t_next - t_cur;
            if (h <= 0.0) break;

            eval_inputs(t_cur, v_lo);
            eval_inputs(t_cur + 0.5 * h, v_mid);
            eval_inputs(t_next, v_hi);

            deriv(field, state, v_lo, k1);
            for (int i = 0; i < d; ++i) scratch[i] = state[i] + 0.5 * h * k1[i];
            deriv(field, scratch, v_mid, k2);
            for (int i = 0; i < d; ++i) scratch[i] = state[i] + 0.5 * h * k2[i];
            deriv(field, scratch, v_mid, k3);
            for (int i = 0; i < d; ++i) scratch[i] = state[i] + h * k3[i];
            deriv(field, scratch, v_hi, k4);
            for (int i = 0; i < d; ++i)
                state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

            t_cur = t_next;
            ++step_index;

            bool finite = true;
            for (double value : state) finite = finite && std::isfinite(value);
            if (!finite) {
                traj.aborted = true;
                traj.abort_time = t_cur;
                traj.abort_reason = "non-finite state (expression domain error or overflow)";
                record(t_cur);
                return traj;
            }
            record(t_cur);
            if (traj.norm_x.back() > kDivergenceThreshold) {
                traj.diverged = true;
                traj.abort_time = t_cur;
                traj.abort_reason = "state norm exceeded divergence threshold";
                return traj;
            }
        }
        seg_start = seg_end;
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Batch simulation
// ---------------------------------------------------------------------------

struct RunSummary {
    int run = 0;
    std::vector<double> x0;
    double sup_norm = 0.0;
    double final_norm = 0.0;
    double initial_norm = 0.0;
    bool diverged = false;
    bool aborted = false;
};

struct BatchOptions {
    int n_runs = 1;
    std::uint64_t seed = 0;
    double t_end = 1.0;
    double dt = 1e-3;
    Box box;  // initial-condition box, one range per state dimension
};

/// Seeded uniform batch over the initial-condition box. Per-run seeds derive
/// from the master seed by SplitMix64 mixing, so runs are reproducible
/// individually and as a set. A divergent run is recorded and does not abort
/// the batch. The optional sink sees each full trajectory before the next
/// run starts.
inline std::vector<RunSummary> batch_simulate(
    const SwitchedFamily& fam, const SwitchingSignal& sig, const std::vector<Expr>& input,
    const BatchOptions& opts,
    const std::function<void(const Trajectory&, const RunSummary&)>& sink = nullptr) {
    if (opts.n_runs < 1) throw SimulationError("n_runs must be >= 1");
    if (static_cast<int>(opts.box.dim()) != fam.state_dim)
        throw SimulationError("batch box dimension mismatch");
    std::vector<RunSummary> out;
    out.reserve(static_cast<std::size_t>(opts.n_runs));
    for (int run = 0; run < opts.n_runs; ++run) {
        SplitMix64 rng(SplitMix64::derive(opts.seed, static_cast<std::uint64_t>(run)));
        std::vector<double> x0(static_cast<std::size_t>(fam.state_dim));
        for (int i = 0; i < fam.state_dim; ++i)
            x0[static_cast<std::size_t>(i)] =
                rng.uniform(opts.box.ranges[static_cast<std::size_t>(i)][0],
                            opts.box.ranges[static_cast<std::size_t>(i)][1]);
        Trajectory traj = integrate(fam, sig, input, x0, opts.t_end, opts.dt);
        RunSummary summary;
        summary.run = run;
        summary.x0 = x0;
        summary.sup_norm = traj.sup_norm();
        summary.final_norm = traj.final_norm();
        summary.initial_norm = traj.norm_x.front();
        summary.diverged = traj.diverged;
        summary.aborted = traj.aborted;
        if (sink) sink(traj, summary);
        out.push_back(std::move(summary));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Along-trajectory checks
// ---------------------------------------------------------------------------

struct EnvelopeReport {
    bool pass = true;
    long points = 0;
    long violations = 0;
    double worst_margin = -std::numeric_limits<double>::infinity();
    double worst_time = 0.0;
};

/// Checks |x(t_k)| <= beta(|x0|, t_k) + chi(v_sup) at every grid point
/// (alpha is the identity).
inline EnvelopeReport check_envelope(const Trajectory& traj, const ISSCertificate& cert,
                                     double v_sup) {
    EnvelopeReport rep;
    const double r0 = traj.norm_x.empty() ? 0.0 : traj.norm_x.front();
    const double chi_v = cert.chi(v_sup);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        ++rep.points;
        const double envelope = cert.beta(r0, traj.t[k]) + chi_v;
        const double margin = traj.norm_x[k] - envelope;
        if (margin > rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_time = traj.t[k];
        }
        if (margin > 1e-9 * std::max(1.0, envelope)) {
            rep.pass = false;
            ++rep.violations;
        }
    }
    return rep;
}

struct CascadeReport {
    bool pass = true;
    bool assumptions_verified = true;  // sampled decay/sandwich checks on the hull
    long points = 0;
    long violations = 0;
    double worst_margin = -std::numeric_limits<double>::infinity();
    double worst_time = 0.0;
};

/// Checks V_{sigma(t_k)}(x(t_k)) <= psi1(t_k) V_{sigma(0)}(x0) +
/// v_sup_gain psi2(t_k) along the trajectory. When the family's sampled
/// Lyapunov checks fail on the trajectory's bounding box the report is
/// labeled assumption-unverified and makes no pass/fail claim.
inline CascadeReport check_cascade(const Trajectory& traj, const SwitchedFamily& fam,
                                   const SwitchingSignal& sig, double v_sup_gain,
                                   int assumption_samples = 512) {
    CascadeReport rep;
    if (traj.size() == 0) return rep;

    Box hull;
    hull.ranges.resize(static_cast<std::size_t>(traj.state_dim));
    for (auto& r : hull.ranges) r = {std::numeric_limits<double>::max(),
                                     std::numeric_limits<double>::lowest()};
    for (std::size_t k = 0; k < traj.size(); ++k) {
        auto xs = traj.state(k);
        for (int i = 0; i < traj.state_dim; ++i) {
            hull.ranges[static_cast<std::size_t>(i)][0] =
                std::min(hull.ranges[static_cast<std::size_t>(i)][0], xs[static_cast<std::size_t>(i)]);
            hull.ranges[static_cast<std::size_t>(i)][1] =
                std::max(hull.ranges[static_cast<std::size_t>(i)][1], xs[static_cast<std::size_t>(i)]);
        }
    }
    Box input_hull;
    input_hull.ranges.resize(static_cast<std::size_t>(std::max(1, traj.input_dim)));
    for (auto& r : input_hull.ranges) r = {0.0, 0.0};
    for (std::size_t k = 0; k < traj.size(); ++k) {
        auto vs = traj.input(k);
        for (int j = 0; j < traj.input_dim; ++j) {
            input_hull.ranges[static_cast<std::size_t>(j)][0] =
                std::min(input_hull.ranges[static_cast<std::size_t>(j)][0], vs[static_cast<std::size_t>(j)]);
            input_hull.ranges[static_cast<std::size_t>(j)][1] =
                std::max(input_hull.ranges[static_cast<std::size_t>(j)][1], vs[static_cast<std::size_t>(j)]);
        }
    }
    for (const SubsystemSpec& s : fam.subsystems) {
        if (!check_lyapunov_sandwich(fam, s.index, hull, assumption_samples).pass ||
            !check_lyapunov_decay(fam, s.index, hull, input_hull, assumption_samples).pass)
            rep.assumptions_verified = false;
    }

    // Compiled V per mode for the pointwise evaluation.
    const auto order = detail_sim::state_input_order(traj.state_dim, 0);
    std::vector<CompiledExpr> v_fns;
    for (const SubsystemSpec& s : fam.subsystems) v_fns.emplace_back(s.V, order);

    const double v0 = v_fns[static_cast<std::size_t>(sig.initial_mode() - 1)](traj.state(0));
    for (std::size_t k = 0; k < traj.size(); ++k) {
        ++rep.points;
        const double t = traj.t[k];
        const double bound =
            t == 0.0 ? v0 : compute_psi1(fam, sig, t) * v0 + v_sup_gain * compute_psi2(fam, sig, t);
        const double value = v_fns[static_cast<std::size_t>(traj.mode[k] - 1)](traj.state(k));
        const double margin = value - bound;
        if (margin > rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_time = t;
        }
        if (margin > 1e-7 * std::max(1.0, std::abs(bound))) {
            rep.pass = false;
            ++rep.violations;
        }
    }
    return rep;
}

}  // namespace swsys
