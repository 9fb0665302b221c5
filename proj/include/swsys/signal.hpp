#pragma once

// =============================================================================
// Switching signals: representation, duration/count queries, bound checking
// against rate-function constraints, and signal generators (worst-case
// placement, average dwell time, and bound-respecting periodic excursions).
// =============================================================================
// Convention used throughout: a signal is the finite list tau_0 = 0 < tau_1 <
// ... < tau_N with modes[i] active on the half-open interval ]tau_i, tau_i+1]
// and modes[N] persisting on ]tau_N, +inf[. Point queries use the
// right-continuous convention sigma(tau_i) = modes[i]. Durations and switch
// counts are taken over half-open intervals ]s, t].
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swsys/numeric.hpp"
#include "swsys/ratefn.hpp"

namespace swsys {

class SignalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class OrderingError : public SignalError {
    using SignalError::SignalError;
};

class GenerationError : public SignalError {
    using SignalError::SignalError;
};

using ModePair = std::pair<int, int>;

/// Minimum holding time enforced by every generator.
inline constexpr double kMinHoldingTime = 1e-9;

// ---------------------------------------------------------------------------
// SwitchingSignal
// ---------------------------------------------------------------------------

struct SwitchingSignal {
    std::vector<double> taus;   // tau_0 = 0 first; strictly increasing
    std::vector<int> modes;     // same length; modes[i] active on ]tau_i, tau_i+1]

    int n_switches() const { return static_cast<int>(taus.size()) - 1; }
    int initial_mode() const { return modes.front(); }
    double last_switch() const { return taus.back(); }

    /// Right-continuous mode query: sigma(t) = modes[i] for t in [tau_i, tau_i+1).
    int mode_at(double t) const {
        auto it = std::upper_bound(taus.begin(), taus.end(), t);
        std::size_t idx = static_cast<std::size_t>(it - taus.begin());
        return modes[idx == 0 ? 0 : idx - 1];
    }

    void validate() const {
        if (taus.empty() || taus.size() != modes.size())
            throw SignalError("signal needs matching nonempty tau/mode lists");
        if (taus.front() != 0.0) throw SignalError("signal must start at tau_0 = 0");
        for (std::size_t i = 1; i < taus.size(); ++i) {
            if (!(taus[i] > taus[i - 1])) throw SignalError("switching instants must increase");
            if (modes[i] == modes[i - 1]) throw SignalError("consecutive modes must differ");
        }
    }

    void validate_transitions(const std::set<ModePair>& admissible) const {
        validate();
        for (std::size_t i = 1; i < modes.size(); ++i)
            if (!admissible.contains({modes[i - 1], modes[i]}))
                throw SignalError("transition " + std::to_string(modes[i - 1]) + "->" +
                                  std::to_string(modes[i]) + " not admissible");
    }
};

/// Holding times S_{i+1} = tau_{i+1} - tau_i between recorded switches.
inline std::vector<double> holding_times(const SwitchingSignal& sig) {
    std::vector<double> out;
    out.reserve(sig.taus.size() - 1);
    for (std::size_t i = 1; i < sig.taus.size(); ++i)
        out.push_back(sig.taus[i] - sig.taus[i - 1]);
    return out;
}

/// Lebesgue measure of {u in ]s,t] : sigma(u) = mode}. The durations over all
/// modes partition t - s.
inline double activation_duration(const SwitchingSignal& sig, int mode, double s, double t) {
    if (!(0.0 <= s && s < t)) throw OrderingError("activation_duration requires 0 <= s < t");
    double total = 0.0;
    const std::size_t n = sig.taus.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (sig.modes[i] != mode) continue;
        const double lo = sig.taus[i];
        const double hi = i + 1 < n ? sig.taus[i + 1] : t;  // last mode persists
        const double a = std::max(lo, s);
        const double b = std::min(hi, t);
        if (b > a) total += b - a;
    }
    return total;
}

/// Number of from->to switches with switching instant in ]s, t].
inline int switch_count(const SwitchingSignal& sig, int from, int to, double s, double t) {
    if (!(0.0 <= s && s < t)) throw OrderingError("switch_count requires 0 <= s < t");
    int count = 0;
    for (std::size_t i = 1; i < sig.taus.size(); ++i)
        if (sig.taus[i] > s && sig.taus[i] <= t && sig.modes[i - 1] == from && sig.modes[i] == to)
            ++count;
    return count;
}

/// Total switches on ]s, t].
inline int total_switch_count(const SwitchingSignal& sig, double s, double t) {
    if (!(0.0 <= s && s < t)) throw OrderingError("switch_count requires 0 <= s < t");
    int count = 0;
    for (std::size_t i = 1; i < sig.taus.size(); ++i)
        if (sig.taus[i] > s && sig.taus[i] <= t) ++count;
    return count;
}

// ---------------------------------------------------------------------------
// Rate-function bound set (duration lower/upper bounds and count bounds)
// ---------------------------------------------------------------------------

struct BoundedRate {
    RateFunction rate;
    double offset = 0.0;  // TbarS, TbarU or Nbar, strictly positive
};

struct RateBoundSet {
    std::map<int, BoundedRate> iss;        // mode -> duration lower bound data
    std::map<int, BoundedRate> non_iss;    // mode -> duration upper bound data
    std::map<ModePair, BoundedRate> switching;  // pair -> count upper bound data

    void validate() const {
        auto check = [](const BoundedRate& b, const char* what) {
            if (!(b.offset > 0.0))
                throw SignalError(std::string(what) + " offset must be strictly positive");
            if (!b.rate.strictly_increasing())
                throw SignalError(std::string(what) + " rate must be strictly increasing");
        };
        for (const auto& [m, b] : iss) check(b, "iss bound");
        for (const auto& [m, b] : non_iss) check(b, "non-iss bound");
        for (const auto& [p, b] : switching) check(b, "switching bound");
    }

    std::set<ModePair> admissible_pairs() const {
        std::set<ModePair> out;
        for (const auto& [p, b] : switching) out.insert(p);
        return out;
    }

    double aggregate_count_offset() const {
        double n0 = 0.0;
        for (const auto& [p, b] : switching) n0 += b.offset;
        return n0;
    }

    RateFunction aggregate_count_rate() const {
        std::vector<RateFunction> rates;
        for (const auto& [p, b] : switching) rates.push_back(b.rate);
        return merge_rates(rates);
    }
};

// ---------------------------------------------------------------------------
// Bound checking
// ---------------------------------------------------------------------------

struct BoundViolation {
    enum class Family { IssDuration, NonIssDuration, SwitchCount };
    Family family;
    int mode_or_from = 0;
    int to = 0;  // switch-count family only
    double s = 0.0, t = 0.0;
    double observed = 0.0;
    double bound = 0.0;
    std::string describe() const {
        std::string what = family == Family::IssDuration       ? "T_S(" + std::to_string(mode_or_from)
                           : family == Family::NonIssDuration ? "T_U(" + std::to_string(mode_or_from)
                                                               : "N(" + std::to_string(mode_or_from) +
                                                                     "->" + std::to_string(to);
        return what + ") on ]" + format_double(s) + ", " + format_double(t) +
               "]: observed " + format_double(observed) + " vs bound " + format_double(bound);
    }
};

struct SignalBoundsReport {
    bool pass = true;
    std::optional<BoundViolation> first_violation;
    double worst_slack = -std::numeric_limits<double>::infinity();  // > 0 means violated
    long intervals_checked = 0;
};

/// Checks the three inequality families on every interval ]a, b] with a, b
/// drawn from the step-h grid over [0, horizon] merged with all switching
/// instants. Durations/counts are piecewise linear/constant between switching
/// instants, so breakpoint pairs plus the safety grid decide the verdict for
/// the implemented rate forms. Comparison tolerance is 1e-9.
inline SignalBoundsReport check_signal_bounds(const SwitchingSignal& sig,
                                              const RateBoundSet& bounds, double horizon,
                                              double grid_step) {
    if (!(horizon > 0.0) || !(grid_step > 0.0))
        throw SignalError("check_signal_bounds requires positive horizon and grid step");
    sig.validate();
    bounds.validate();
    const double tol = 1e-9;

    // Breakpoints: grid plus switching instants within [0, horizon].
    std::vector<double> points;
    const long n_grid = static_cast<long>(std::floor(horizon / grid_step + 1e-9));
    points.reserve(static_cast<std::size_t>(n_grid) + sig.taus.size() + 2);
    for (long j = 0; j <= n_grid; ++j) points.push_back(std::min(j * grid_step, horizon));
    if (points.back() < horizon) points.push_back(horizon);
    for (double tau : sig.taus)
        if (tau <= horizon) points.push_back(tau);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                 points.end());
    const std::size_t np = points.size();

    // Prefix durations per bounded mode and prefix counts per bounded pair.
    std::vector<int> dur_modes;
    for (const auto& [m, b] : bounds.iss) dur_modes.push_back(m);
    for (const auto& [m, b] : bounds.non_iss) dur_modes.push_back(m);
    std::map<int, std::vector<double>> prefix_dur;
    for (int m : dur_modes) {
        std::vector<double> acc(np, 0.0);
        for (std::size_t i = 1; i < np; ++i) {
            // sigma is constant on ](points[i-1], points[i]]; sample the midpoint.
            const int active = sig.mode_at(0.5 * (points[i - 1] + points[i]));
            acc[i] = acc[i - 1] + (active == m ? points[i] - points[i - 1] : 0.0);
        }
        prefix_dur[m] = std::move(acc);
    }
    std::map<ModePair, std::vector<long>> prefix_cnt;
    for (const auto& [pair, b] : bounds.switching) {
        std::vector<long> acc(np, 0);
        std::size_t k = 1;  // next switching index, advances monotonically
        long count = 0;
        for (std::size_t i = 0; i < np; ++i) {
            while (k < sig.taus.size() && sig.taus[k] <= points[i] + 1e-15) {
                if (sig.modes[k - 1] == pair.first && sig.modes[k] == pair.second) ++count;
                ++k;
            }
            acc[i] = count;
        }
        prefix_cnt[pair] = std::move(acc);
    }

    // Flat views for the quadratic sweep.
    struct Entry {
        BoundViolation::Family family;
        int mode_or_from, to;
        const BoundedRate* bd;
        const double* dur_prefix;  // duration families
        const long* cnt_prefix;    // count family
        double sign;               // +1: observed <= bound, -1: observed >= bound
    };
    std::vector<Entry> entries;
    for (const auto& [m, bd] : bounds.iss)
        entries.push_back({BoundViolation::Family::IssDuration, m, 0, &bd,
                           prefix_dur[m].data(), nullptr, -1.0});
    for (const auto& [m, bd] : bounds.non_iss)
        entries.push_back({BoundViolation::Family::NonIssDuration, m, 0, &bd,
                           prefix_dur[m].data(), nullptr, 1.0});
    for (const auto& [pair, bd] : bounds.switching)
        entries.push_back({BoundViolation::Family::SwitchCount, pair.first, pair.second, &bd,
                           nullptr, prefix_cnt[pair].data(), 1.0});

    SignalBoundsReport rep;
    for (std::size_t ia = 0; ia + 1 < np; ++ia) {
        const double a = points[ia];
        for (std::size_t ib = ia + 1; ib < np; ++ib) {
            const double b = points[ib];
            const double s = b - a;
            ++rep.intervals_checked;
            for (const Entry& e : entries) {
                const double observed =
                    e.dur_prefix ? e.dur_prefix[ib] - e.dur_prefix[ia]
                                 : static_cast<double>(e.cnt_prefix[ib] - e.cnt_prefix[ia]);
                const double rate_value = e.bd->rate(a, s);
                // Duration lower bound: observed >= -offset + rate. Upper
                // bounds: observed <= offset + rate.
                const double bound = e.sign > 0.0 ? e.bd->offset + rate_value
                                                  : -e.bd->offset + rate_value;
                const double slack = e.sign > 0.0 ? observed - bound : bound - observed;
                if (slack > rep.worst_slack) rep.worst_slack = slack;
                if (slack > tol && !rep.first_violation) {
                    rep.pass = false;
                    rep.first_violation =
                        BoundViolation{e.family, e.mode_or_from, e.to, a, b, observed, bound};
                }
            }
            if (rep.first_violation) return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline SwitchingSignal no_switch_signal(int mode) { return SwitchingSignal{{0.0}, {mode}}; }

namespace detail_signal {

inline bool append_switch(SwitchingSignal& sig, double tau, int mode) {
    if (tau <= sig.taus.back() + kMinHoldingTime * 0.5) return false;
    sig.taus.push_back(tau);
    sig.modes.push_back(mode);
    return true;
}

inline int cycle_next(const std::vector<int>& cycle, std::size_t& pos) {
    pos = (pos + 1) % cycle.size();
    return cycle[pos];
}

inline void validate_cycle(const std::vector<int>& cycle, const std::set<ModePair>& pairs) {
    if (cycle.size() < 2) throw GenerationError("mode cycle needs at least two modes");
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const int from = cycle[i];
        const int to = cycle[(i + 1) % cycle.size()];
        if (from == to) throw GenerationError("mode cycle repeats a mode consecutively");
        if (!pairs.contains({from, to}))
            throw GenerationError("mode cycle uses inadmissible transition " +
                                  std::to_string(from) + "->" + std::to_string(to));
    }
}

}  // namespace detail_signal

struct WorstCaseOptions {
    std::vector<int> mode_cycle = {1, 2};
    bool place_offset_switches = true;  // the floor(Nbar) switches packed near t
    double epsilon = 1e-6;              // clustering width near t
    double verify_grid_step = 0.0;      // 0 = auto
};

/// Places switching instants per the worst-case analysis of the count bound:
/// with n = floor(rhoN(0,t)) aggregate switches admissible on ]0,t], instant
/// k from the end sits at t - rhoN^{-1}(k). Up to floor(Nbar_mn) further
/// switches are packed within epsilon of t, then greedily dropped until the
/// full bound check passes. Throws GenerationError when no admissible
/// placement exists.
inline SwitchingSignal generate_worst_case_signal(const RateBoundSet& bounds, double t,
                                                  const WorstCaseOptions& opts = {}) {
    if (!(t > 0.0)) throw GenerationError("horizon must be positive");
    bounds.validate();
    const auto pairs = bounds.admissible_pairs();
    detail_signal::validate_cycle(opts.mode_cycle, pairs);

    const RateFunction rho_n = bounds.aggregate_count_rate();
    std::vector<double> placements;
    const double total = rho_n.eval(t);
    if (total >= 1.0) {
        const int n = static_cast<int>(std::floor(total + 1e-12));
        for (int k = n; k >= 1; --k) {
            double s_k = 0.0;
            try {
                s_k = rho_n.invert(static_cast<double>(k));
            } catch (const RateFunctionError& e) {
                throw GenerationError(std::string("aggregate count rate not invertible: ") +
                                      e.what());
            }
            const double p = t - s_k;
            if (p >= kMinHoldingTime) placements.push_back(p);
        }
    }

    // Offset switches near t, capped per pair at floor(Nbar_mn).
    std::map<ModePair, int> caps;
    for (const auto& [pair, b] : bounds.switching)
        caps[pair] = static_cast<int>(std::floor(b.offset + 1e-12));

    const double verify_step = opts.verify_grid_step > 0.0
                                   ? opts.verify_grid_step
                                   : std::max(1e-3, t / 2000.0);

    int max_extras = 0;
    if (opts.place_offset_switches)
        for (const auto& [pair, cap] : caps) max_extras += cap;

    for (int extras = max_extras; extras >= 0; --extras) {
        SwitchingSignal sig;
        sig.taus.push_back(0.0);
        std::size_t cyc = 0;
        sig.modes.push_back(opts.mode_cycle[0]);
        std::map<ModePair, int> used;
        for (double p : placements) {
            if (p <= sig.taus.back() + kMinHoldingTime * 0.5) continue;
            std::size_t next_pos = cyc;
            const int mode = detail_signal::cycle_next(opts.mode_cycle, next_pos);
            if (detail_signal::append_switch(sig, p, mode)) cyc = next_pos;
        }

        // Continue the cycle within ]t - epsilon, t[ while per-pair caps allow.
        int placed = 0;
        std::size_t cyc_probe = cyc;
        double base = std::max(sig.taus.back() + kMinHoldingTime, t - opts.epsilon);
        for (int j = 1; placed < extras; ++j) {
            const int from = opts.mode_cycle[cyc_probe];
            std::size_t next_pos = cyc_probe;
            const int to = detail_signal::cycle_next(opts.mode_cycle, next_pos);
            if (used[{from, to}] >= caps[{from, to}]) break;
            const double tau = base + (t - base) * j / (extras + 1.0);
            if (!detail_signal::append_switch(sig, tau, to)) break;
            ++used[{from, to}];
            cyc_probe = next_pos;
            ++placed;
        }

        SignalBoundsReport check = check_signal_bounds(sig, bounds, t, verify_step);
        if (check.pass) return sig;
        if (extras == 0)
            throw GenerationError("worst-case placement infeasible: " +
                                  check.first_violation->describe());
    }
    throw GenerationError("worst-case placement infeasible");
}

/// Average-dwell-time style signal: switches at i*tau_a (optionally jittered
/// by expanding gaps, which preserves the ADT property), modes cycling
/// through mode_cycle. The returned signal satisfies
/// N_sigma(s,t) <= n0 + (t-s)/tau_a, verified post hoc by the caller via
/// check_adt_property.
inline SwitchingSignal generate_adt_signal(double tau_a, double n0, double t,
                                           const std::vector<int>& mode_cycle,
                                           std::uint64_t seed = 0, double jitter = 0.0) {
    if (!(tau_a > 0.0)) throw GenerationError("average dwell time must be positive");
    if (mode_cycle.size() < 2) throw GenerationError("mode cycle needs at least two modes");
    for (std::size_t i = 0; i < mode_cycle.size(); ++i)
        if (mode_cycle[i] == mode_cycle[(i + 1) % mode_cycle.size()])
            throw GenerationError("mode cycle repeats a mode consecutively");

    SwitchingSignal sig;
    sig.taus.push_back(0.0);
    sig.modes.push_back(mode_cycle[0]);
    if (n0 < 1.0) return sig;  // any switch would break the bound on a shrinking interval

    SplitMix64 rng(seed);
    std::size_t cyc = 0;
    double tau = 0.0;
    for (;;) {
        double gap = tau_a;
        if (jitter > 0.0) gap *= 1.0 + jitter * rng.uniform01();  // expand-only
        tau += std::max(gap, kMinHoldingTime);
        if (tau > t + 1e-12) break;
        detail_signal::append_switch(sig, std::min(tau, t),
                                     detail_signal::cycle_next(mode_cycle, cyc));
    }
    return sig;
}

/// Checks N_sigma(s,t) <= n0 + (t-s)/tau_a on all grid/switch interval pairs.
inline bool check_adt_property(const SwitchingSignal& sig, double tau_a, double n0,
                               double horizon, double grid_step) {
    std::vector<double> points;
    const long n_grid = static_cast<long>(std::floor(horizon / grid_step + 1e-9));
    for (long j = 0; j <= n_grid; ++j) points.push_back(std::min(j * grid_step, horizon));
    if (points.back() < horizon) points.push_back(horizon);
    for (double tau : sig.taus)
        if (tau <= horizon) points.push_back(tau);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                 points.end());

    std::vector<long> prefix(points.size(), 0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        prefix[i] = prefix[i - 1];
        for (std::size_t k = 1; k < sig.taus.size(); ++k)
            if (sig.taus[k] > points[i - 1] + 1e-15 && sig.taus[k] <= points[i] + 1e-15)
                ++prefix[i];
    }
    for (std::size_t ia = 0; ia + 1 < points.size(); ++ia)
        for (std::size_t ib = ia + 1; ib < points.size(); ++ib) {
            const double count = static_cast<double>(prefix[ib] - prefix[ia]);
            if (count > n0 + (points[ib] - points[ia]) / tau_a + 1e-9) return false;
        }
    return true;
}

struct AdmissibleOptions {
    std::vector<int> mode_cycle = {1, 2};
    double grid_step = 0.01;
    double safety = 0.8;    // fraction of each budget actually used
    int max_attempts = 30;
};

/// Builds a signal satisfying all three bound families on [0, t_end]:
/// long dwells on the duration-lower-bounded (ISS) modes with short,
/// well-separated excursions through the duration-upper-bounded (non-ISS)
/// ones. Stint lengths come from inverting the ISS lower bounds; the period
/// comes from inverting the pair count bounds. Each candidate is verified
/// with check_signal_bounds and relaxed (longer period, shorter stints) on
/// failure. Throws GenerationError when no candidate passes.
inline SwitchingSignal generate_admissible_signal(const RateBoundSet& bounds, double t_end,
                                                  const AdmissibleOptions& opts = {}) {
    if (!(t_end > 0.0)) throw GenerationError("horizon must be positive");
    bounds.validate();
    const auto& cycle = opts.mode_cycle;
    if (cycle.size() == 1) {
        SwitchingSignal sig = no_switch_signal(cycle[0]);
        auto rep = check_signal_bounds(sig, bounds, t_end, opts.grid_step);
        if (!rep.pass)
            throw GenerationError("no-switch signal violates bounds: " +
                                  rep.first_violation->describe());
        return sig;
    }
    detail_signal::validate_cycle(cycle, bounds.admissible_pairs());

    std::vector<int> unstable, stable;
    for (int m : cycle)
        (bounds.non_iss.contains(m) ? unstable : stable).push_back(m);
    if (stable.empty()) throw GenerationError("mode cycle has no ISS mode to dwell on");

    // Total non-ISS time per period: every interval covered by excursions has
    // zero ISS activation, so the ISS lower bounds cap the excursion length.
    // The period comes from the pair count bounds: k occurrences of a pair
    // span at least (k-1) periods, so rho_mn((k-1)*period) >= k - Nbar_mn.
    double stint = 0.0;
    double period = 0.0;
    try {
        double stint_budget = std::numeric_limits<double>::infinity();
        for (const auto& [m, b] : bounds.iss)
            stint_budget = std::min(stint_budget, b.rate.invert(opts.safety * b.offset));
        if (!unstable.empty())
            stint = std::max(stint_budget / static_cast<double>(unstable.size()),
                             kMinHoldingTime);

        double period_req = static_cast<double>(cycle.size()) * kMinHoldingTime * 2.0;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const ModePair pair{cycle[i], cycle[(i + 1) % cycle.size()]};
            const auto& b = bounds.switching.at(pair);
            for (int k = 2; k <= 64; ++k) {
                const double need = static_cast<double>(k) - b.offset;
                if (need <= 0.0) continue;
                period_req = std::max(period_req, b.rate.invert(need) / (k - 1));
            }
        }
        period = period_req / opts.safety;
    } catch (const RateFunctionError& e) {
        throw GenerationError(std::string("bound rates not invertible: ") + e.what());
    }

    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        const double unstable_total = stint * static_cast<double>(unstable.size());
        if (unstable_total >= period) {
            period = unstable_total * 2.0;
            continue;
        }
        const double stable_dwell = (period - unstable_total) / static_cast<double>(stable.size());

        SwitchingSignal sig;
        sig.taus.push_back(0.0);
        sig.modes.push_back(cycle[0]);
        double t = 0.0;
        std::size_t pos = 0;
        while (true) {
            const int current = cycle[pos];
            const double dwell = bounds.non_iss.contains(current) ? stint : stable_dwell;
            t += dwell;
            // Stop before a switch would leave the tail dwelling on a
            // non-ISS mode or run past the horizon.
            const std::size_t next_pos = (pos + 1) % cycle.size();
            const int next = cycle[next_pos];
            if (t > t_end) break;
            if (bounds.non_iss.contains(next)) {
                const double back = t + stint;
                if (back > t_end) break;
            }
            if (!detail_signal::append_switch(sig, t, next)) break;
            pos = next_pos;
        }

        auto rep = check_signal_bounds(sig, bounds, t_end, opts.grid_step);
        if (rep.pass) return sig;
        period *= 1.3;
        stint *= 0.75;
    }
    throw GenerationError("no admissible signal found for the given bounds");
}

/// Convenience overload of the summability estimate for a signal.
inline SummabilityReport summability_estimate(const RateFunction& rho, const SwitchingSignal& sig,
                                              std::span<const double> horizons) {
    return summability_estimate(rho, std::span<const double>(sig.taus), horizons);
}

}  // namespace swsys
