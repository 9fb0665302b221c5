#pragma once

// =============================================================================
// Switched family: the finite collection of subsystems with Lyapunov-like
// data, the admissible-transition structure, and deterministic sampled checks
// of the sandwich, decay and mu-compatibility inequalities.
// =============================================================================
// The checks certify "no violation found at the sampled points" and record
// worst margins; they do not prove the inequalities globally. Sampling is a
// low-discrepancy lattice (odd per-axis counts, so axis points are included)
// plus seeded uniform points, deterministic for a given seed.
// =============================================================================

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swsys/expr.hpp"
#include "swsys/numeric.hpp"

namespace swsys {

class FamilyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class InvalidFamilyError : public FamilyError {
    using FamilyError::FamilyError;
};

class DegenerateLyapunovError : public FamilyError {
    using FamilyError::FamilyError;
};

class TransitionError : public FamilyError {
    using FamilyError::FamilyError;
};

/// Class-K-infinity comparison function of the parametric form a * r^p.
struct KInftyPower {
    double coef = 1.0;
    double power = 2.0;
    double operator()(double r) const { return coef * std::pow(r, power); }
};

struct SubsystemSpec {
    int index = 0;          // 1-based
    std::vector<Expr> f;    // d components over x1..xd, v1..vm
    Expr V;                 // over x1..xd
    double lambda = 0.0;    // > 0: ISS member, < 0: non-ISS member
};

struct SwitchedFamily {
    int state_dim = 0;
    int input_dim = 0;
    std::vector<SubsystemSpec> subsystems;
    std::set<std::pair<int, int>> transitions;        // E(P)
    std::map<std::pair<int, int>, double> mu;         // mu_ij on E(P)
    KInftyPower alpha_lower, alpha_upper;
    Expr gamma;                                       // gain, expression in r

    int n_modes() const { return static_cast<int>(subsystems.size()); }

    const SubsystemSpec& subsystem(int mode) const {
        if (mode < 1 || mode > n_modes())
            throw InvalidFamilyError("mode index " + std::to_string(mode) + " out of range");
        return subsystems[static_cast<std::size_t>(mode - 1)];
    }

    double mu_at(int from, int to) const {
        auto it = mu.find({from, to});
        if (it == mu.end())
            throw TransitionError("transition " + std::to_string(from) + "->" +
                                  std::to_string(to) + " not in E");
        return it->second;
    }

    double gamma_at(double r) const { return gamma.evaluate({{"r", r}}); }

    void validate() const {
        if (state_dim < 1 || input_dim < 0) throw InvalidFamilyError("bad dimensions");
        if (subsystems.empty()) throw InvalidFamilyError("family needs at least one subsystem");
        for (const SubsystemSpec& s : subsystems) {
            if (s.lambda == 0.0)
                throw InvalidFamilyError("lambda must be nonzero (mode " +
                                         std::to_string(s.index) + ")");
            if (static_cast<int>(s.f.size()) != state_dim)
                throw InvalidFamilyError("vector field dimension mismatch (mode " +
                                         std::to_string(s.index) + ")");
        }
        for (const auto& [pair, value] : mu) {
            if (pair.first == pair.second) throw InvalidFamilyError("self-loop in E");
            if (!(value > 0.0)) throw InvalidFamilyError("mu must be positive");
            if (!transitions.contains(pair)) throw InvalidFamilyError("mu for pair not in E");
        }
        for (const auto& pair : transitions) {
            if (pair.first == pair.second) throw InvalidFamilyError("self-loop in E");
            if (pair.first < 1 || pair.first > n_modes() || pair.second < 1 ||
                pair.second > n_modes())
                throw InvalidFamilyError("transition references missing mode");
            if (!mu.contains(pair)) throw InvalidFamilyError("transition missing mu value");
        }
        if (!(alpha_lower.coef > 0.0) || !(alpha_lower.power > 0.0) ||
            !(alpha_upper.coef > 0.0) || !(alpha_upper.power > 0.0))
            throw InvalidFamilyError("sandwich bounds need positive coefficient and power");
    }
};

struct ModePartition {
    std::vector<int> iss;      // P_S
    std::vector<int> non_iss;  // P_U
};

/// P_S = {i : lambda_i > 0}, P_U = {i : lambda_i < 0}; a zero lambda is
/// rejected because the sign determines membership.
inline ModePartition partition_modes(const SwitchedFamily& fam) {
    ModePartition p;
    for (const SubsystemSpec& s : fam.subsystems) {
        if (s.lambda > 0.0)
            p.iss.push_back(s.index);
        else if (s.lambda < 0.0)
            p.non_iss.push_back(s.index);
        else
            throw InvalidFamilyError("lambda must be nonzero (mode " + std::to_string(s.index) +
                                     ")");
    }
    return p;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct Box {
    std::vector<std::array<double, 2>> ranges;  // per-axis [lo, hi]

    std::size_t dim() const { return ranges.size(); }

    void validate() const {
        if (ranges.empty()) throw FamilyError("sample box must be nonempty");
        for (const auto& r : ranges)
            if (!(r[0] <= r[1])) throw FamilyError("sample box has inverted range");
    }
};

namespace detail_family {

/// Half lattice (odd per-axis counts so midpoints/axes are hit), half seeded
/// uniform samples. Deterministic for a given seed.
inline std::vector<std::vector<double>> sample_points(const Box& box, int n_samples,
                                                      std::uint64_t seed) {
    box.validate();
    if (n_samples < 1) throw FamilyError("n_samples must be >= 1");
    const std::size_t d = box.dim();
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(n_samples));

    const int lattice_total = std::max(1, n_samples / 2);
    int per_axis = static_cast<int>(std::floor(std::pow(static_cast<double>(lattice_total),
                                                        1.0 / static_cast<double>(d))));
    per_axis = std::max(1, per_axis) | 1;  // odd
    std::vector<int> idx(d, 0);
    for (;;) {
        std::vector<double> p(d);
        for (std::size_t a = 0; a < d; ++a) {
            const auto& r = box.ranges[a];
            p[a] = per_axis == 1 ? 0.5 * (r[0] + r[1])
                                 : r[0] + (r[1] - r[0]) * idx[a] / (per_axis - 1);
        }
        pts.push_back(std::move(p));
        std::size_t a = 0;
        while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
        if (a == d) break;
        if (pts.size() >= static_cast<std::size_t>(n_samples)) break;
    }

    SplitMix64 rng(seed);
    while (pts.size() < static_cast<std::size_t>(n_samples)) {
        std::vector<double> p(d);
        for (std::size_t a = 0; a < d; ++a)
            p[a] = rng.uniform(box.ranges[a][0], box.ranges[a][1]);
        pts.push_back(std::move(p));
    }
    return pts;
}

inline std::map<std::string, double> state_bindings(std::span<const double> x) {
    std::map<std::string, double> b;
    for (std::size_t i = 0; i < x.size(); ++i) b["x" + std::to_string(i + 1)] = x[i];
    return b;
}

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace detail_family

// ---------------------------------------------------------------------------
// Sampled checks
// ---------------------------------------------------------------------------

struct CheckViolation {
    std::vector<double> state;
    std::vector<double> input;  // decay check only
    double lhs = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // lhs - bound (> 0 is a violation)
    std::string cause;    // nonempty for evaluation errors
};

struct SampledCheckReport {
    bool pass = true;
    int samples_checked = 0;
    long violation_count = 0;
    std::vector<CheckViolation> violations;  // first few kept
    double worst_margin = -std::numeric_limits<double>::infinity();
    std::vector<double> worst_state;
    std::vector<double> worst_input;

    void record(CheckViolation v, double tol) {
        if (v.margin > worst_margin) {
            worst_margin = v.margin;
            worst_state = v.state;
            worst_input = v.input;
        }
        if (v.margin > tol || !v.cause.empty()) {
            pass = false;
            ++violation_count;
            if (violations.size() < 32) violations.push_back(std::move(v));
        }
    }
};

/// Checks alpha_lower(|x|) <= V_i(x) <= alpha_upper(|x|) at sampled points
/// (1e-12 slack). Evaluation errors count as violations with a cause.
inline SampledCheckReport check_lyapunov_sandwich(const SwitchedFamily& fam, int mode,
                                                  const Box& box, int n_samples,
                                                  std::uint64_t seed = 0) {
    const SubsystemSpec& sub = fam.subsystem(mode);
    SampledCheckReport rep;
    const double tol = 1e-12;
    for (auto& x : detail_family::sample_points(box, n_samples, seed)) {
        ++rep.samples_checked;
        const double r = detail_family::norm2(x);
        try {
            const double v = sub.V.evaluate(detail_family::state_bindings(x));
            const double lo = fam.alpha_lower(r);
            const double hi = fam.alpha_upper(r);
            const double margin = std::max(lo - v, v - hi);
            rep.record({x, {}, v, margin > 0.0 ? (lo - v > v - hi ? lo : hi) : hi, margin, ""},
                       tol * std::max(1.0, std::abs(v)));
        } catch (const EvalError& e) {
            rep.record({x, {}, 0.0, 0.0, 0.0, e.what()}, tol);
        }
    }
    return rep;
}

/// Checks <dV_i/dx(x), f_i(x, v)> <= -lambda_i V_i(x) + gamma(|v|) at sampled
/// (x, v) pairs and reports positive margins.
inline SampledCheckReport check_lyapunov_decay(const SwitchedFamily& fam, int mode,
                                               const Box& state_box, const Box& input_box,
                                               int n_samples, std::uint64_t seed = 0) {
    const SubsystemSpec& sub = fam.subsystem(mode);
    SampledCheckReport rep;
    const double tol = 1e-12;

    std::vector<Expr> grad;
    grad.reserve(static_cast<std::size_t>(fam.state_dim));
    for (int i = 1; i <= fam.state_dim; ++i)
        grad.push_back(sub.V.derivative("x" + std::to_string(i)));

    auto states = detail_family::sample_points(state_box, n_samples, seed);
    auto inputs = detail_family::sample_points(input_box, n_samples,
                                               SplitMix64::derive(seed, 1));
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& x = states[k];
        const auto& v = inputs[k % inputs.size()];
        ++rep.samples_checked;
        try {
            auto bindings = detail_family::state_bindings(x);
            for (std::size_t j = 0; j < v.size(); ++j)
                bindings["v" + std::to_string(j + 1)] = v[j];
            double lhs = 0.0;
            for (int i = 0; i < fam.state_dim; ++i)
                lhs += grad[static_cast<std::size_t>(i)].evaluate(bindings) *
                       sub.f[static_cast<std::size_t>(i)].evaluate(bindings);
            const double vx = sub.V.evaluate(bindings);
            const double bound = -sub.lambda * vx + fam.gamma_at(detail_family::norm2(v));
            rep.record({x, v, lhs, bound, lhs - bound, ""},
                       tol * std::max(1.0, std::abs(bound)));
        } catch (const EvalError& e) {
            rep.record({x, v, 0.0, 0.0, 0.0, e.what()}, tol);
        }
    }
    return rep;
}

struct MuCheckReport {
    bool pass = false;
    double mu_hat = 0.0;       // max over samples of V_to / V_from
    double mu_declared = 0.0;
    std::vector<double> argmax_state;
    int samples_checked = 0;
};

/// Minimal feasible mu over the sampled points: mu_hat = max V_j(x)/V_i(x)
/// over sampled x != 0; passes iff mu_hat <= mu_ij + 1e-12.
inline MuCheckReport check_mu_compatibility(const SwitchedFamily& fam, int from, int to,
                                            const Box& box, int n_samples,
                                            std::uint64_t seed = 0) {
    MuCheckReport rep;
    rep.mu_declared = fam.mu_at(from, to);
    const Expr& v_from = fam.subsystem(from).V;
    const Expr& v_to = fam.subsystem(to).V;
    for (auto& x : detail_family::sample_points(box, n_samples, seed)) {
        if (detail_family::norm2(x) <= 1e-12) continue;
        ++rep.samples_checked;
        auto bindings = detail_family::state_bindings(x);
        const double denom = v_from.evaluate(bindings);
        if (denom <= 0.0)
            throw DegenerateLyapunovError("V_" + std::to_string(from) +
                                          " vanishes at a nonzero sample");
        const double ratio = v_to.evaluate(bindings) / denom;
        if (ratio > rep.mu_hat) {
            rep.mu_hat = ratio;
            rep.argmax_state = x;
        }
    }
    rep.pass = rep.mu_hat <= rep.mu_declared + 1e-12;
    return rep;
}

struct GammaCheckReport {
    bool zero_at_zero = false;
    bool increasing = true;
    double gamma_at_zero = 0.0;
};

/// Class-K-infinity candidacy of the gain at sampled radii: gamma(0) = 0 and
/// strict increase along an increasing sample of arguments.
inline GammaCheckReport check_gamma_candidacy(const SwitchedFamily& fam, double r_max = 10.0,
                                              int n_samples = 64) {
    GammaCheckReport rep;
    rep.gamma_at_zero = fam.gamma_at(0.0);
    rep.zero_at_zero = std::abs(rep.gamma_at_zero) <= 1e-12;
    double prev = rep.gamma_at_zero;
    for (int i = 1; i <= n_samples; ++i) {
        const double r = r_max * i / n_samples;
        const double g = fam.gamma_at(r);
        if (g <= prev + 1e-15) rep.increasing = false;
        prev = g;
    }
    return rep;
}

}  // namespace swsys
