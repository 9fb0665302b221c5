#pragma once

// =============================================================================
// Class-FK-infinity rate functions and the certificate-side inequality work:
// evaluation, inversion in the second argument, the weighted-sum condition
// with its exact coefficient comparison, summability partial sums, and the
// closed-form/quadrature tail bounds for affine and s^(3/2) rates.
// =============================================================================
// A rate function is rho(r, s) = k2 + sum_i coef_i * s^power_i with coef >= 0,
// power > 0, k2 >= 0. For fixed r it is continuous, strictly increasing when
// any coefficient is positive, unbounded, and rho(r, 0) = k2. The first
// argument r is accepted everywhere as a hook; the implemented forms do not
// depend on it.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swsys/numeric.hpp"

namespace swsys {

class RateFunctionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class InversionError : public RateFunctionError {
    using RateFunctionError::RateFunctionError;
};

struct RateTerm {
    double coef = 0.0;
    double power = 1.0;
};

class RateFunction {
public:
    RateFunction() = default;

    RateFunction(std::vector<RateTerm> terms, double offset = 0.0)
        : terms_(std::move(terms)), offset_(offset) {
        for (const RateTerm& t : terms_) {
            if (t.coef < 0.0) throw RateFunctionError("rate term coefficient must be >= 0");
            if (t.power <= 0.0) throw RateFunctionError("rate term power must be > 0");
        }
        if (offset_ < 0.0) throw RateFunctionError("rate offset must be >= 0");
    }

    /// k1*s + k2
    static RateFunction linear(double k1, double k2 = 0.0) {
        return RateFunction({{k1, 1.0}}, k2);
    }

    /// k1*s^(3/2) + k2
    static RateFunction three_halves(double k1, double k2 = 0.0) {
        return RateFunction({{k1, 1.5}}, k2);
    }

    const std::vector<RateTerm>& terms() const noexcept { return terms_; }
    double offset() const noexcept { return offset_; }

    bool strictly_increasing() const noexcept {
        return std::any_of(terms_.begin(), terms_.end(),
                           [](const RateTerm& t) { return t.coef > 0.0; });
    }

    double eval(double s) const {
        if (s < 0.0) throw RateFunctionError("rate function argument must be >= 0");
        double v = offset_;
        for (const RateTerm& t : terms_) v += t.coef * pow_term(s, t.power);
        return v;
    }

    /// Two-argument form of the class-FK-infinity contract; r is unused by
    /// the implemented r-independent subfamily.
    double operator()(double /*r*/, double s) const { return eval(s); }

    /// Solves rho(s*) = level for s* by bisection: bracket by doubling, then
    /// bisect until both |rho(s*) - level| <= tol and the bracket collapses
    /// (max 200 iterations), so the inverse is also accurate in s.
    double invert(double level, double tol = 1e-10, int max_iter = 200) const {
        if (!strictly_increasing())
            throw InversionError("rate function is constant; cannot invert");
        if (level < offset_ - tol) throw InversionError("level below rho(.,0)");
        if (level <= offset_) return 0.0;
        double hi = 1.0;
        int doublings = 0;
        while (eval(hi) < level) {
            hi *= 2.0;
            if (++doublings > 1100) throw InversionError("level not bracketable");
        }
        double lo = 0.0;
        double mid = 0.5 * hi;
        for (int i = 0; i < max_iter; ++i) {
            mid = 0.5 * (lo + hi);
            const double v = eval(mid);
            if (std::abs(v - level) <= tol && hi - lo <= 1e-12 * std::max(1.0, mid)) return mid;
            (v < level ? lo : hi) = mid;
        }
        return mid;
    }

private:
    // The common powers (1, 3/2, 2) sit on hot grid-check paths.
    static double pow_term(double s, double p) {
        if (p == 1.0) return s;
        if (p == 1.5) return s * std::sqrt(s);
        if (p == 2.0) return s * s;
        return std::pow(s, p);
    }

    std::vector<RateTerm> terms_;
    double offset_ = 0.0;
};

/// Sum of rate functions (used for the aggregate switch-count rate).
inline RateFunction merge_rates(std::span<const RateFunction> rates) {
    std::map<double, double> by_power;
    double offset = 0.0;
    for (const RateFunction& r : rates) {
        offset += r.offset();
        for (const RateTerm& t : r.terms()) by_power[t.power] += t.coef;
    }
    std::vector<RateTerm> terms;
    for (auto [p, c] : by_power)
        if (c != 0.0) terms.push_back({c, p});
    return RateFunction(std::move(terms), offset);
}

// ---------------------------------------------------------------------------
// Weighted-sum condition:  -sum |lam_j| rhoS_j + sum |lam_k| rhoU_k
//                          + sum (ln mu_mn) rho_mn  <=  c1 - rho   on (r, s)
// ---------------------------------------------------------------------------

struct GridSpec {
    double r_max = 0.0;
    int r_count = 1;
    double s_max = 100.0;
    int s_count = 500;
};

/// One weighted summand of the condition's left side.
struct WeightedRate {
    double weight = 0.0;  // -|lambda_j|, +|lambda_k|, or ln(mu_mn)
    RateFunction rate;
    std::string label;
};

struct RateConditionInput {
    std::vector<WeightedRate> entries;
};

struct RateConditionReport {
    // Left-side aggregation by power of s (r-independent forms are exact).
    std::map<double, double> lhs_coefficients;  // power -> coefficient
    double lhs_constant = 0.0;                  // aggregated offsets
    // Combined = LHS + rho - c1; the condition holds iff combined <= 0.
    std::map<double, double> combined_coefficients;
    double combined_constant = 0.0;
    bool termwise_pass = false;

    bool grid_pass = false;
    double worst_slack = 0.0;  // max over grid of LHS + rho - c1
    double worst_r = 0.0, worst_s = 0.0;

    bool pass() const { return termwise_pass && grid_pass; }

    /// Evaluates the aggregated left side at s (coefficient route).
    double lhs_eval(double s) const {
        double v = lhs_constant;
        for (auto [p, c] : lhs_coefficients) v += c * std::pow(s, p);
        return v;
    }
};

/// Checks the condition both ways: exact per-power coefficient comparison
/// (valid for the implemented r-independent polynomial forms) and a brute
/// grid sweep over (r, s). The two verdicts agree for these forms.
inline RateConditionReport check_condition_c1(const RateConditionInput& input,
                                            const RateFunction& rho, double c1,
                                            const GridSpec& grid = {}) {
    RateConditionReport rep;

    double magnitude = 0.0;
    for (const WeightedRate& e : input.entries) {
        rep.lhs_constant += e.weight * e.rate.offset();
        for (const RateTerm& t : e.rate.terms()) {
            rep.lhs_coefficients[t.power] += e.weight * t.coef;
            magnitude += std::abs(e.weight * t.coef);
        }
    }
    rep.combined_coefficients = rep.lhs_coefficients;
    rep.combined_constant = rep.lhs_constant + rho.offset() - c1;
    for (const RateTerm& t : rho.terms()) {
        rep.combined_coefficients[t.power] += t.coef;
        magnitude += t.coef;
    }

    const double coef_tol = 1e-12 * std::max(1.0, magnitude);
    rep.termwise_pass = rep.combined_constant <= coef_tol;
    for (auto [p, c] : rep.combined_coefficients)
        if (c > coef_tol) rep.termwise_pass = false;

    rep.grid_pass = true;
    rep.worst_slack = -std::numeric_limits<double>::infinity();
    const int nr = std::max(1, grid.r_count);
    const int ns = std::max(2, grid.s_count);
    for (int ir = 0; ir < nr; ++ir) {
        const double r = nr == 1 ? 0.0 : grid.r_max * ir / (nr - 1);
        for (int is = 0; is < ns; ++is) {
            const double s = grid.s_max * is / (ns - 1);
            double lhs = 0.0, scale = 1.0;
            for (const WeightedRate& e : input.entries) {
                const double v = e.rate(r, s);
                lhs += e.weight * v;
                scale += std::abs(e.weight * v);
            }
            const double slack = lhs + rho(r, s) - c1;
            if (slack > rep.worst_slack) {
                rep.worst_slack = slack;
                rep.worst_r = r;
                rep.worst_s = s;
            }
            if (slack > 1e-12 * scale) rep.grid_pass = false;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Summability of  sum_i exp(-rho(tau_i, t - tau_i))
// ---------------------------------------------------------------------------

/// Partial sums over the switching instants (tau_0 = 0 included): for each
/// horizon t, sums exp(-rho(tau_i, t - tau_i)) over all tau_i <= t.
inline std::vector<double> summability_partial_sums(const RateFunction& rho,
                                                    std::span<const double> switch_instants,
                                                    std::span<const double> horizons) {
    std::vector<double> sums;
    sums.reserve(horizons.size());
    for (double t : horizons) {
        double sum = 0.0;
        for (double tau : switch_instants) {
            if (tau > t) break;
            sum += std::exp(-rho(tau, t - tau));
        }
        sums.push_back(sum);
    }
    return sums;
}

struct SummabilityReport {
    std::vector<double> sums;              // one per horizon
    bool stabilized = false;               // tail changes < 1e-9
    double c2_estimate = 0.0;              // max observed partial sum
    double max_tail_change = 0.0;          // over the last 20% of horizons
    bool nondecreasing_in_terms = true;    // truncation monotonicity at final horizon
};

/// Empirical check of the summability condition for a concrete signal over a
/// horizon list. Declares the series numerically summable when successive
/// sums change by less than 1e-9 over the last 20% of horizons. Requires
/// rho(0,0) = 0 as the certificate condition does.
inline SummabilityReport summability_estimate(const RateFunction& rho,
                                              std::span<const double> switch_instants,
                                              std::span<const double> horizons) {
    if (rho.offset() != 0.0)
        throw RateFunctionError("summability_estimate requires rho(0,0) = 0");
    SummabilityReport rep;
    rep.sums = summability_partial_sums(rho, switch_instants, horizons);
    if (rep.sums.empty()) return rep;
    rep.c2_estimate = *std::max_element(rep.sums.begin(), rep.sums.end());

    const std::size_t n = rep.sums.size();
    const std::size_t tail_start = n - std::max<std::size_t>(1, n / 5);
    for (std::size_t i = std::max<std::size_t>(tail_start, 1); i < n; ++i)
        rep.max_tail_change = std::max(rep.max_tail_change,
                                       std::abs(rep.sums[i] - rep.sums[i - 1]));
    rep.stabilized = n >= 2 && rep.max_tail_change < 1e-9;

    // Partial sums are nondecreasing in the number of retained switch terms.
    const double t_final = horizons.back();
    double acc = 0.0, prev = 0.0;
    for (double tau : switch_instants) {
        if (tau > t_final) break;
        acc += std::exp(-rho(tau, t_final - tau));
        if (acc < prev) rep.nondecreasing_in_terms = false;
        prev = acc;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Tail bounds for equispaced worst-case placements
// ---------------------------------------------------------------------------

/// Geometric-series bound for rho(r,s) = k1*s + k2 with equispaced gaps d:
/// exp(-k2) * (1 + N0 + 1/(exp(k1*d) - 1)).
inline double affine_tail_bound(double k1, double k2, double d, double n0) {
    if (k1 <= 0.0 || d <= 0.0) throw RateFunctionError("affine_tail_bound needs k1, d > 0");
    return std::exp(-k2) * (1.0 + n0 + 1.0 / std::expm1(k1 * d));
}

/// Integral-test bound for rho(r,s) = k1*s^(3/2) + k2 with equispaced gaps d:
/// exp(-k2) * (1 + N0 + I), I = integral_0^inf exp(-k1 d^(3/2) x^(3/2)) dx,
/// computed by adaptive quadrature.
inline double three_halves_tail_bound(double k1, double k2, double d, double n0,
                                       double quad_tol = 1e-10) {
    if (k1 <= 0.0 || d <= 0.0)
        throw RateFunctionError("three_halves_tail_bound needs k1, d > 0");
    const double a = k1 * std::pow(d, 1.5);
    // Truncate where the integrand underflows any reasonable tolerance:
    // a * X^(3/2) = 60 gives a tail below exp(-60)/(a sqrt(X)).
    const double cutoff = std::pow(60.0 / a, 2.0 / 3.0);
    const double integral = adaptive_simpson(
        [a](double x) { return std::exp(-a * std::pow(x, 1.5)); }, 0.0, cutoff, quad_tol);
    return std::exp(-k2) * (1.0 + n0 + integral);
}

}  // namespace swsys
