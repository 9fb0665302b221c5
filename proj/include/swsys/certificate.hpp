#pragma once

// =============================================================================
// Certificate assembly: the trajectory-estimate quantities psi1/psi2, the
// Lyapunov cascade bound, the full certificate with envelope functions beta
// and chi, and the average-dwell-time embeddings.
// =============================================================================
// Index conventions for the nested sum. With switching instants
// tau_0 = 0 < tau_1 < ... < tau_N <= t and p_i = modes[i]:
//
//   psi1(t) = exp(-sum_{i=0..N} lambda_{p_i} * Sh_{i+1}
//                 + sum_{i=0..N-1} ln mu_{p_i p_{i+1}})
//   psi2(t) = sum_{i=0..N} exp(e_i) * (1 - exp(-lambda_{p_i} Sh_{i+1})) / lambda_{p_i}
//   e_i     = -sum_{k=i+1..N} lambda_{p_k} Sh_{k+1}
//             + sum_{k=i..N-1} ln mu_{p_k p_{k+1}}
//
// where Sh_{i+1} is the holding time truncated at t (the final partial
// interval ]tau_N, t] uses Sh = t - tau_N and an empty downstream product).
// The downstream mu product for interval i covers exactly the switches in
// ]tau_i, t]; unrolling the per-interval Gronwall recursion forces this
// convention, and the duration-form identity below confirms it.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swsys/family.hpp"
#include "swsys/ratefn.hpp"
#include "swsys/signal.hpp"

namespace swsys {

namespace detail_cert {

struct TruncatedSignal {
    std::vector<double> taus;   // tau_0..tau_N (<= t)
    std::vector<int> modes;     // p_0..p_N
    double t = 0.0;

    double hold(std::size_t i) const {  // Sh_{i+1}
        return (i + 1 < taus.size() ? taus[i + 1] : t) - taus[i];
    }
};

inline TruncatedSignal truncate(const SwitchingSignal& sig, double t) {
    if (!(t > 0.0)) throw SignalError("horizon must be positive");
    sig.validate();
    TruncatedSignal out;
    out.t = t;
    for (std::size_t i = 0; i < sig.taus.size() && sig.taus[i] <= t; ++i) {
        out.taus.push_back(sig.taus[i]);
        out.modes.push_back(sig.modes[i]);
    }
    return out;
}

}  // namespace detail_cert

/// psi1 from holding times and the mu product over the switches in ]0, t].
inline double compute_psi1(const SwitchedFamily& fam, const SwitchingSignal& sig, double t) {
    auto ts = detail_cert::truncate(sig, t);
    double exponent = 0.0;
    for (std::size_t i = 0; i < ts.taus.size(); ++i)
        exponent -= fam.subsystem(ts.modes[i]).lambda * ts.hold(i);
    for (std::size_t i = 0; i + 1 < ts.taus.size(); ++i)
        exponent += std::log(fam.mu_at(ts.modes[i], ts.modes[i + 1]));
    return std::exp(exponent);
}

/// psi1 from activation durations and switch counts; equals compute_psi1.
inline double compute_psi1_durations(const SwitchedFamily& fam, const SwitchingSignal& sig,
                                     double t) {
    double exponent = 0.0;
    for (const SubsystemSpec& s : fam.subsystems) {
        // -|lambda_j| T_S for ISS modes, +|lambda_k| T_U for non-ISS modes.
        exponent -= s.lambda * activation_duration(sig, s.index, 0.0, t);
    }
    for (const auto& [pair, mu_value] : fam.mu)
        exponent += std::log(mu_value) * switch_count(sig, pair.first, pair.second, 0.0, t);
    return std::exp(exponent);
}

/// psi2: nested sum over holding intervals with downstream exponential and
/// mu factors, final partial interval included.
inline double compute_psi2(const SwitchedFamily& fam, const SwitchingSignal& sig, double t) {
    auto ts = detail_cert::truncate(sig, t);
    const std::size_t n = ts.taus.size();
    double sum = 0.0;
    double e_i = 0.0;  // downstream exponent, e_{N} = 0
    for (std::size_t ri = 0; ri < n; ++ri) {
        const std::size_t i = n - 1 - ri;
        const double lambda = fam.subsystem(ts.modes[i]).lambda;
        const double hold = ts.hold(i);
        sum += std::exp(e_i) * (1.0 - std::exp(-lambda * hold)) / lambda;
        if (i > 0) {
            e_i += -lambda * hold + std::log(fam.mu_at(ts.modes[i - 1], ts.modes[i]));
        }
    }
    return sum;
}

/// Certified upper bound psi1(t) V_{sigma(0)}(x0) + v_sup_gain * psi2(t) on
/// V_{sigma(t)}(x(t)); v_sup_gain is gamma evaluated at the input sup norm.
inline double lyapunov_cascade_bound(const SwitchedFamily& fam, const SwitchingSignal& sig,
                                     std::span<const double> x0, double v_sup_gain, double t) {
    std::map<std::string, double> bindings;
    for (std::size_t i = 0; i < x0.size(); ++i) bindings["x" + std::to_string(i + 1)] = x0[i];
    const double v0 = fam.subsystem(sig.initial_mode()).V.evaluate(bindings);
    return compute_psi1(fam, sig, t) * v0 + v_sup_gain * compute_psi2(fam, sig, t);
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

struct ISSCertificate {
    double c = 0.0;         // offset aggregate
    double c1 = 0.0;
    double c2 = 0.0;        // empirical summability bound
    double psi_bar2 = 0.0;  // empirical sup of the weighted exponential sums
    RateFunction rho;       // rho(0,0) = 0
    KInftyPower alpha_upper;
    Expr gamma;

    /// beta(r, s) = alpha_upper(r) * exp(c + c1 - rho(0, s)); class KL.
    double beta(double r, double s) const {
        return alpha_upper(r) * std::exp(c + c1 - rho(0.0, s));
    }

    /// chi(r) = gamma(r) * psi_bar2.
    double chi(double r) const { return gamma.evaluate({{"r", r}}) * psi_bar2; }
};

struct CertificateRefusal {
    std::string condition;  // which condition failed
    std::string witness;
};

struct CertificateOutcome {
    std::optional<ISSCertificate> certificate;
    std::optional<CertificateRefusal> refusal;
    RateConditionReport rate_condition;
    std::vector<SummabilityReport> summability;  // one per signal
    double c = 0.0;
    double c2 = 0.0;
    double psi_bar2 = 0.0;

    bool issued() const { return certificate.has_value(); }
};

/// Builds the weighted-sum condition input from family and bounds.
inline RateConditionInput make_rate_condition_input(const SwitchedFamily& fam,
                                               const RateBoundSet& bounds) {
    RateConditionInput input;
    for (const auto& [mode, b] : bounds.iss) {
        const double lam = std::abs(fam.subsystem(mode).lambda);
        input.entries.push_back({-lam, b.rate, "S" + std::to_string(mode)});
    }
    for (const auto& [mode, b] : bounds.non_iss) {
        const double lam = std::abs(fam.subsystem(mode).lambda);
        input.entries.push_back({lam, b.rate, "U" + std::to_string(mode)});
    }
    for (const auto& [pair, b] : bounds.switching) {
        const double w = std::log(fam.mu_at(pair.first, pair.second));
        input.entries.push_back({w, b.rate,
                                 std::to_string(pair.first) + "->" + std::to_string(pair.second)});
    }
    return input;
}

/// Offset aggregate c. The envelope algebra needs the |lambda|/ln(mu)
/// weighted offset sum; the certificate invariant also requires c to
/// dominate the unweighted sum, so the larger of the two is used.
inline double offset_aggregate(const SwitchedFamily& fam, const RateBoundSet& bounds) {
    double weighted = 0.0, unweighted = 0.0;
    for (const auto& [mode, b] : bounds.iss) {
        weighted += std::abs(fam.subsystem(mode).lambda) * b.offset;
        unweighted += b.offset;
    }
    for (const auto& [mode, b] : bounds.non_iss) {
        weighted += std::abs(fam.subsystem(mode).lambda) * b.offset;
        unweighted += b.offset;
    }
    for (const auto& [pair, b] : bounds.switching) {
        weighted += std::log(fam.mu_at(pair.first, pair.second)) * b.offset;
        unweighted += b.offset;
    }
    return std::max(weighted, unweighted);
}

/// Runs the two certificate conditions and, when both hold, assembles the
/// certificate. psi_bar2 is the empirical supremum over the supplied signals
/// and horizons of the two weighted sums of exp(c + c1 - rho(tau, t - tau))
/// terms (ISS part indexed at tau_{i+1}, clamped to t for the final
/// interval; non-ISS part at tau_i). A refusal names the failed condition
/// and a witness; it is a value, not an error.
inline CertificateOutcome assemble_certificate(const SwitchedFamily& fam,
                                               const RateBoundSet& bounds,
                                               const RateFunction& rho, double c1,
                                               std::span<const double> horizons,
                                               std::span<const SwitchingSignal> signals,
                                               const GridSpec& grid = {}) {
    CertificateOutcome out;

    if (rho.offset() != 0.0) {
        out.refusal = {"rho(0,0)=0 precondition",
                       "rho(0,0) = " + format_double(rho.offset())};
        return out;
    }
    if (signals.empty()) {
        out.refusal = {"summability condition", "no signals supplied to estimate the summability bound"};
        return out;
    }

    out.rate_condition = check_condition_c1(make_rate_condition_input(fam, bounds), rho, c1, grid);
    out.c = offset_aggregate(fam, bounds);

    bool summable = true;
    std::string summability_witness;
    out.c2 = 0.0;
    for (const SwitchingSignal& sig : signals) {
        auto rep = summability_estimate(rho, sig, horizons);
        out.c2 = std::max(out.c2, rep.c2_estimate);
        if (!rep.stabilized) {
            summable = false;
            summability_witness = "partial sums still changing by " +
                                  format_double(rep.max_tail_change) + " at the horizon tail";
        }
        out.summability.push_back(std::move(rep));
    }

    // Empirical psi_bar2 components.
    double sup_s = 0.0, sup_u = 0.0;
    for (const SwitchingSignal& sig : signals) {
        for (double t : horizons) {
            auto ts = detail_cert::truncate(sig, t);
            double sum_s = 0.0, sum_u = 0.0;
            for (std::size_t i = 0; i < ts.taus.size(); ++i) {
                const double tau_next = i + 1 < ts.taus.size() ? ts.taus[i + 1] : t;
                sum_s += std::exp(-rho(tau_next, t - tau_next));
                sum_u += std::exp(-rho(ts.taus[i], t - ts.taus[i]));
            }
            sup_s = std::max(sup_s, sum_s);
            sup_u = std::max(sup_u, sum_u);
        }
    }
    ModePartition part = partition_modes(fam);
    double inv_lambda_s = 0.0, inv_lambda_u = 0.0;
    for (int m : part.iss) inv_lambda_s += 1.0 / std::abs(fam.subsystem(m).lambda);
    for (int m : part.non_iss) inv_lambda_u += 1.0 / std::abs(fam.subsystem(m).lambda);
    out.psi_bar2 = std::exp(out.c + c1) * (inv_lambda_s * sup_s + inv_lambda_u * sup_u);

    if (!out.rate_condition.pass()) {
        out.refusal = {"rate condition",
                       "worst slack " + format_double(out.rate_condition.worst_slack) + " at (r,s)=(" +
                           format_double(out.rate_condition.worst_r) + ", " +
                           format_double(out.rate_condition.worst_s) + ")"};
        return out;
    }
    if (!summable) {
        out.refusal = {"summability condition", summability_witness};
        return out;
    }

    ISSCertificate cert;
    cert.c = out.c;
    cert.c1 = c1;
    cert.c2 = out.c2;
    cert.psi_bar2 = out.psi_bar2;
    cert.rho = rho;
    cert.alpha_upper = fam.alpha_upper;
    cert.gamma = fam.gamma;
    out.certificate = std::move(cert);
    return out;
}

// ---------------------------------------------------------------------------
// Average dwell time embeddings
// ---------------------------------------------------------------------------

struct AdtMixedResult {
    bool holds = false;
    double threshold = 0.0;  // ln(mu) / (lambda_s (1 - rho_bar) - lambda_u rho_bar)
    double epsilon = 0.0;    // proof slack when the embedding holds
    std::optional<RateConditionReport> rate_condition;
};

/// Mixed ISS/non-ISS embedding with uniform |lambda| and mu: the embedding
/// holds iff tau_a strictly exceeds the threshold. When it holds, the
/// induced linear rates (sum rho_S = (1 - rho_bar) s, sum rho_U = rho_bar s,
/// sum rho_mn = s / tau_a) are re-verified against the weighted-sum
/// condition with c1 = 0 and rho(s) = (ln mu) eps s (slope
/// lambda_s (1-rho_bar) - lambda_u rho_bar - ln(mu)/tau_a).
inline AdtMixedResult check_adt_mixed(double lambda_s, double lambda_u, double mu,
                                      double rho_bar, double tau_a, const GridSpec& grid = {}) {
    if (!(lambda_s > 0.0) || !(lambda_u > 0.0) || !(mu > 0.0) || !(tau_a > 0.0))
        throw FamilyError("check_adt_mixed requires positive lambda_s, lambda_u, mu, tau_a");
    const double rho_bar_max = lambda_s / (lambda_s + lambda_u);
    if (!(rho_bar > 0.0) || !(rho_bar < rho_bar_max))
        throw FamilyError("rho_bar must lie in ]0, lambda_s/(lambda_s+lambda_u)[");

    AdtMixedResult res;
    const double kappa = lambda_s * (1.0 - rho_bar) - lambda_u * rho_bar;  // > 0
    res.threshold = std::log(mu) / kappa;
    res.holds = tau_a > res.threshold;
    if (!res.holds) return res;

    const double slope = kappa - std::log(mu) / tau_a;  // = ln(mu) * eps, > 0
    res.epsilon = std::log(mu) > 0.0 ? slope / std::log(mu) : 0.0;
    RateConditionInput input;
    input.entries.push_back({-lambda_s, RateFunction::linear(1.0 - rho_bar), "S"});
    input.entries.push_back({lambda_u, RateFunction::linear(rho_bar), "U"});
    input.entries.push_back({std::log(mu), RateFunction::linear(1.0 / tau_a), "N"});
    res.rate_condition = check_condition_c1(input, RateFunction::linear(slope), 0.0, grid);
    return res;
}

struct AdtAllIssResult {
    bool holds = false;
    double threshold = 0.0;  // ln(mu) / lambda0
    std::optional<RateConditionReport> rate_condition;
};

/// All-ISS embedding with uniform lambda0 and mu: holds iff
/// tau_a > ln(mu)/lambda0. Re-verified with sum rho_S = s and
/// sum rho_mn = s / tau_a.
inline AdtAllIssResult check_adt_all_iss(double lambda0, double mu, double tau_a,
                                         const GridSpec& grid = {}) {
    if (!(lambda0 > 0.0) || !(mu > 0.0) || !(tau_a > 0.0))
        throw FamilyError("check_adt_all_iss requires positive lambda0, mu, tau_a");
    AdtAllIssResult res;
    res.threshold = std::log(mu) / lambda0;
    res.holds = tau_a > res.threshold;
    if (!res.holds) return res;

    const double slope = lambda0 - std::log(mu) / tau_a;  // > 0
    RateConditionInput input;
    input.entries.push_back({-lambda0, RateFunction::linear(1.0), "S"});
    input.entries.push_back({std::log(mu), RateFunction::linear(1.0 / tau_a), "N"});
    res.rate_condition = check_condition_c1(input, RateFunction::linear(slope), 0.0, grid);
    return res;
}

/// Family wrapper: extracts the uniform constants, requiring |lambda| to be
/// uniform on each class and mu uniform on E.
inline AdtMixedResult check_adt_mixed(const SwitchedFamily& fam, double rho_bar, double tau_a,
                                      const GridSpec& grid = {}) {
    ModePartition part = partition_modes(fam);
    if (part.iss.empty() || part.non_iss.empty())
        throw FamilyError("mixed embedding needs both ISS and non-ISS modes");
    auto uniform_abs = [&](const std::vector<int>& modes) {
        const double v = std::abs(fam.subsystem(modes.front()).lambda);
        for (int m : modes)
            if (std::abs(std::abs(fam.subsystem(m).lambda) - v) > 1e-12)
                throw FamilyError("embedding requires uniform |lambda| per class");
        return v;
    };
    double mu_value = 0.0;
    bool first = true;
    for (const auto& [pair, m] : fam.mu) {
        if (first) {
            mu_value = m;
            first = false;
        } else if (std::abs(m - mu_value) > 1e-12) {
            throw FamilyError("embedding requires uniform mu");
        }
    }
    if (first) throw FamilyError("embedding requires at least one admissible transition");
    return check_adt_mixed(uniform_abs(part.iss), uniform_abs(part.non_iss), mu_value, rho_bar,
                           tau_a, grid);
}

inline AdtAllIssResult check_adt_all_iss(const SwitchedFamily& fam, double tau_a,
                                         const GridSpec& grid = {}) {
    ModePartition part = partition_modes(fam);
    if (!part.non_iss.empty())
        throw FamilyError("all-ISS embedding requires an empty non-ISS class");
    const double lambda0 = std::abs(fam.subsystem(part.iss.front()).lambda);
    for (int m : part.iss)
        if (std::abs(std::abs(fam.subsystem(m).lambda) - lambda0) > 1e-12)
            throw FamilyError("embedding requires uniform |lambda|");
    double mu_value = 0.0;
    bool first = true;
    for (const auto& [pair, m] : fam.mu) {
        if (first) {
            mu_value = m;
            first = false;
        } else if (std::abs(m - mu_value) > 1e-12) {
            throw FamilyError("embedding requires uniform mu");
        }
    }
    if (first) throw FamilyError("embedding requires at least one admissible transition");
    return check_adt_all_iss(lambda0, mu_value, tau_a, grid);
}

}  // namespace swsys
