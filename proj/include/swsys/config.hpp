#pragma once

// =============================================================================
// JSON project configuration: schema, validation, and loading.
// =============================================================================
// Validation collects every error (with a field path) instead of stopping at
// the first; load_config throws a ConfigError carrying the full list.
// =============================================================================

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsys/expr.hpp"
#include "swsys/family.hpp"
#include "swsys/ratefn.hpp"
#include "swsys/signal.hpp"

namespace swsys {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors)
        : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
    const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    static std::string join(const std::vector<std::string>& errors) {
        std::string out = "configuration invalid:";
        for (const std::string& e : errors) out += "\n  " + e;
        return out;
    }
    std::vector<std::string> errors_;
};

struct SignalSpec {
    enum class Kind { Inline, Admissible, WorstCase, Adt };
    Kind kind = Kind::Inline;
    SwitchingSignal inline_signal;
    double t_end = 0.0;  // generator horizon
    std::vector<int> mode_cycle;
    double tau_a = 1.0;
    double n0 = 1.0;
    double jitter = 0.0;
    std::uint64_t seed = 0;
    double check_grid_step = 0.01;
    bool offset_switches = true;
};

struct CertificateSpec {
    RateFunction rho;
    double c1 = 0.0;
    std::vector<double> horizons;
    GridSpec grid;
    std::vector<RateTerm> reference_lhs_terms;  // declared coefficient claims, if any
};

struct SimulationSpec {
    std::vector<std::string> input_texts;
    std::vector<Expr> inputs;  // expressions in t
    double t_end = 1.0;
    double dt = 1e-3;
    Box batch_box;
    int n_runs = 1;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> x0;  // pinned initial state
    bool write_trajectories = false;
};

struct ChecksSpec {
    Box state_box;
    Box input_box;
    int n_samples = 2000;
    std::uint64_t seed = 7;
};

struct ProjectConfig {
    SwitchedFamily family;
    RateBoundSet bounds;
    std::optional<CertificateSpec> certificate;
    std::optional<SimulationSpec> simulation;
    std::optional<SignalSpec> signal;
    ChecksSpec checks;
};

namespace detail_config {

using nlohmann::json;

struct Errors {
    std::vector<std::string> list;
    void add(const std::string& path, const std::string& what) { list.push_back(path + ": " + what); }
};

inline const json* get_member(const json& j, const std::string& key, const std::string& path,
                              Errors& errs, bool required) {
    if (!j.is_object()) {
        errs.add(path, "expected an object");
        return nullptr;
    }
    auto it = j.find(key);
    if (it == j.end()) {
        if (required) errs.add(path + "." + key, "missing");
        return nullptr;
    }
    return &*it;
}

inline std::optional<double> as_number(const json& j, const std::string& path, Errors& errs) {
    if (!j.is_number()) {
        errs.add(path, "expected a number");
        return std::nullopt;
    }
    return j.get<double>();
}

inline std::optional<int> as_int(const json& j, const std::string& path, Errors& errs) {
    if (j.is_number_integer()) return j.get<int>();
    if (j.is_number()) {
        double v = j.get<double>();
        if (v == static_cast<int>(v)) return static_cast<int>(v);
    }
    errs.add(path, "expected an integer");
    return std::nullopt;
}

inline std::optional<std::string> as_string(const json& j, const std::string& path, Errors& errs) {
    if (!j.is_string()) {
        errs.add(path, "expected a string");
        return std::nullopt;
    }
    return j.get<std::string>();
}

inline std::optional<Expr> parse_expr_field(const json& j, const std::string& path,
                                            const std::set<std::string>& vars, Errors& errs) {
    auto text = as_string(j, path, errs);
    if (!text) return std::nullopt;
    try {
        return parse_expression(*text, vars);
    } catch (const ExprError& e) {
        errs.add(path, e.what());
        return std::nullopt;
    }
}

inline std::optional<std::vector<RateTerm>> parse_rate_terms(const json& j,
                                                             const std::string& path,
                                                             Errors& errs) {
    std::vector<RateTerm> terms;
    bool ok = true;
    if (const json* jt = get_member(j, "terms", path, errs, true)) {
        if (!jt->is_array()) {
            errs.add(path + ".terms", "expected an array");
            ok = false;
        } else {
            for (std::size_t i = 0; i < jt->size(); ++i) {
                const std::string tpath = path + ".terms[" + std::to_string(i) + "]";
                const json& term = (*jt)[i];
                auto coef = get_member(term, "coef", tpath, errs, true);
                auto power = get_member(term, "power", tpath, errs, true);
                auto c = coef ? as_number(*coef, tpath + ".coef", errs) : std::nullopt;
                auto p = power ? as_number(*power, tpath + ".power", errs) : std::nullopt;
                if (c && p)
                    terms.push_back({*c, *p});
                else
                    ok = false;
            }
        }
    } else {
        ok = false;
    }
    if (!ok) return std::nullopt;
    return terms;
}

/// Bound-entry rates live in the 'terms' array alone; the entry's 'offset'
/// key is the additive constant of the inequality, not part of the rate.
inline std::optional<RateFunction> parse_bound_rate(const json& j, const std::string& path,
                                                    Errors& errs) {
    auto terms = parse_rate_terms(j, path, errs);
    if (!terms) return std::nullopt;
    try {
        return RateFunction(std::move(*terms), 0.0);
    } catch (const RateFunctionError& e) {
        errs.add(path, e.what());
        return std::nullopt;
    }
}

/// Standalone rate object {terms, offset}: the offset here is the rate's own
/// constant term k2 (used by the certificate's rho).
inline std::optional<RateFunction> parse_rate(const json& j, const std::string& path,
                                              Errors& errs) {
    if (!j.is_object()) {
        errs.add(path, "expected an object with 'terms' (and optional 'offset')");
        return std::nullopt;
    }
    auto terms = parse_rate_terms(j, path, errs);
    double offset = 0.0;
    bool ok = terms.has_value();
    if (const json* jo = get_member(j, "offset", path, errs, false)) {
        auto v = as_number(*jo, path + ".offset", errs);
        if (v)
            offset = *v;
        else
            ok = false;
    }
    if (!ok) return std::nullopt;
    try {
        return RateFunction(std::move(*terms), offset);
    } catch (const RateFunctionError& e) {
        errs.add(path, e.what());
        return std::nullopt;
    }
}

inline std::optional<Box> parse_box(const json& j, const std::string& path, std::size_t dim,
                                    Errors& errs) {
    if (!j.is_array() || j.size() != dim) {
        errs.add(path, "expected an array of " + std::to_string(dim) + " [lo, hi] pairs");
        return std::nullopt;
    }
    Box box;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string ipath = path + "[" + std::to_string(i) + "]";
        const json& r = j[i];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            errs.add(ipath, "expected [lo, hi]");
            return std::nullopt;
        }
        double lo = r[0].get<double>(), hi = r[1].get<double>();
        if (!(lo <= hi)) {
            errs.add(ipath, "lo must be <= hi");
            return std::nullopt;
        }
        box.ranges.push_back({lo, hi});
    }
    return box;
}

inline std::set<std::string> dynamics_vars(int d, int m) {
    std::set<std::string> vars;
    for (int i = 1; i <= d; ++i) vars.insert("x" + std::to_string(i));
    for (int i = 1; i <= m; ++i) vars.insert("v" + std::to_string(i));
    return vars;
}

inline std::set<std::string> state_vars(int d) {
    std::set<std::string> vars;
    for (int i = 1; i <= d; ++i) vars.insert("x" + std::to_string(i));
    return vars;
}

inline void parse_family(const json& j, ProjectConfig& cfg, Errors& errs) {
    SwitchedFamily& fam = cfg.family;
    const std::string path = "family";

    int d = 0, m = 0;
    if (const json* jd = get_member(j, "state_dim", path, errs, true)) {
        auto v = as_int(*jd, path + ".state_dim", errs);
        if (v && *v >= 1)
            d = *v;
        else if (v)
            errs.add(path + ".state_dim", "must be >= 1");
    }
    if (const json* jm = get_member(j, "input_dim", path, errs, true)) {
        auto v = as_int(*jm, path + ".input_dim", errs);
        if (v && *v >= 0)
            m = *v;
        else if (v)
            errs.add(path + ".input_dim", "must be >= 0");
    }
    fam.state_dim = d;
    fam.input_dim = m;
    if (d == 0) return;  // nothing sensible to parse below

    const auto dyn_vars = dynamics_vars(d, m);
    const auto v_vars = state_vars(d);

    if (const json* jmodes = get_member(j, "modes", path, errs, true)) {
        if (!jmodes->is_array() || jmodes->empty()) {
            errs.add(path + ".modes", "expected a nonempty array");
        } else {
            for (std::size_t i = 0; i < jmodes->size(); ++i) {
                const std::string mpath = path + ".modes[" + std::to_string(i) + "]";
                const json& jm2 = (*jmodes)[i];
                SubsystemSpec sub;
                sub.index = static_cast<int>(i) + 1;
                if (const json* jf = get_member(jm2, "f", mpath, errs, true)) {
                    if (!jf->is_array() || static_cast<int>(jf->size()) != d) {
                        errs.add(mpath + ".f",
                                 "expected " + std::to_string(d) + " component expressions");
                    } else {
                        for (std::size_t k = 0; k < jf->size(); ++k) {
                            auto e = parse_expr_field(
                                (*jf)[k], mpath + ".f[" + std::to_string(k) + "]", dyn_vars, errs);
                            if (e) sub.f.push_back(*e);
                        }
                    }
                }
                if (const json* jv = get_member(jm2, "V", mpath, errs, true)) {
                    auto e = parse_expr_field(*jv, mpath + ".V", v_vars, errs);
                    if (e) sub.V = *e;
                }
                if (const json* jl = get_member(jm2, "lambda", mpath, errs, true)) {
                    auto v = as_number(*jl, mpath + ".lambda", errs);
                    if (v) {
                        sub.lambda = *v;
                        if (*v == 0.0) errs.add(mpath + ".lambda", "must be nonzero");
                    }
                }
                fam.subsystems.push_back(std::move(sub));
            }
        }
    }

    const int n = fam.n_modes();
    if (const json* jt = get_member(j, "transitions", path, errs, true)) {
        if (!jt->is_array()) {
            errs.add(path + ".transitions", "expected an array");
        } else {
            for (std::size_t i = 0; i < jt->size(); ++i) {
                const std::string tpath = path + ".transitions[" + std::to_string(i) + "]";
                const json& tr = (*jt)[i];
                auto jfrom = get_member(tr, "from", tpath, errs, true);
                auto jto = get_member(tr, "to", tpath, errs, true);
                auto jmu = get_member(tr, "mu", tpath, errs, true);
                auto from = jfrom ? as_int(*jfrom, tpath + ".from", errs) : std::nullopt;
                auto to = jto ? as_int(*jto, tpath + ".to", errs) : std::nullopt;
                auto mu_v = jmu ? as_number(*jmu, tpath + ".mu", errs) : std::nullopt;
                if (!from || !to || !mu_v) continue;
                if (*from < 1 || *from > n)
                    errs.add(tpath + ".from", "mode " + std::to_string(*from) + " not in family (modes 1.." +
                                                  std::to_string(n) + ")");
                else if (*to < 1 || *to > n)
                    errs.add(tpath + ".to", "mode " + std::to_string(*to) + " not in family (modes 1.." +
                                                std::to_string(n) + ")");
                else if (*from == *to)
                    errs.add(tpath, "self-loops are not admissible");
                else if (!(*mu_v > 0.0))
                    errs.add(tpath + ".mu", "must be > 0");
                else if (fam.transitions.contains({*from, *to}))
                    errs.add(tpath, "duplicate transition");
                else {
                    fam.transitions.insert({*from, *to});
                    fam.mu[{*from, *to}] = *mu_v;
                }
            }
        }
    }

    auto parse_kinfty = [&](const char* key, KInftyPower& out) {
        if (const json* jk = get_member(j, key, path, errs, true)) {
            const std::string kpath = path + "." + key;
            auto jc = get_member(*jk, "coef", kpath, errs, true);
            auto jp = get_member(*jk, "power", kpath, errs, true);
            auto c = jc ? as_number(*jc, kpath + ".coef", errs) : std::nullopt;
            auto p = jp ? as_number(*jp, kpath + ".power", errs) : std::nullopt;
            if (c && p) {
                if (!(*c > 0.0) || !(*p > 0.0))
                    errs.add(kpath, "coef and power must be > 0");
                else
                    out = {*c, *p};
            }
        }
    };
    parse_kinfty("alpha_lower", fam.alpha_lower);
    parse_kinfty("alpha_upper", fam.alpha_upper);

    if (const json* jg = get_member(j, "gamma", path, errs, true)) {
        auto e = parse_expr_field(*jg, path + ".gamma", std::set<std::string>{"r"}, errs);
        if (e) fam.gamma = *e;
    }
}

inline void parse_bounds(const json& j, ProjectConfig& cfg, Errors& errs) {
    const int n = cfg.family.n_modes();
    auto mode_ok = [&](int mode) { return mode >= 1 && mode <= n; };

    auto parse_mode_entries = [&](const char* key, std::map<int, BoundedRate>& out,
                                  bool want_iss) {
        const json* arr = get_member(j, key, "bounds", errs, true);
        if (!arr) return;
        if (!arr->is_array()) {
            errs.add(std::string("bounds.") + key, "expected an array");
            return;
        }
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string path = "bounds." + std::string(key) + "[" + std::to_string(i) + "]";
            const json& entry = (*arr)[i];
            auto jm = get_member(entry, "mode", path, errs, true);
            auto jo = get_member(entry, "offset", path, errs, true);
            auto mode = jm ? as_int(*jm, path + ".mode", errs) : std::nullopt;
            auto offset = jo ? as_number(*jo, path + ".offset", errs) : std::nullopt;
            auto rate = parse_bound_rate(entry, path, errs);
            if (!mode || !offset || !rate) continue;
            if (!mode_ok(*mode)) {
                errs.add(path + ".mode", "mode " + std::to_string(*mode) + " not in family (modes 1.." +
                                             std::to_string(n) + ")");
                continue;
            }
            if (!(*offset > 0.0)) {
                errs.add(path + ".offset", "must be > 0");
                continue;
            }
            const double lambda = cfg.family.subsystem(*mode).lambda;
            if (want_iss && !(lambda > 0.0))
                errs.add(path + ".mode", "mode " + std::to_string(*mode) + " is not an ISS mode");
            else if (!want_iss && !(lambda < 0.0))
                errs.add(path + ".mode", "mode " + std::to_string(*mode) + " is not a non-ISS mode");
            else
                out[*mode] = {*rate, *offset};
        }
    };
    parse_mode_entries("iss", cfg.bounds.iss, true);
    parse_mode_entries("non_iss", cfg.bounds.non_iss, false);

    const json* arr = get_member(j, "switching", "bounds", errs, true);
    if (arr && arr->is_array()) {
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const std::string path = "bounds.switching[" + std::to_string(i) + "]";
            const json& entry = (*arr)[i];
            auto jf = get_member(entry, "from", path, errs, true);
            auto jt = get_member(entry, "to", path, errs, true);
            auto jo = get_member(entry, "offset", path, errs, true);
            auto from = jf ? as_int(*jf, path + ".from", errs) : std::nullopt;
            auto to = jt ? as_int(*jt, path + ".to", errs) : std::nullopt;
            auto offset = jo ? as_number(*jo, path + ".offset", errs) : std::nullopt;
            auto rate = parse_bound_rate(entry, path, errs);
            if (!from || !to || !offset || !rate) continue;
            if (!cfg.family.transitions.contains({*from, *to})) {
                errs.add(path, "pair (" + std::to_string(*from) + "," + std::to_string(*to) +
                                   ") not in the family's transitions");
                continue;
            }
            if (!(*offset > 0.0)) {
                errs.add(path + ".offset", "must be > 0");
                continue;
            }
            cfg.bounds.switching[{*from, *to}] = {*rate, *offset};
        }
    } else if (arr) {
        errs.add("bounds.switching", "expected an array");
    }
}

inline void parse_certificate(const json& j, ProjectConfig& cfg, Errors& errs) {
    CertificateSpec spec;
    const std::string path = "certificate";
    if (const json* jr = get_member(j, "rho", path, errs, true)) {
        auto rate = parse_rate(*jr, path + ".rho", errs);
        if (rate) spec.rho = *rate;
    }
    if (const json* jc = get_member(j, "c1", path, errs, true)) {
        auto v = as_number(*jc, path + ".c1", errs);
        if (v) spec.c1 = *v;
    }
    if (const json* jh = get_member(j, "horizons", path, errs, true)) {
        if (jh->is_array()) {
            double prev = 0.0;
            for (std::size_t i = 0; i < jh->size(); ++i) {
                auto v = as_number((*jh)[i], path + ".horizons[" + std::to_string(i) + "]", errs);
                if (!v) continue;
                if (!(*v > prev))
                    errs.add(path + ".horizons[" + std::to_string(i) + "]",
                             "must be positive and increasing");
                spec.horizons.push_back(*v);
                prev = *v;
            }
        } else if (jh->is_object()) {
            auto js = get_member(*jh, "start", path + ".horizons", errs, true);
            auto je = get_member(*jh, "stop", path + ".horizons", errs, true);
            auto jn = get_member(*jh, "count", path + ".horizons", errs, true);
            auto start = js ? as_number(*js, path + ".horizons.start", errs) : std::nullopt;
            auto stop = je ? as_number(*je, path + ".horizons.stop", errs) : std::nullopt;
            auto count = jn ? as_int(*jn, path + ".horizons.count", errs) : std::nullopt;
            std::string spacing = "linear";
            if (const json* jsp = get_member(*jh, "spacing", path + ".horizons", errs, false)) {
                auto s = as_string(*jsp, path + ".horizons.spacing", errs);
                if (s) spacing = *s;
            }
            if (start && stop && count) {
                if (!(*start > 0.0) || !(*stop > *start) || *count < 2) {
                    errs.add(path + ".horizons", "need 0 < start < stop and count >= 2");
                } else if (spacing == "linear") {
                    for (int i = 0; i < *count; ++i)
                        spec.horizons.push_back(*start +
                                                (*stop - *start) * i / (*count - 1));
                } else if (spacing == "log") {
                    const double ls = std::log(*start), le = std::log(*stop);
                    for (int i = 0; i < *count; ++i)
                        spec.horizons.push_back(std::exp(ls + (le - ls) * i / (*count - 1)));
                } else {
                    errs.add(path + ".horizons.spacing", "must be 'linear' or 'log'");
                }
            }
        } else {
            errs.add(path + ".horizons", "expected an array or {start, stop, count, spacing}");
        }
    }
    if (const json* jg = get_member(j, "grid", path, errs, false)) {
        auto read = [&](const char* key, double& target) {
            if (const json* f = get_member(*jg, key, path + ".grid", errs, false)) {
                auto v = as_number(*f, path + ".grid." + std::string(key), errs);
                if (v) target = *v;
            }
        };
        auto read_int = [&](const char* key, int& target) {
            if (const json* f = get_member(*jg, key, path + ".grid", errs, false)) {
                auto v = as_int(*f, path + ".grid." + std::string(key), errs);
                if (v) target = *v;
            }
        };
        read("s_max", spec.grid.s_max);
        read_int("s_count", spec.grid.s_count);
        read("r_max", spec.grid.r_max);
        read_int("r_count", spec.grid.r_count);
    }
    if (const json* jref = get_member(j, "reference_lhs_terms", path, errs, false)) {
        if (!jref->is_array()) {
            errs.add(path + ".reference_lhs_terms", "expected an array");
        } else {
            for (std::size_t i = 0; i < jref->size(); ++i) {
                const std::string tpath =
                    path + ".reference_lhs_terms[" + std::to_string(i) + "]";
                auto jc = get_member((*jref)[i], "coef", tpath, errs, true);
                auto jp = get_member((*jref)[i], "power", tpath, errs, true);
                auto c = jc ? as_number(*jc, tpath + ".coef", errs) : std::nullopt;
                auto p = jp ? as_number(*jp, tpath + ".power", errs) : std::nullopt;
                if (c && p) spec.reference_lhs_terms.push_back({*c, *p});
            }
        }
    }
    cfg.certificate = std::move(spec);
}

inline void parse_signal(const json& j, ProjectConfig& cfg, Errors& errs) {
    SignalSpec spec;
    const std::string path = "signal";
    std::string kind = "inline";
    if (const json* jk = get_member(j, "type", path, errs, true)) {
        auto s = as_string(*jk, path + ".type", errs);
        if (s) kind = *s;
    }
    const int n = cfg.family.n_modes();

    auto parse_cycle = [&]() {
        if (const json* jc = get_member(j, "mode_cycle", path, errs, true)) {
            if (!jc->is_array() || jc->size() < 2) {
                errs.add(path + ".mode_cycle", "expected an array of at least two modes");
                return;
            }
            for (std::size_t i = 0; i < jc->size(); ++i) {
                auto v = as_int((*jc)[i], path + ".mode_cycle[" + std::to_string(i) + "]", errs);
                if (!v) continue;
                if (*v < 1 || *v > n)
                    errs.add(path + ".mode_cycle[" + std::to_string(i) + "]",
                             "mode " + std::to_string(*v) + " not in family (modes 1.." +
                                 std::to_string(n) + ")");
                else
                    spec.mode_cycle.push_back(*v);
            }
            for (std::size_t i = 0; i + 1 <= spec.mode_cycle.size() && spec.mode_cycle.size() >= 2;
                 ++i) {
                const int from = spec.mode_cycle[i];
                const int to = spec.mode_cycle[(i + 1) % spec.mode_cycle.size()];
                if (!cfg.family.transitions.contains({from, to}))
                    errs.add(path + ".mode_cycle",
                             "transition " + std::to_string(from) + "->" + std::to_string(to) +
                                 " not in the family's transitions");
            }
        }
    };
    auto opt_number = [&](const char* key, double& target, bool required) {
        if (const json* f = get_member(j, key, path, errs, required)) {
            auto v = as_number(*f, path + "." + std::string(key), errs);
            if (v) target = *v;
        }
    };

    if (kind == "inline") {
        spec.kind = SignalSpec::Kind::Inline;
        const json* jt = get_member(j, "taus", path, errs, true);
        const json* jm = get_member(j, "modes", path, errs, true);
        if (jt && jm) {
            if (!jt->is_array() || !jm->is_array() || jt->size() != jm->size() || jt->empty()) {
                errs.add(path, "taus and modes must be nonempty arrays of equal length");
            } else {
                for (std::size_t i = 0; i < jt->size(); ++i) {
                    auto tau = as_number((*jt)[i], path + ".taus[" + std::to_string(i) + "]", errs);
                    auto mode = as_int((*jm)[i], path + ".modes[" + std::to_string(i) + "]", errs);
                    if (tau) spec.inline_signal.taus.push_back(*tau);
                    if (mode) {
                        if (*mode < 1 || *mode > n)
                            errs.add(path + ".modes[" + std::to_string(i) + "]",
                                     "mode " + std::to_string(*mode) +
                                         " not in family (modes 1.." + std::to_string(n) + ")");
                        spec.inline_signal.modes.push_back(*mode);
                    }
                }
                if (spec.inline_signal.taus.size() == spec.inline_signal.modes.size()) {
                    try {
                        spec.inline_signal.validate();
                        if (spec.inline_signal.n_switches() > 0)
                            spec.inline_signal.validate_transitions(cfg.family.transitions);
                    } catch (const SignalError& e) {
                        errs.add(path, e.what());
                    }
                }
            }
        }
    } else if (kind == "admissible") {
        spec.kind = SignalSpec::Kind::Admissible;
        opt_number("t_end", spec.t_end, true);
        parse_cycle();
    } else if (kind == "worst_case") {
        spec.kind = SignalSpec::Kind::WorstCase;
        opt_number("t_end", spec.t_end, true);
        parse_cycle();
        if (const json* f = get_member(j, "offset_switches", path, errs, false)) {
            if (f->is_boolean())
                spec.offset_switches = f->get<bool>();
            else
                errs.add(path + ".offset_switches", "expected a boolean");
        }
    } else if (kind == "adt") {
        spec.kind = SignalSpec::Kind::Adt;
        opt_number("t_end", spec.t_end, true);
        opt_number("tau_a", spec.tau_a, true);
        opt_number("n0", spec.n0, true);
        opt_number("jitter", spec.jitter, false);
        parse_cycle();
        if (const json* f = get_member(j, "seed", path, errs, false)) {
            auto v = as_int(*f, path + ".seed", errs);
            if (v) spec.seed = static_cast<std::uint64_t>(*v);
        }
        if (!(spec.tau_a > 0.0)) errs.add(path + ".tau_a", "must be > 0");
    } else {
        errs.add(path + ".type", "unknown signal type '" + kind +
                                     "' (inline | admissible | worst_case | adt)");
        return;
    }
    opt_number("check_grid_step", spec.check_grid_step, false);
    if (!(spec.check_grid_step > 0.0)) errs.add(path + ".check_grid_step", "must be > 0");
    cfg.signal = std::move(spec);
}

inline void parse_simulation(const json& j, ProjectConfig& cfg, Errors& errs) {
    SimulationSpec spec;
    const std::string path = "simulation";
    if (const json* ji = get_member(j, "input", path, errs, true)) {
        if (!ji->is_array() || static_cast<int>(ji->size()) != cfg.family.input_dim) {
            errs.add(path + ".input", "expected " + std::to_string(cfg.family.input_dim) +
                                          " expressions in t");
        } else {
            for (std::size_t i = 0; i < ji->size(); ++i) {
                const std::string ipath = path + ".input[" + std::to_string(i) + "]";
                auto text = as_string((*ji)[i], ipath, errs);
                if (!text) continue;
                auto e = parse_expr_field((*ji)[i], ipath, std::set<std::string>{"t"}, errs);
                if (e) {
                    spec.input_texts.push_back(*text);
                    spec.inputs.push_back(*e);
                }
            }
        }
    }
    auto num = [&](const char* key, double& target, bool required) {
        if (const json* f = get_member(j, key, path, errs, required)) {
            auto v = as_number(*f, path + "." + std::string(key), errs);
            if (v) target = *v;
        }
    };
    num("t_end", spec.t_end, true);
    num("dt", spec.dt, true);
    if (!(spec.t_end > 0.0)) errs.add(path + ".t_end", "must be > 0");
    if (!(spec.dt > 0.0)) errs.add(path + ".dt", "must be > 0");
    if (const json* jb = get_member(j, "batch_box", path, errs, true)) {
        auto box = parse_box(*jb, path + ".batch_box",
                             static_cast<std::size_t>(cfg.family.state_dim), errs);
        if (box) spec.batch_box = *box;
    }
    if (const json* jn = get_member(j, "n_runs", path, errs, true)) {
        auto v = as_int(*jn, path + ".n_runs", errs);
        if (v) {
            spec.n_runs = *v;
            if (*v < 1) errs.add(path + ".n_runs", "must be >= 1");
        }
    }
    if (const json* js = get_member(j, "seed", path, errs, false)) {
        auto v = as_int(*js, path + ".seed", errs);
        if (v) spec.seed = static_cast<std::uint64_t>(*v);
    }
    if (const json* jx = get_member(j, "x0", path, errs, false)) {
        if (!jx->is_array() || static_cast<int>(jx->size()) != cfg.family.state_dim) {
            errs.add(path + ".x0", "expected " + std::to_string(cfg.family.state_dim) + " numbers");
        } else {
            std::vector<double> x0;
            for (std::size_t i = 0; i < jx->size(); ++i) {
                auto v = as_number((*jx)[i], path + ".x0[" + std::to_string(i) + "]", errs);
                if (v) x0.push_back(*v);
            }
            if (static_cast<int>(x0.size()) == cfg.family.state_dim) spec.x0 = std::move(x0);
        }
    }
    spec.write_trajectories = spec.n_runs == 1;
    if (const json* jw = get_member(j, "write_trajectories", path, errs, false)) {
        if (jw->is_boolean())
            spec.write_trajectories = jw->get<bool>();
        else
            errs.add(path + ".write_trajectories", "expected a boolean");
    }
    cfg.simulation = std::move(spec);
}

inline void parse_checks(const json* j, ProjectConfig& cfg, Errors& errs) {
    // Defaults sized by the family.
    cfg.checks.state_box.ranges.assign(static_cast<std::size_t>(std::max(1, cfg.family.state_dim)),
                                       {-10.0, 10.0});
    cfg.checks.input_box.ranges.assign(static_cast<std::size_t>(std::max(1, cfg.family.input_dim)),
                                       {-1.0, 1.0});
    if (!j) return;
    const std::string path = "checks";
    if (const json* jb = get_member(*j, "state_box", path, errs, false)) {
        auto box = parse_box(*jb, path + ".state_box",
                             static_cast<std::size_t>(cfg.family.state_dim), errs);
        if (box) cfg.checks.state_box = *box;
    }
    if (const json* jb = get_member(*j, "input_box", path, errs, false)) {
        auto box =
            parse_box(*jb, path + ".input_box",
                      static_cast<std::size_t>(std::max(1, cfg.family.input_dim)), errs);
        if (box) cfg.checks.input_box = *box;
    }
    if (const json* jn = get_member(*j, "n_samples", path, errs, false)) {
        auto v = as_int(*jn, path + ".n_samples", errs);
        if (v) {
            cfg.checks.n_samples = *v;
            if (*v < 1) errs.add(path + ".n_samples", "must be >= 1");
        }
    }
    if (const json* js = get_member(*j, "seed", path, errs, false)) {
        auto v = as_int(*js, path + ".seed", errs);
        if (v) cfg.checks.seed = static_cast<std::uint64_t>(*v);
    }
}

}  // namespace detail_config

/// Parses and validates a configuration document. Collects all errors.
inline ProjectConfig parse_config_json(const nlohmann::json& root) {
    detail_config::Errors errs;
    ProjectConfig cfg;
    if (!root.is_object()) {
        errs.add("config", "top level must be an object");
        throw ConfigError(std::move(errs.list));
    }

    if (const auto* jf = detail_config::get_member(root, "family", "config", errs, true))
        detail_config::parse_family(*jf, cfg, errs);
    if (cfg.family.n_modes() > 0) {
        if (const auto* jb = detail_config::get_member(root, "bounds", "config", errs, true))
            detail_config::parse_bounds(*jb, cfg, errs);
        if (const auto* jc = detail_config::get_member(root, "certificate", "config", errs, false))
            detail_config::parse_certificate(*jc, cfg, errs);
        if (const auto* js = detail_config::get_member(root, "signal", "config", errs, false))
            detail_config::parse_signal(*js, cfg, errs);
        if (const auto* jm = detail_config::get_member(root, "simulation", "config", errs, false))
            detail_config::parse_simulation(*jm, cfg, errs);
        detail_config::parse_checks(
            root.contains("checks") ? &root.at("checks") : nullptr, cfg, errs);
    }

    if (errs.list.empty()) {
        try {
            cfg.family.validate();
            cfg.bounds.validate();
        } catch (const std::runtime_error& e) {
            errs.add("config", e.what());
        }
    }
    if (!errs.list.empty()) throw ConfigError(std::move(errs.list));
    return cfg;
}

inline ProjectConfig parse_config_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({std::string("config: JSON parse error: ") + e.what()});
    }
    return parse_config_json(root);
}

/// Loads a configuration file; throws ConfigError with every validation
/// problem found (I/O and JSON syntax problems included).
inline ProjectConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"config: cannot open " + path.string()});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace swsys
