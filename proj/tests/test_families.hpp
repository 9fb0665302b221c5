#pragma once

// Families used across the test suites.

#include <cmath>
#include <set>
#include <string>

#include "swsys/family.hpp"
#include "swsys/signal.hpp"

namespace test_support {

/// Scalar xdot = -x + v with V = x^2/2, lambda = 1, gamma(r) = r^2/2,
/// sandwich 0.25 r^2 <= V <= r^2. No admissible transitions.
inline swsys::SwitchedFamily scalar_linear_family() {
    using swsys::parse_expression;
    swsys::SwitchedFamily fam;
    fam.state_dim = 1;
    fam.input_dim = 1;
    const std::set<std::string> vars = {"x1", "v1"};
    swsys::SubsystemSpec sub;
    sub.index = 1;
    sub.f = {parse_expression("-x1 + v1", vars)};
    sub.V = parse_expression("0.5*x1^2", {"x1"});
    sub.lambda = 1.0;
    fam.subsystems.push_back(sub);
    fam.alpha_lower = {0.25, 2.0};
    fam.alpha_upper = {1.0, 2.0};
    fam.gamma = parse_expression("0.5*r^2", {"r"});
    fam.validate();
    return fam;
}

/// The bundled two-mode example: one contracting and one expanding
/// subsystem coupled through sine terms, quadratic V's, mu_12 = 1,
/// mu_21 = 2, zero gain.
inline swsys::SwitchedFamily sec4_family() {
    using swsys::parse_expression;
    swsys::SwitchedFamily fam;
    fam.state_dim = 2;
    fam.input_dim = 1;
    const std::set<std::string> vars = {"x1", "x2", "v1"};
    const std::set<std::string> state_only = {"x1", "x2"};

    swsys::SubsystemSpec s1;
    s1.index = 1;
    s1.f = {parse_expression("-x1 + sin(x1 - x2)", vars),
            parse_expression("-x2 + 0.8*sin(x2 - x1) + 0.5*v1", vars)};
    s1.V = parse_expression("0.5*(x1^2 + 1.25*x2^2)", state_only);
    s1.lambda = 1.75;
    fam.subsystems.push_back(s1);

    swsys::SubsystemSpec s2;
    s2.index = 2;
    s2.f = {parse_expression("x1 + sin(x1 - x2)", vars),
            parse_expression("x2 + sin(x2 - x1) + 0.5*v1", vars)};
    s2.V = parse_expression("0.5*(x1^2 + x2^2)", state_only);
    s2.lambda = -2.1667;
    fam.subsystems.push_back(s2);

    fam.transitions = {{1, 2}, {2, 1}};
    fam.mu[{1, 2}] = 1.0;
    fam.mu[{2, 1}] = 2.0;
    fam.alpha_lower = {0.5, 2.0};
    fam.alpha_upper = {0.625, 2.0};
    fam.gamma = parse_expression("0", {"r"});
    fam.validate();
    return fam;
}

/// Bound set matching sec4_family's switching constraints.
inline swsys::RateBoundSet sec4_bound_set() {
    swsys::RateBoundSet b;
    b.iss[1] = {swsys::RateFunction({{0.2030, 1.0}, {0.0001, 1.5}}), 0.01};
    b.non_iss[2] = {swsys::RateFunction({{0.1, 1.0}}), 2.58};
    b.switching[{1, 2}] = {swsys::RateFunction({{0.1, 1.0}, {0.05, 1.5}}), 1.0};
    b.switching[{2, 1}] = {swsys::RateFunction({{0.2, 1.0}, {0.0025, 1.5}}), 1.0};
    return b;
}

/// Scalar-family bound set: identity ISS rate with offset 1.
inline swsys::RateBoundSet scalar_linear_bound_set() {
    swsys::RateBoundSet b;
    b.iss[1] = {swsys::RateFunction::linear(1.0), 1.0};
    return b;
}

}  // namespace test_support
