// Hand-built SCMs shared by the unit and acceptance tests.
#pragma once

#include "causal/scm.hpp"

namespace fixture {

/// X -> T, X -> Y, T -> Y with Y = 2 T + X + e: constant effect 2.
inline causal::Scm constant_effect_scm(std::uint64_t seed) {
    causal::CausalGraph g({"X", "T", "Y"});
    g.add_directed("X", "T");
    g.add_directed("X", "Y");
    g.add_directed("T", "Y");
    auto scm = causal::make_scm(g, causal::MechanismFamily::linear, seed, 1.0);
    scm.mechanisms[1].custom = [](std::span<const double> p) { return 0.8 * p[0]; };
    scm.mechanisms[2].custom = [](std::span<const double> p) { return p[0] + 2.0 * p[1]; };
    return scm;
}

/// Same graph with Y = T (1 + X) + X + e and X ~ N(0, 1): the effect varies
/// with X and averages to 1.
inline causal::Scm heterogeneous_effect_scm(std::uint64_t seed) {
    auto scm = constant_effect_scm(seed);
    scm.mechanisms[2].custom = [](std::span<const double> p) { return p[1] * (1.0 + p[0]) + p[0]; };
    return scm;
}

}  // namespace fixture
