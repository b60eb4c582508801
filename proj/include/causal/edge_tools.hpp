#pragma once

#include "causal/graph.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace causal {

enum class Verdict { yes, no, uncertain };

std::string_view to_string(Verdict v);

/// Three-valued edge-level answer. `witnesses` is non-empty exactly when the
/// verdict is yes: collider names, a rendered backdoor path, or the edge.
struct EdgeVerdict {
    Verdict verdict = Verdict::uncertain;
    std::vector<std::string> witnesses;
    std::string narrative;
};

/// Undirected edges are resolved by quantifying over the consistent DAG
/// extensions of `g`; a truncated enumeration answers uncertain.
EdgeVerdict determine_direct_cause(const CausalGraph& g, std::string_view x, std::string_view y,
                                   std::size_t cap = kDefaultExtensionCap);
EdgeVerdict determine_collider(const CausalGraph& g, std::string_view x, std::string_view y,
                               std::size_t cap = kDefaultExtensionCap);
EdgeVerdict determine_confounder(const CausalGraph& g, std::string_view x, std::string_view y,
                                 std::size_t cap = kDefaultExtensionCap);

/// Backdoor paths from x that also end with an edge into y, i.e. the
/// collider-free treks through a common cause. Sorted shortest first, then
/// lexicographically.
std::vector<BackdoorPath> common_cause_paths(const CausalGraph& dag, std::string_view x, std::string_view y);

}  // namespace causal
