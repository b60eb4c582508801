#pragma once

#include <cstddef>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace causal {

enum class EdgeKind { directed, undirected };

struct Edge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::directed;

    bool operator==(const Edge&) const = default;
};

/// Mixed graph over named variables with directed and undirected edges.
///
/// Every node pair carries at most one edge. The directed part is kept
/// acyclic: any mutation that would close a directed cycle throws GraphError.
class CausalGraph {
public:
    using Index = std::size_t;

    CausalGraph() = default;
    explicit CausalGraph(std::vector<std::string> nodes);

    const std::vector<std::string>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const std::string& name(Index i) const { return nodes_[i]; }
    std::optional<Index> find(std::string_view name) const;
    Index index_of(std::string_view name) const;

    bool has_directed(Index from, Index to) const { return mark(from, to) == kOut; }
    bool has_undirected(Index a, Index b) const { return mark(a, b) == kUndirected; }
    bool adjacent(Index a, Index b) const { return mark(a, b) != kNone; }
    bool has_edge_into(Index target, Index from) const { return has_directed(from, target); }

    void add_directed(Index from, Index to);
    void add_undirected(Index a, Index b);
    /// Replaces the undirected edge a-b by from->to.
    void orient(Index from, Index to);
    void remove_edge(Index a, Index b);
    /// True when from->to would close a directed cycle.
    bool would_create_cycle(Index from, Index to) const;

    void add_directed(std::string_view from, std::string_view to) { add_directed(index_of(from), index_of(to)); }
    void add_undirected(std::string_view a, std::string_view b) { add_undirected(index_of(a), index_of(b)); }

    std::vector<Index> parents(Index i) const;
    std::vector<Index> children(Index i) const;
    std::vector<Index> undirected_neighbors(Index i) const;
    std::vector<Index> adjacents(Index i) const;

    /// Directed edges ordered by (from, to) index.
    std::vector<std::pair<Index, Index>> directed_edges() const;
    /// Undirected edges as (a, b) with a < b, ordered.
    std::vector<std::pair<Index, Index>> undirected_edges() const;
    /// All edges by name, in canonical pair order.
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;
    bool is_fully_directed() const;

    /// Subgraph over the named nodes (in the given order).
    CausalGraph induced(std::span<const std::string> names) const;

    bool operator==(const CausalGraph& other) const = default;

private:
    enum : std::uint8_t { kNone = 0, kOut = 1, kIn = 2, kUndirected = 3 };

    std::uint8_t mark(Index a, Index b) const { return marks_[a * nodes_.size() + b]; }
    void set_mark(Index a, Index b, std::uint8_t ab);
    void check_pair(Index a, Index b) const;

    std::vector<std::string> nodes_;
    std::vector<std::uint8_t> marks_;
};

/// An unblocked backdoor path from its first node to its last.
struct BackdoorPath {
    std::vector<std::string> nodes;

    bool operator==(const BackdoorPath&) const = default;
    auto operator<=>(const BackdoorPath&) const = default;
};

struct DagExtensions {
    std::vector<CausalGraph> dags;
    bool truncated = false;
};

inline constexpr std::size_t kDefaultExtensionCap = 1024;

/// d-separation on a fully directed graph (reachability over active trails).
bool d_separated(const CausalGraph& dag, std::string_view x, std::string_view y,
                 std::span<const std::string> given);
bool d_separated(const CausalGraph& dag, CausalGraph::Index x, CausalGraph::Index y,
                 const std::vector<bool>& given);

/// Collider-free simple paths x <- ... y with at least three nodes, sorted
/// lexicographically by node names.
std::vector<BackdoorPath> find_backdoor_paths(const CausalGraph& dag, std::string_view x, std::string_view y);

/// Common children k with x->k<-y in the directed part, sorted by name.
std::vector<std::string> v_structure_colliders(const CausalGraph& g, std::string_view x, std::string_view y);

/// Unshielded colliders (a, k, b) with a < b, a->k<-b and a, b non-adjacent.
std::vector<std::tuple<CausalGraph::Index, CausalGraph::Index, CausalGraph::Index>> v_structures(const CausalGraph& g);

/// Acyclic orientations of the undirected edges that introduce no new
/// v-structure. Throws GraphError when none exists.
DagExtensions enumerate_dag_extensions(const CausalGraph& g, std::size_t cap = kDefaultExtensionCap);

/// Applies Meek rules R1-R4 until nothing changes. Orientations that would
/// close a cycle are skipped. Returns the number of edges oriented.
std::size_t apply_meek_rules(CausalGraph& g);

CausalGraph cpdag_of_dag(const CausalGraph& dag);

bool same_skeleton(const CausalGraph& a, const CausalGraph& b);
/// Pairwise mark mismatches: a missing, extra or differently oriented edge counts once.
std::size_t structural_hamming_distance(const CausalGraph& a, const CausalGraph& b);

/// Canonical JSON document {"nodes": [...], "edges": [{from, to, kind}]}.
std::string serialize_graph(const CausalGraph& g);
CausalGraph parse_graph(std::string_view text);

}  // namespace causal
