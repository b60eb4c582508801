#include "causal/graph.hpp"

#include "causal/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <set>

namespace causal {

using Index = CausalGraph::Index;

CausalGraph::CausalGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    std::set<std::string_view> seen;
    for (const auto& n : nodes_) {
        if (n.empty()) throw GraphError("empty node name");
        if (!seen.insert(n).second) throw GraphError("duplicate node name '" + n + "'");
    }
    marks_.assign(nodes_.size() * nodes_.size(), kNone);
}

std::optional<Index> CausalGraph::find(std::string_view name) const {
    const auto it = std::find(nodes_.begin(), nodes_.end(), name);
    if (it == nodes_.end()) return std::nullopt;
    return static_cast<Index>(it - nodes_.begin());
}

Index CausalGraph::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw GraphError("unknown node '" + std::string(name) + "'");
}

void CausalGraph::check_pair(Index a, Index b) const {
    if (a >= size() || b >= size()) throw GraphError("node index out of range");
    if (a == b) throw GraphError("self-loop on '" + nodes_[a] + "'");
}

void CausalGraph::set_mark(Index a, Index b, std::uint8_t ab) {
    const std::size_t n = size();
    marks_[a * n + b] = ab;
    std::uint8_t ba = ab;
    if (ab == kOut) ba = kIn;
    else if (ab == kIn) ba = kOut;
    marks_[b * n + a] = ba;
}

bool CausalGraph::would_create_cycle(Index from, Index to) const {
    // A cycle appears iff `from` is reachable from `to` along directed edges.
    if (from == to) return true;
    std::vector<bool> seen(size(), false);
    std::vector<Index> stack{to};
    seen[to] = true;
    while (!stack.empty()) {
        const Index v = stack.back();
        stack.pop_back();
        for (Index w = 0; w < size(); ++w) {
            if (!seen[w] && has_directed(v, w)) {
                if (w == from) return true;
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return false;
}

void CausalGraph::add_directed(Index from, Index to) {
    check_pair(from, to);
    if (adjacent(from, to)) throw GraphError("edge between '" + nodes_[from] + "' and '" + nodes_[to] + "' already exists");
    if (would_create_cycle(from, to)) throw GraphError("edge " + nodes_[from] + " -> " + nodes_[to] + " closes a directed cycle");
    set_mark(from, to, kOut);
}

void CausalGraph::add_undirected(Index a, Index b) {
    check_pair(a, b);
    if (adjacent(a, b)) throw GraphError("edge between '" + nodes_[a] + "' and '" + nodes_[b] + "' already exists");
    set_mark(a, b, kUndirected);
}

void CausalGraph::orient(Index from, Index to) {
    check_pair(from, to);
    if (!has_undirected(from, to)) throw GraphError("no undirected edge between '" + nodes_[from] + "' and '" + nodes_[to] + "'");
    if (would_create_cycle(from, to)) throw GraphError("orienting " + nodes_[from] + " -> " + nodes_[to] + " closes a directed cycle");
    set_mark(from, to, kOut);
}

void CausalGraph::remove_edge(Index a, Index b) {
    check_pair(a, b);
    set_mark(a, b, kNone);
}

std::vector<Index> CausalGraph::parents(Index i) const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
        if (has_directed(j, i)) out.push_back(j);
    return out;
}

std::vector<Index> CausalGraph::children(Index i) const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
        if (has_directed(i, j)) out.push_back(j);
    return out;
}

std::vector<Index> CausalGraph::undirected_neighbors(Index i) const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
        if (has_undirected(i, j)) out.push_back(j);
    return out;
}

std::vector<Index> CausalGraph::adjacents(Index i) const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
        if (adjacent(i, j)) out.push_back(j);
    return out;
}

std::vector<std::pair<Index, Index>> CausalGraph::directed_edges() const {
    std::vector<std::pair<Index, Index>> out;
    for (Index i = 0; i < size(); ++i)
        for (Index j = 0; j < size(); ++j)
            if (has_directed(i, j)) out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<Index, Index>> CausalGraph::undirected_edges() const {
    std::vector<std::pair<Index, Index>> out;
    for (Index i = 0; i < size(); ++i)
        for (Index j = i + 1; j < size(); ++j)
            if (has_undirected(i, j)) out.emplace_back(i, j);
    return out;
}

std::vector<Edge> CausalGraph::edges() const {
    std::vector<Edge> out;
    for (Index i = 0; i < size(); ++i) {
        for (Index j = i + 1; j < size(); ++j) {
            switch (mark(i, j)) {
                case kOut: out.push_back({nodes_[i], nodes_[j], EdgeKind::directed}); break;
                case kIn: out.push_back({nodes_[j], nodes_[i], EdgeKind::directed}); break;
                case kUndirected: out.push_back({nodes_[i], nodes_[j], EdgeKind::undirected}); break;
                default: break;
            }
        }
    }
    return out;
}

std::size_t CausalGraph::edge_count() const {
    std::size_t count = 0;
    for (Index i = 0; i < size(); ++i)
        for (Index j = i + 1; j < size(); ++j)
            if (adjacent(i, j)) ++count;
    return count;
}

bool CausalGraph::is_fully_directed() const {
    return std::none_of(marks_.begin(), marks_.end(), [](std::uint8_t m) { return m == kUndirected; });
}

CausalGraph CausalGraph::induced(std::span<const std::string> names) const {
    CausalGraph sub(std::vector<std::string>(names.begin(), names.end()));
    std::vector<Index> idx;
    for (const auto& n : names) idx.push_back(index_of(n));
    for (Index a = 0; a < idx.size(); ++a) {
        for (Index b = a + 1; b < idx.size(); ++b) {
            sub.set_mark(a, b, mark(idx[a], idx[b]));
        }
    }
    return sub;
}

namespace {

void require_dag(const CausalGraph& g, const char* what) {
    if (!g.is_fully_directed()) throw GraphError(std::string(what) + " requires a fully directed graph");
}

// Nodes that are in `given` or have a descendant in it.
std::vector<bool> ancestors_of_set(const CausalGraph& g, const std::vector<bool>& given) {
    std::vector<bool> anc(g.size(), false);
    std::vector<Index> stack;
    for (Index i = 0; i < g.size(); ++i) {
        if (given[i]) {
            anc[i] = true;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const Index v = stack.back();
        stack.pop_back();
        for (Index p : g.parents(v)) {
            if (!anc[p]) {
                anc[p] = true;
                stack.push_back(p);
            }
        }
    }
    return anc;
}

}  // namespace

bool d_separated(const CausalGraph& dag, Index x, Index y, const std::vector<bool>& given) {
    require_dag(dag, "d-separation");
    if (x == y) throw GraphError("d-separation query needs two distinct nodes");
    if (given.size() != dag.size()) throw GraphError("conditioning mask size mismatch");
    if (given[x] || given[y]) throw GraphError("query endpoints must not be conditioned on");

    const auto anc = ancestors_of_set(dag, given);
    // State: (node, arrived_from_child). Arriving from a child means the
    // trail is travelling "up" against the edge direction.
    const std::size_t n = dag.size();
    std::vector<bool> visited(2 * n, false);
    std::deque<std::pair<Index, bool>> queue{{x, true}};
    while (!queue.empty()) {
        const auto [v, up] = queue.front();
        queue.pop_front();
        const std::size_t key = 2 * v + (up ? 1 : 0);
        if (visited[key]) continue;
        visited[key] = true;
        if (v == y) return false;
        if (up) {
            if (given[v]) continue;
            for (Index p : dag.parents(v)) queue.emplace_back(p, true);
            for (Index c : dag.children(v)) queue.emplace_back(c, false);
        } else {
            if (!given[v]) {
                for (Index c : dag.children(v)) queue.emplace_back(c, false);
            }
            if (anc[v]) {
                for (Index p : dag.parents(v)) queue.emplace_back(p, true);
            }
        }
    }
    return true;
}

bool d_separated(const CausalGraph& dag, std::string_view x, std::string_view y, std::span<const std::string> given) {
    std::vector<bool> mask(dag.size(), false);
    for (const auto& z : given) mask[dag.index_of(z)] = true;
    return d_separated(dag, dag.index_of(x), dag.index_of(y), mask);
}

std::vector<BackdoorPath> find_backdoor_paths(const CausalGraph& dag, std::string_view x_name, std::string_view y_name) {
    require_dag(dag, "backdoor path search");
    const Index x = dag.index_of(x_name);
    const Index y = dag.index_of(y_name);
    if (x == y) throw GraphError("backdoor path query needs two distinct nodes");

    std::vector<BackdoorPath> out;
    std::vector<Index> path{x};
    std::vector<bool> on_path(dag.size(), false);
    on_path[x] = true;

    auto extend = [&](auto&& self) -> void {
        const Index v = path.back();
        if (v == y) {
            if (path.size() >= 3) {
                BackdoorPath p;
                for (Index i : path) p.nodes.push_back(dag.name(i));
                out.push_back(std::move(p));
            }
            return;
        }
        const Index prev = path[path.size() - 2];
        for (Index w : dag.adjacents(v)) {
            if (on_path[w]) continue;
            // v is a collider on prev - v - w when both edges point into v.
            if (dag.has_directed(prev, v) && dag.has_directed(w, v)) continue;
            on_path[w] = true;
            path.push_back(w);
            self(self);
            path.pop_back();
            on_path[w] = false;
        }
    };

    for (Index p : dag.parents(x)) {
        on_path[p] = true;
        path.push_back(p);
        extend(extend);
        path.pop_back();
        on_path[p] = false;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> v_structure_colliders(const CausalGraph& g, std::string_view x_name, std::string_view y_name) {
    const Index x = g.index_of(x_name);
    const Index y = g.index_of(y_name);
    if (x == y) throw GraphError("collider query needs two distinct nodes");
    std::vector<std::string> out;
    for (Index k = 0; k < g.size(); ++k) {
        if (g.has_directed(x, k) && g.has_directed(y, k)) out.push_back(g.name(k));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::tuple<Index, Index, Index>> v_structures(const CausalGraph& g) {
    std::vector<std::tuple<Index, Index, Index>> out;
    for (Index k = 0; k < g.size(); ++k) {
        const auto pa = g.parents(k);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            for (std::size_t j = i + 1; j < pa.size(); ++j) {
                if (!g.adjacent(pa[i], pa[j])) out.emplace_back(pa[i], k, pa[j]);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

DagExtensions enumerate_dag_extensions(const CausalGraph& g, std::size_t cap) {
    if (cap == 0) throw GraphError("extension cap must be at least 1");
    const auto pending = g.undirected_edges();
    DagExtensions result;
    CausalGraph work = g;

    // Orienting from->to adds a new v-structure iff `to` already has a parent
    // that is not adjacent to `from`. Original v-structures only involve edges
    // that were directed in g, so they never trip this check.
    auto creates_v_structure = [&](Index from, Index to) {
        for (Index p = 0; p < work.size(); ++p) {
            if (p != from && work.has_directed(p, to) && !work.adjacent(p, from)) return true;
        }
        return false;
    };

    bool stop = false;
    auto recurse = [&](auto&& self, std::size_t k) -> void {
        if (stop) return;
        if (k == pending.size()) {
            if (result.dags.size() == cap) {
                result.truncated = true;
                stop = true;
                return;
            }
            result.dags.push_back(work);
            return;
        }
        const auto [a, b] = pending[k];
        for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
            if (work.would_create_cycle(from, to) || creates_v_structure(from, to)) continue;
            work.orient(from, to);
            self(self, k + 1);
            work.remove_edge(from, to);
            work.add_undirected(from, to);
            if (stop) return;
        }
    };
    recurse(recurse, 0);
    if (result.dags.empty()) throw GraphError("graph admits no consistent DAG extension");
    return result;
}

namespace {

bool meek_r1(const CausalGraph& g, Index i, Index j) {
    for (Index k = 0; k < g.size(); ++k) {
        if (k != j && g.has_directed(k, i) && !g.adjacent(k, j)) return true;
    }
    return false;
}

bool meek_r2(const CausalGraph& g, Index i, Index j) {
    for (Index k = 0; k < g.size(); ++k) {
        if (g.has_directed(i, k) && g.has_directed(k, j)) return true;
    }
    return false;
}

bool meek_r3(const CausalGraph& g, Index i, Index j) {
    const auto nb = g.undirected_neighbors(i);
    for (std::size_t a = 0; a < nb.size(); ++a) {
        const Index k = nb[a];
        if (k == j || !g.has_directed(k, j)) continue;
        for (std::size_t b = a + 1; b < nb.size(); ++b) {
            const Index l = nb[b];
            if (l != j && g.has_directed(l, j) && !g.adjacent(k, l)) return true;
        }
    }
    return false;
}

bool meek_r4(const CausalGraph& g, Index i, Index j) {
    for (Index k : g.undirected_neighbors(i)) {
        if (k == j || g.adjacent(k, j)) continue;
        for (Index l : g.children(k)) {
            if (l != i && g.has_directed(l, j) && g.adjacent(i, l)) return true;
        }
    }
    return false;
}

}  // namespace

std::size_t apply_meek_rules(CausalGraph& g) {
    std::size_t oriented = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [a, b] : g.undirected_edges()) {
            if (!g.has_undirected(a, b)) continue;
            for (const auto& [i, j] : {std::pair{a, b}, std::pair{b, a}}) {
                if (meek_r1(g, i, j) || meek_r2(g, i, j) || meek_r3(g, i, j) || meek_r4(g, i, j)) {
                    if (g.would_create_cycle(i, j)) continue;
                    g.orient(i, j);
                    ++oriented;
                    changed = true;
                    break;
                }
            }
        }
    }
    return oriented;
}

CausalGraph cpdag_of_dag(const CausalGraph& dag) {
    require_dag(dag, "cpdag_of_dag");
    CausalGraph pattern(dag.nodes());
    for (const auto& [a, b] : dag.directed_edges()) pattern.add_undirected(a, b);
    for (const auto& [a, k, b] : v_structures(dag)) {
        if (pattern.has_undirected(a, k)) pattern.orient(a, k);
        if (pattern.has_undirected(b, k)) pattern.orient(b, k);
    }
    apply_meek_rules(pattern);
    return pattern;
}

bool same_skeleton(const CausalGraph& a, const CausalGraph& b) {
    if (a.nodes() != b.nodes()) return false;
    for (Index i = 0; i < a.size(); ++i)
        for (Index j = i + 1; j < a.size(); ++j)
            if (a.adjacent(i, j) != b.adjacent(i, j)) return false;
    return true;
}

std::size_t structural_hamming_distance(const CausalGraph& a, const CausalGraph& b) {
    if (a.nodes() != b.nodes()) throw GraphError("structural hamming distance needs identical node lists");
    std::size_t d = 0;
    for (Index i = 0; i < a.size(); ++i) {
        for (Index j = i + 1; j < a.size(); ++j) {
            const bool same = a.has_directed(i, j) == b.has_directed(i, j) &&
                              a.has_directed(j, i) == b.has_directed(j, i) &&
                              a.has_undirected(i, j) == b.has_undirected(i, j);
            if (!same) ++d;
        }
    }
    return d;
}

std::string serialize_graph(const CausalGraph& g) {
    nlohmann::ordered_json doc;
    doc["nodes"] = g.nodes();
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges()) {
        nlohmann::ordered_json je;
        je["from"] = e.from;
        je["to"] = e.to;
        je["kind"] = e.kind == EdgeKind::directed ? "directed" : "undirected";
        doc["edges"].push_back(std::move(je));
    }
    return doc.dump(2) + "\n";
}

CausalGraph parse_graph(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        CausalGraph g(doc.at("nodes").get<std::vector<std::string>>());
        for (const auto& e : doc.at("edges")) {
            const auto from = e.at("from").get<std::string>();
            const auto to = e.at("to").get<std::string>();
            const auto kind = e.at("kind").get<std::string>();
            if (kind == "directed") g.add_directed(from, to);
            else if (kind == "undirected") g.add_undirected(from, to);
            else throw GraphError("unknown edge kind '" + kind + "'");
        }
        return g;
    } catch (const nlohmann::json::exception& ex) {
        throw GraphError(std::string("malformed graph document: ") + ex.what());
    }
}

}  // namespace causal
