#include "causal/pc.hpp"

#include "causal/ci_test.hpp"
#include "causal/error.hpp"

#include <algorithm>
#include <memory>
#include <set>

namespace causal {

void SepSetMap::record(std::size_t a, std::size_t b, std::vector<std::size_t> given) {
    entries_[{std::min(a, b), std::max(a, b)}] = std::move(given);
}

const std::vector<std::size_t>* SepSetMap::find(std::size_t a, std::size_t b) const {
    const auto it = entries_.find({std::min(a, b), std::max(a, b)});
    return it == entries_.end() ? nullptr : &it->second;
}

namespace {

struct EdgeOutcome {
    bool removed = false;
    std::vector<std::size_t> sepset;
    std::size_t tests = 0;
};

// Calls `visit` on each size-k subset of `pool` in lexicographic order until
// it returns true.
template <typename Visit>
bool for_each_subset(const std::vector<std::size_t>& pool, std::size_t k, Visit&& visit) {
    if (k > pool.size()) return false;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    std::vector<std::size_t> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = pool[pick[i]];
        if (visit(std::span<const std::size_t>(subset))) return true;
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == pool.size() - k + i - 1) --i;
        if (i == 0) return false;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

EdgeOutcome test_edge(const std::vector<std::vector<std::size_t>>& adj, std::size_t i, std::size_t j,
                      std::size_t level, const IndependenceOracle& independent) {
    EdgeOutcome out;
    for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        std::vector<std::size_t> pool;
        for (std::size_t k : adj[a])
            if (k != b) pool.push_back(k);
        const bool found = for_each_subset(pool, level, [&](std::span<const std::size_t> s) {
            ++out.tests;
            if (independent(i, j, s)) {
                out.removed = true;
                out.sepset.assign(s.begin(), s.end());
                return true;
            }
            return false;
        });
        if (found) break;
    }
    return out;
}

}  // namespace

Skeleton pc_skeleton(const std::vector<std::string>& variables, const IndependenceOracle& independent,
                     Execution mode) {
    Skeleton result{CausalGraph(variables), {}, 0};
    auto& g = result.graph;
    const std::size_t n = variables.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.add_undirected(i, j);

    for (std::size_t level = 0;; ++level) {
        std::vector<std::vector<std::size_t>> adj(n);
        for (std::size_t i = 0; i < n; ++i) adj[i] = g.adjacents(i);

        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (const auto& [i, j] : g.undirected_edges()) {
            if (adj[i].size() - 1 >= level || adj[j].size() - 1 >= level) candidates.emplace_back(i, j);
        }
        if (candidates.empty()) break;

        std::vector<EdgeOutcome> outcomes(candidates.size());
        const auto count = static_cast<std::ptrdiff_t>(candidates.size());
        if (mode == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t e = 0; e < count; ++e) {
                outcomes[e] = test_edge(adj, candidates[e].first, candidates[e].second, level, independent);
            }
        } else {
            for (std::ptrdiff_t e = 0; e < count; ++e) {
                outcomes[e] = test_edge(adj, candidates[e].first, candidates[e].second, level, independent);
            }
        }
        for (std::size_t e = 0; e < candidates.size(); ++e) {
            result.tests_run += outcomes[e].tests;
            if (outcomes[e].removed) {
                g.remove_edge(candidates[e].first, candidates[e].second);
                result.sepsets.record(candidates[e].first, candidates[e].second, std::move(outcomes[e].sepset));
            }
        }
    }
    return result;
}

PcResult pc_search(const std::vector<std::string>& variables, const IndependenceOracle& independent,
                   Execution mode) {
    auto skeleton = pc_skeleton(variables, independent, mode);
    PcResult result{std::move(skeleton.graph), std::move(skeleton.sepsets), {}, skeleton.tests_run};
    auto& g = result.graph;
    const std::size_t n = g.size();

    // demands[a][b]: some unshielded collider asks for a -> b.
    std::vector<std::vector<bool>> demands(n, std::vector<bool>(n, false));
    for (std::size_t k = 0; k < n; ++k) {
        const auto nb = g.adjacents(k);
        for (std::size_t a = 0; a < nb.size(); ++a) {
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const std::size_t i = nb[a];
                const std::size_t j = nb[b];
                if (g.adjacent(i, j)) continue;
                const auto* sep = result.sepsets.find(i, j);
                if (sep && std::find(sep->begin(), sep->end(), k) != sep->end()) continue;
                demands[i][k] = true;
                demands[j][k] = true;
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (!g.has_undirected(a, b)) continue;
            if (demands[a][b] && demands[b][a]) {
                result.warnings.push_back("conflicting v-structure orientations on " + g.name(a) + " - " + g.name(b) +
                                          "; edge left undirected");
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (!demands[a][b] || demands[b][a] || !g.has_undirected(a, b)) continue;
            if (g.would_create_cycle(a, b)) {
                result.warnings.push_back("orienting " + g.name(a) + " -> " + g.name(b) +
                                          " would close a cycle; edge left undirected");
                continue;
            }
            g.orient(a, b);
        }
    }
    apply_meek_rules(g);
    return result;
}

IndependenceOracle fisher_z_oracle(const CorrelationMatrix& corr, std::size_t rows, double alpha) {
    auto shared = std::make_shared<const CorrelationMatrix>(corr);
    return [shared, rows, alpha](std::size_t x, std::size_t y, std::span<const std::size_t> given) {
        if (rows <= given.size() + 3) return false;
        try {
            const double r = partial_correlation(*shared, x, y, given);
            return fisher_z_statistic(r, rows, given.size()).p_value > alpha;
        } catch (const StatsError&) {
            return false;
        }
    };
}

IndependenceOracle d_separation_oracle(const CausalGraph& dag, std::vector<std::size_t> mapping) {
    auto shared = std::make_shared<const CausalGraph>(dag);
    return [shared, mapping = std::move(mapping)](std::size_t x, std::size_t y, std::span<const std::size_t> given) {
        std::vector<bool> mask(shared->size(), false);
        for (std::size_t z : given) mask[mapping[z]] = true;
        return d_separated(*shared, mapping[x], mapping[y], mask);
    };
}

PcResult run_pc_detailed(const DataTable& table, double alpha, Execution mode) {
    if (table.cols() == 1) return PcResult{CausalGraph(table.columns()), {}, {}, 0};
    const auto corr = correlation_matrix(table);
    return pc_search(table.columns(), fisher_z_oracle(corr, table.rows(), alpha), mode);
}

CausalGraph run_pc(const DataTable& table, double alpha) { return run_pc_detailed(table, alpha).graph; }

CausalGraph run_pc_partial(const DataTable& table, std::span<const std::string> subset, double alpha) {
    if (subset.empty()) throw DataError("partial causal graph needs at least one variable");
    std::set<std::string_view> seen;
    for (const auto& name : subset) {
        if (!seen.insert(name).second) throw DataError("variable '" + name + "' listed twice");
    }
    return run_pc(table.select(subset), alpha);
}

}  // namespace causal
