#pragma once

#include "causal/graph.hpp"
#include "causal/tabular.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace causal {

/// Conditional independence query over variable indices. Must be safe to call
/// concurrently. Return false when the test cannot be run (the edge is kept).
using IndependenceOracle =
    std::function<bool(std::size_t x, std::size_t y, std::span<const std::size_t> given)>;

/// Conditioning sets that removed each skeleton edge, keyed by (low, high) index.
class SepSetMap {
public:
    void record(std::size_t a, std::size_t b, std::vector<std::size_t> given);
    const std::vector<std::size_t>* find(std::size_t a, std::size_t b) const;
    std::size_t size() const { return entries_.size(); }
    const auto& entries() const { return entries_; }

private:
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> entries_;
};

enum class Execution { serial, parallel };

struct Skeleton {
    CausalGraph graph;  // undirected edges only
    SepSetMap sepsets;
    std::size_t tests_run = 0;
};

struct PcResult {
    CausalGraph graph;
    SepSetMap sepsets;
    std::vector<std::string> warnings;
    std::size_t tests_run = 0;
};

/// Stable skeleton search. Adjacencies are frozen at the start of each level,
/// so the parallel kernel commits the same removals as the serial reference.
Skeleton pc_skeleton(const std::vector<std::string>& variables, const IndependenceOracle& independent,
                     Execution mode = Execution::parallel);

/// Skeleton search, v-structure orientation with conflict detection, then
/// Meek closure.
PcResult pc_search(const std::vector<std::string>& variables, const IndependenceOracle& independent,
                   Execution mode = Execution::parallel);

/// Fisher-Z oracle over a precomputed correlation matrix; tests whose
/// preconditions fail count as dependent.
IndependenceOracle fisher_z_oracle(const CorrelationMatrix& corr, std::size_t rows, double alpha);

/// Population oracle: d-separation in `dag`, where variable i of the search
/// is node `mapping[i]` of the DAG.
IndependenceOracle d_separation_oracle(const CausalGraph& dag, std::vector<std::size_t> mapping);

PcResult run_pc_detailed(const DataTable& table, double alpha, Execution mode = Execution::parallel);
CausalGraph run_pc(const DataTable& table, double alpha);
CausalGraph run_pc_partial(const DataTable& table, std::span<const std::string> subset, double alpha);

}  // namespace causal
