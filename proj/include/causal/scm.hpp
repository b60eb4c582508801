#pragma once

#include "causal/graph.hpp"
#include "causal/tabular.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace causal {

enum class MechanismFamily { nonlinear, linear };

std::string_view to_string(MechanismFamily f);
MechanismFamily parse_family(std::string_view text);

/// Per-node structural function of the node's parents, in ascending parent
/// index order.
///
/// nonlinear: sum_j weight_j * tanh(slope_j * p_j + offset_j) + interaction * tanh(sum_j p_j)
/// linear:    sum_j weight_j * p_j
/// custom:    an arbitrary callable (test fixtures)
struct Mechanism {
    MechanismFamily family = MechanismFamily::linear;
    std::vector<double> weight;
    std::vector<double> slope;
    std::vector<double> offset;
    double interaction = 0.0;
    std::function<double(std::span<const double>)> custom;

    double operator()(std::span<const double> parents) const;
    std::size_t arity() const { return weight.size(); }
};

struct Scm {
    CausalGraph dag;
    std::vector<Mechanism> mechanisms;
    std::vector<double> noise_sigma;
    std::uint64_t seed = 0;
    MechanismFamily family = MechanismFamily::nonlinear;

    std::vector<std::size_t> topological_order() const;
};

inline constexpr double kDefaultNoiseSigma = 0.5;
inline constexpr std::size_t kDefaultRows = 1000;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Default node names V1..Vk.
std::vector<std::string> default_names(std::size_t count);

/// Random topological order, then `edge_count` distinct order-respecting
/// pairs chosen uniformly without replacement.
CausalGraph random_dag(std::size_t node_count, std::size_t edge_count, std::uint64_t seed,
                       std::vector<std::string> names = {});

/// Draws mechanism coefficients uniformly from +-[0.5, 1.5].
Scm make_scm(CausalGraph dag, MechanismFamily family, std::uint64_t seed, double sigma = kDefaultNoiseSigma);

/// x_i = f_i(parents) + sigma_i * N(0, 1), nodes evaluated in topological order.
DataTable sample_table(const Scm& scm, std::size_t rows, std::uint64_t seed, std::string name = "");

bool oracle_dsep_label(const Scm& scm, std::string_view x, std::string_view y, std::span<const std::string> given);
CausalGraph oracle_cpdag(const Scm& scm);

struct InterventionalEffect {
    double ate = 0.0;
    double standard_error = 0.0;
};

/// Monte-Carlo E[Y | do(T=t1)] - E[Y | do(T=t0)] with common random numbers
/// for both arms.
InterventionalEffect oracle_interventional_ate(const Scm& scm, std::string_view treatment, std::string_view outcome,
                                               double t0, double t1, std::size_t mc_draws, std::uint64_t seed);

/// One table of the pool together with the model that generated it.
struct TablePoolEntry {
    std::string id;
    std::string csv;  // path relative to the pool directory
    Scm scm;
    DataTable table;
    std::uint64_t sample_seed = 0;
    std::size_t node_count() const { return scm.dag.size(); }
    std::size_t edge_count() const { return scm.dag.edge_count(); }
};

struct PoolSpec {
    std::vector<std::size_t> node_counts;  // e.g. 3..10
    std::size_t tables_per_count = 6;
    std::size_t linear_tables_per_count = 3;
    std::size_t rows = kDefaultRows;
    double sigma = kDefaultNoiseSigma;
    std::uint64_t seed = 0;
};

using TablePool = std::vector<TablePoolEntry>;

TablePool generate_pool(const PoolSpec& spec);

/// Rebuilds one entry bit-identically from its manifest fields.
TablePoolEntry regenerate_entry(std::string id, std::string csv, std::vector<std::string> nodes,
                                std::vector<std::pair<std::string, std::string>> edges, MechanismFamily family,
                                std::uint64_t seed, double sigma, std::size_t rows);

/// Writes <dir>/<csv> for every entry plus <dir>/manifest.json.
void write_pool(const TablePool& pool, const std::filesystem::path& dir);
/// Reads manifest.json and regenerates every entry from it.
TablePool read_pool(const std::filesystem::path& dir);

}  // namespace causal
