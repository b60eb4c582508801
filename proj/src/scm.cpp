#include "causal/scm.hpp"

#include "causal/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

namespace causal {

std::string_view to_string(MechanismFamily f) {
    return f == MechanismFamily::linear ? "linear" : "nonlinear";
}

MechanismFamily parse_family(std::string_view text) {
    if (text == "linear") return MechanismFamily::linear;
    if (text == "nonlinear") return MechanismFamily::nonlinear;
    throw DataError("unknown mechanism family '" + std::string(text) + "'");
}

double Mechanism::operator()(std::span<const double> parents) const {
    if (custom) return custom(parents);
    double out = 0.0;
    if (family == MechanismFamily::linear) {
        for (std::size_t j = 0; j < parents.size(); ++j) out += weight[j] * parents[j];
        return out;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < parents.size(); ++j) {
        out += weight[j] * std::tanh(slope[j] * parents[j] + offset[j]);
        total += parents[j];
    }
    if (!parents.empty()) out += interaction * std::tanh(total);
    return out;
}

std::vector<std::size_t> Scm::topological_order() const {
    const std::size_t n = dag.size();
    std::vector<std::size_t> indegree(n, 0), order;
    for (const auto& [a, b] : dag.directed_edges()) ++indegree[b];
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        // Lowest index first keeps the order canonical.
        std::sort(ready.begin(), ready.end(), std::greater<>());
        const std::size_t v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (std::size_t c : dag.children(v))
            if (--indegree[c] == 0) ready.push_back(c);
    }
    return order;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the combined state
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<std::string> default_names(std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= count; ++i) names.push_back("V" + std::to_string(i));
    return names;
}

CausalGraph random_dag(std::size_t node_count, std::size_t edge_count, std::uint64_t seed,
                       std::vector<std::string> names) {
    if (node_count == 0) throw GraphError("random DAG needs at least one node");
    const std::size_t max_edges = node_count * (node_count - 1) / 2;
    if (edge_count > max_edges) {
        throw GraphError("edge count " + std::to_string(edge_count) + " exceeds " + std::to_string(max_edges) +
                         " for " + std::to_string(node_count) + " nodes");
    }
    if (names.empty()) names = default_names(node_count);
    if (names.size() != node_count) throw GraphError("node name count mismatch");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(node_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = node_count; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < node_count; ++a)
        for (std::size_t b = a + 1; b < node_count; ++b) pairs.emplace_back(order[a], order[b]);
    // Partial Fisher-Yates: the first edge_count slots are a uniform sample.
    for (std::size_t i = 0; i < edge_count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (pairs.size() - i));
        std::swap(pairs[i], pairs[j]);
    }
    CausalGraph g(std::move(names));
    for (std::size_t i = 0; i < edge_count; ++i) g.add_directed(pairs[i].first, pairs[i].second);
    return g;
}

Scm make_scm(CausalGraph dag, MechanismFamily family, std::uint64_t seed, double sigma) {
    if (!dag.is_fully_directed()) throw GraphError("an SCM needs a fully directed graph");
    if (!(sigma > 0.0)) throw DataError("noise sigma must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> magnitude(0.5, 1.5);
    auto coef = [&] {
        const double m = magnitude(rng);
        return (rng() & 1U) ? m : -m;
    };
    Scm scm;
    scm.seed = seed;
    scm.family = family;
    scm.noise_sigma.assign(dag.size(), sigma);
    for (std::size_t i = 0; i < dag.size(); ++i) {
        Mechanism m;
        m.family = family;
        const std::size_t k = dag.parents(i).size();
        for (std::size_t j = 0; j < k; ++j) {
            m.weight.push_back(coef());
            if (family == MechanismFamily::nonlinear) {
                m.slope.push_back(coef());
                m.offset.push_back(coef());
            }
        }
        if (family == MechanismFamily::nonlinear && k > 0) m.interaction = coef();
        scm.mechanisms.push_back(std::move(m));
    }
    scm.dag = std::move(dag);
    return scm;
}

namespace {

// Column-wise simulation; `clamp` pins one node to a constant (intervention).
std::vector<std::vector<double>> simulate(const Scm& scm, std::size_t rows, std::uint64_t seed,
                                          std::optional<std::pair<std::size_t, double>> clamp = std::nullopt) {
    const std::size_t n = scm.dag.size();
    std::vector<std::vector<double>> cols(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> parent_values;
    for (std::size_t v : scm.topological_order()) {
        const auto parents = scm.dag.parents(v);
        auto& out = cols[v];
        out.resize(rows);
        const auto& mech = scm.mechanisms[v];
        parent_values.resize(parents.size());
        for (std::size_t r = 0; r < rows; ++r) {
            // The noise draw happens even for a clamped node so both arms of
            // an intervention consume the stream identically.
            const double noise = scm.noise_sigma[v] * normal(rng);
            if (clamp && clamp->first == v) {
                out[r] = clamp->second;
                continue;
            }
            for (std::size_t j = 0; j < parents.size(); ++j) parent_values[j] = cols[parents[j]][r];
            out[r] = mech(parent_values) + noise;
        }
    }
    return cols;
}

}  // namespace

DataTable sample_table(const Scm& scm, std::size_t rows, std::uint64_t seed, std::string name) {
    if (rows == 0) throw DataError("sample_table needs at least one row");
    return DataTable(std::move(name), scm.dag.nodes(), simulate(scm, rows, seed));
}

bool oracle_dsep_label(const Scm& scm, std::string_view x, std::string_view y, std::span<const std::string> given) {
    return d_separated(scm.dag, x, y, given);
}

CausalGraph oracle_cpdag(const Scm& scm) { return cpdag_of_dag(scm.dag); }

InterventionalEffect oracle_interventional_ate(const Scm& scm, std::string_view treatment, std::string_view outcome,
                                               double t0, double t1, std::size_t mc_draws, std::uint64_t seed) {
    const std::size_t t = scm.dag.index_of(treatment);
    const std::size_t y = scm.dag.index_of(outcome);
    if (t == y) throw GraphError("treatment and outcome must differ");
    if (mc_draws < 100000) throw DataError("interventional oracle needs at least 1e5 Monte-Carlo draws");
    if (t0 == t1) return {0.0, 0.0};
    const auto high = simulate(scm, mc_draws, seed, std::pair{t, t1});
    const auto low = simulate(scm, mc_draws, seed, std::pair{t, t0});
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < mc_draws; ++r) {
        const double d = high[y][r] - low[y][r];
        const double delta = d - mean;
        mean += delta / static_cast<double>(r + 1);
        m2 += delta * (d - mean);
    }
    const double var = m2 / static_cast<double>(mc_draws - 1);
    return {mean, std::sqrt(var / static_cast<double>(mc_draws))};
}

TablePoolEntry regenerate_entry(std::string id, std::string csv, std::vector<std::string> nodes,
                                std::vector<std::pair<std::string, std::string>> edges, MechanismFamily family,
                                std::uint64_t seed, double sigma, std::size_t rows) {
    CausalGraph dag(std::move(nodes));
    for (const auto& [a, b] : edges) dag.add_directed(a, b);
    auto scm = make_scm(std::move(dag), family, seed, sigma);
    const auto sample_seed = derive_seed(seed, 1);
    auto table = sample_table(scm, rows, sample_seed, id);
    return TablePoolEntry{std::move(id), std::move(csv), std::move(scm), std::move(table), sample_seed};
}

TablePool generate_pool(const PoolSpec& spec) {
    TablePool pool;
    std::uint64_t counter = 0;
    for (std::size_t nodes : spec.node_counts) {
        const std::size_t max_edges = nodes * (nodes - 1) / 2;
        for (const auto family : {MechanismFamily::nonlinear, MechanismFamily::linear}) {
            const std::size_t count =
                family == MechanismFamily::nonlinear ? spec.tables_per_count : spec.linear_tables_per_count;
            for (std::size_t k = 0; k < count; ++k) {
                // Edge counts spread evenly over [0, max] so every pool covers
                // both the empty and the complete graph.
                const std::size_t edges =
                    count == 1 ? max_edges / 2 : (k * max_edges + (count - 1) / 2) / (count - 1);
                const std::uint64_t seed = derive_seed(spec.seed, counter++);
                const auto dag = random_dag(nodes, edges, seed);
                std::vector<std::pair<std::string, std::string>> named;
                for (const auto& e : dag.edges()) named.emplace_back(e.from, e.to);
                char id[64];
                std::snprintf(id, sizeof id, "n%02zu_%s_%02zu", nodes,
                              family == MechanismFamily::linear ? "lin" : "nl", k);
                pool.push_back(regenerate_entry(id, std::string(id) + ".csv", dag.nodes(), std::move(named), family,
                                                seed, spec.sigma, spec.rows));
            }
        }
    }
    return pool;
}

void write_pool(const TablePool& pool, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : pool) {
        save_csv(e.table, dir / e.csv);
        nlohmann::ordered_json je;
        je["id"] = e.id;
        je["csv"] = e.csv;
        je["nodes"] = e.scm.dag.nodes();
        je["edges"] = nlohmann::ordered_json::array();
        for (const auto& edge : e.scm.dag.edges()) je["edges"].push_back({edge.from, edge.to});
        je["family"] = to_string(e.scm.family);
        je["seed"] = e.scm.seed;
        je["sigma"] = e.scm.noise_sigma.empty() ? kDefaultNoiseSigma : e.scm.noise_sigma.front();
        je["rows"] = e.table.rows();
        manifest["entries"].push_back(std::move(je));
    }
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write pool manifest in '" + dir.string() + "'");
    out << manifest.dump(2) << '\n';
}

TablePool read_pool(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw DataError("cannot open pool manifest in '" + dir.string() + "'");
    TablePool pool;
    try {
        const auto manifest = nlohmann::json::parse(in);
        for (const auto& je : manifest.at("entries")) {
            std::vector<std::pair<std::string, std::string>> edges;
            for (const auto& e : je.at("edges")) edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
            pool.push_back(regenerate_entry(je.at("id").get<std::string>(), je.at("csv").get<std::string>(),
                                            je.at("nodes").get<std::vector<std::string>>(), std::move(edges),
                                            parse_family(je.at("family").get<std::string>()),
                                            je.at("seed").get<std::uint64_t>(), je.at("sigma").get<double>(),
                                            je.at("rows").get<std::size_t>()));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("malformed pool manifest: ") + ex.what());
    }
    return pool;
}

}  // namespace causal
