#pragma once

#include "causal/dml.hpp"
#include "causal/edge_tools.hpp"
#include "causal/graph.hpp"
#include "causal/questions.hpp"
#include "causal/scm.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace causal {

using GroundTruth = std::variant<Verdict, CausalGraph, double>;

/// One (table, question) pair with its label. Columns of the pool table are
/// renamed to `keywords` (same order) and exposed to the agent as `filename`.
struct BenchItem {
    std::string id;
    std::string table_ref;
    Category category = Category::IT;
    Domain domain = Domain::medical;
    std::size_t node_count = 0;
    std::vector<std::string> keywords;
    /// x, y for pairwise categories; the subset for PARTIAL; T, Y for ATE.
    std::vector<std::string> variables;
    /// Conditioning set (CIT, MULTCIT) or covariates (ATE).
    std::vector<std::string> conditions;
    double t0 = 0.0;
    double t1 = 0.0;
    std::string filename;
    std::string question;
    GroundTruth truth;
};

struct BenchPlan {
    std::vector<Category> categories{std::begin(kAllCategories), std::end(kAllCategories)};
    std::vector<std::size_t> node_counts{3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t items_per_cell = 20;
    double alpha = 0.05;
    std::uint64_t seed = 0;
};

/// False for cells that cannot hold a question (MULTCIT needs two
/// conditions beside the queried pair).
bool cell_feasible(Category c, std::size_t node_count);

/// Ground truth comes from the generating model: d-separation for the
/// variable level, extension verdicts on the true CPDAG for the edge level,
/// the true CPDAG (or population PC over the subset) for graphs, and the
/// DML estimate itself for effects.
std::vector<BenchItem> build_benchmark(const TablePool& pool, const BenchPlan& plan);

/// The pool table with its columns renamed for this item.
DataTable item_table(const BenchItem& item, const TablePool& pool);

void write_benchmark(const std::vector<BenchItem>& items, const std::filesystem::path& json_path,
                     const std::filesystem::path& csv_path);
std::vector<BenchItem> read_benchmark(const std::filesystem::path& json_path);

std::string truth_label(const GroundTruth& truth);

struct FormatViolation {
    std::string reason;
};
using ParsedAnswer = std::variant<FormatViolation, Verdict, std::string, double>;

/// Strict JSON {"answer": ...}. Verdicts are case-insensitive; graph answers
/// are a graph name; effect answers a number (or numeric string).
ParsedAnswer parse_final_answer(std::string_view text, Category category);

/// What a session produced for one item.
struct ItemOutcome {
    std::string id;
    std::optional<std::string> final_answer;
    /// Graph named by the answer, looked up in the session memory.
    std::optional<CausalGraph> answered_graph;
    std::string error;
};

struct ItemScore {
    std::string id;
    Category category = Category::IT;
    std::size_t node_count = 0;
    Domain domain = Domain::medical;
    std::string truth;
    std::string answer;
    bool correct = false;
    bool format_violation = false;
    std::optional<std::size_t> shd;
};

struct Tally {
    std::size_t correct = 0;
    std::size_t total = 0;
    double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct BenchReport {
    std::vector<ItemScore> items;

    std::map<std::pair<Category, std::size_t>, Tally> by_cell() const;
    std::map<Category, Tally> by_category() const;
    std::map<std::string, Tally> by_level() const;
    /// Keyed by (category, truth label, domain).
    std::map<std::tuple<Category, std::string, Domain>, Tally> by_answer_domain() const;
};

struct ScoreOptions {
    double ate_relative_tolerance = 0.05;
};

/// Outcomes are matched to items by id; items without an outcome count as wrong.
BenchReport score(const std::vector<BenchItem>& items, const std::vector<ItemOutcome>& outcomes,
                  const ScoreOptions& options = {});

/// Graph equality by node name set and edge marks, ignoring node order.
bool same_graph(const CausalGraph& a, const CausalGraph& b);

void write_report_csv(const BenchReport& report, const std::filesystem::path& path);
/// Markdown tables: variable, edge, graph and effect level by node count,
/// then (when `stratify`) accuracy by ground-truth answer and domain.
std::string render_report_markdown(const BenchReport& report, bool stratify);

}  // namespace causal
