#pragma once

#include "causal/agent.hpp"
#include "causal/questions.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace causal {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRuntime = 2 };

struct GenerateOptions {
    std::filesystem::path out;
    std::uint64_t seed = 0;
    std::size_t rows = 1000;
    std::vector<std::size_t> nodes{3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<Category> categories{std::begin(kAllCategories), std::end(kAllCategories)};
    std::size_t items_per_cell = 20;
    double alpha = 0.05;
    /// Permits node counts outside 3..10.
    bool allow_any_nodes = false;
};

/// Throws std::invalid_argument on a bad plan.
void validate(const GenerateOptions& options);

/// Writes <out>/pool/ (tables and manifest.json), <out>/benchmark.json and
/// <out>/benchmark.csv.
int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err);

struct ToolOptions {
    std::string tool;
    std::string arguments;
    std::vector<std::filesystem::path> csv;
    std::filesystem::path data_dir;
    double alpha = 0.05;
};

/// Prints the observation; exit 0 when the tool ran, 2 when it reported an error.
int cmd_tool(const ToolOptions& options, std::ostream& out, std::ostream& err);

struct AskOptions {
    std::string question;
    std::vector<std::filesystem::path> csv;
    std::filesystem::path data_dir;
    BackendConfig backend;
    std::filesystem::path replay;
    std::filesystem::path transcript = "transcript.jsonl";
    double alpha = 0.05;
};

/// Prints the final answer (or "no final answer") and the transcript path.
int cmd_ask(const AskOptions& options, std::ostream& out, std::ostream& err);

struct BenchOptions {
    /// A generate output directory or its benchmark.json.
    std::filesystem::path manifest;
    std::filesystem::path out;
    BackendConfig backend{.mode = BackendMode::oracle};
    /// Scripted mode: JSON object mapping item id to a list of model outputs.
    std::filesystem::path replay;
    std::size_t jobs = 1;
    bool stratify = false;
    double alpha = 0.05;
};

/// Writes <out>/report.csv, <out>/report.md and <out>/transcripts.jsonl.
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

}  // namespace causal
