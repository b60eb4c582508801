#include "causal/commands.hpp"
#include "causal/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <stdexcept>

using namespace causal;

namespace {

std::vector<Category> parse_categories(const std::vector<std::string>& names) {
    std::vector<Category> out;
    for (const auto& n : names) {
        const auto c = parse_category(n);
        if (!c) throw std::invalid_argument("unknown category '" + n + "'");
        out.push_back(*c);
    }
    return out;
}

BackendMode parse_backend(const std::string& name) {
    if (name == "http") return BackendMode::http_chat;
    if (name == "scripted") return BackendMode::scripted;
    if (name == "oracle") return BackendMode::oracle;
    throw std::invalid_argument("unknown backend '" + name + "'");
}

void add_backend_flags(CLI::App* cmd, BackendConfig& cfg, std::string& backend, std::filesystem::path& replay) {
    cmd->add_option("--backend", backend, "Model backend")->check(CLI::IsMember({"http", "scripted", "oracle"}));
    cmd->add_option("--replay", replay, "Replay file for the scripted backend");
    cmd->add_option("--endpoint", cfg.endpoint, "Chat completion base URL")->envname("CAUSAL_AGENT_ENDPOINT");
    cmd->add_option("--model", cfg.model, "Model id")->envname("CAUSAL_AGENT_MODEL");
    cmd->add_option("--temperature", cfg.temperature, "Sampling temperature")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iterations", cfg.max_iterations, "Backend calls per session")->check(CLI::PositiveNumber);
    cmd->add_flag("--icl", cfg.icl, "Include the one-shot demo in the prompt");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal analysis agent: data generation, tools, sessions and benchmark"};
    app.require_subcommand(1);

    GenerateOptions gen;
    std::vector<std::string> gen_categories;
    auto* generate = app.add_subcommand("generate", "Generate the table pool and benchmark manifest");
    generate->add_option("--out", gen.out, "Output directory")->required();
    generate->add_option("--seed", gen.seed, "Master seed");
    generate->add_option("--rows", gen.rows, "Rows per table");
    generate->add_option("--nodes", gen.nodes, "Node counts")->delimiter(',');
    generate->add_option("--categories", gen_categories, "Question categories")->delimiter(',');
    generate->add_option("--items-per-cell", gen.items_per_cell, "Items per category and node count");
    generate->add_option("--alpha", gen.alpha, "Significance level");
    generate->add_flag("--allow-any-nodes", gen.allow_any_nodes, "Allow node counts outside 3..10");

    ToolOptions tool;
    auto* tool_cmd = app.add_subcommand("tool", "Run one tool and print its observation");
    tool_cmd->add_option("name", tool.tool, "Tool name")->required();
    tool_cmd->add_option("arguments", tool.arguments, "JSON arguments")->required();
    tool_cmd->add_option("--csv", tool.csv, "Data files, addressed by file name")->check(CLI::ExistingFile);
    tool_cmd->add_option("--data-dir", tool.data_dir, "Directory searched for other data files");
    tool_cmd->add_option("--alpha", tool.alpha, "Significance level");

    AskOptions ask;
    std::string ask_backend = "scripted";
    auto* ask_cmd = app.add_subcommand("ask", "Answer one question with an agent session");
    ask_cmd->add_option("question", ask.question, "Question text")->required();
    ask_cmd->add_option("--csv", ask.csv, "Data files, addressed by file name")->check(CLI::ExistingFile);
    ask_cmd->add_option("--data-dir", ask.data_dir, "Directory searched for other data files");
    ask_cmd->add_option("--transcript", ask.transcript, "Transcript output (JSON lines)");
    ask_cmd->add_option("--alpha", ask.alpha, "Significance level");
    add_backend_flags(ask_cmd, ask.backend, ask_backend, ask.replay);

    BenchOptions bench;
    std::string bench_backend = "oracle";
    std::string stratify;
    auto* bench_cmd = app.add_subcommand("bench", "Run every benchmark item and write the report");
    bench_cmd->add_option("--manifest", bench.manifest, "Generate output directory or benchmark.json")->required();
    bench_cmd->add_option("--out", bench.out, "Report directory")->required();
    bench_cmd->add_option("--jobs", bench.jobs, "Concurrent sessions")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--stratify", stratify, "Add the answer,domain breakdown")
        ->check(CLI::IsMember({"answer,domain", "domain,answer"}));
    bench_cmd->add_option("--alpha", bench.alpha, "Significance level");
    add_backend_flags(bench_cmd, bench.backend, bench_backend, bench.replay);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*generate) {
            if (!gen_categories.empty()) gen.categories = parse_categories(gen_categories);
            return cmd_generate(gen, std::cout, std::cerr);
        }
        if (*tool_cmd) return cmd_tool(tool, std::cout, std::cerr);
        if (*ask_cmd) {
            ask.backend.mode = parse_backend(ask_backend);
            return cmd_ask(ask, std::cout, std::cerr);
        }
        bench.backend.mode = parse_backend(bench_backend);
        bench.stratify = !stratify.empty();
        return cmd_bench(bench, std::cout, std::cerr);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
