#include "causal/commands.hpp"

#include "causal/backends.hpp"
#include "causal/bench.hpp"
#include "causal/scm.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>

#ifdef CAUSAL_USE_OPENMP
#include <omp.h>
#endif

namespace causal {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

void register_csv(TableStore& store, const std::vector<std::filesystem::path>& csv) {
    for (const auto& path : csv) store.add(path.filename().string(), load_csv(path));
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, const std::vector<std::string>& script) {
    switch (config.mode) {
        case BackendMode::http_chat: return std::make_unique<HttpChatBackend>(config);
        case BackendMode::scripted: return std::make_unique<ScriptedBackend>(script);
        case BackendMode::oracle: break;
    }
    throw std::invalid_argument("the oracle backend only runs benchmark items");
}

}  // namespace

void validate(const GenerateOptions& o) {
    if (o.out.empty()) throw std::invalid_argument("--out is required");
    if (o.nodes.empty()) throw std::invalid_argument("--nodes must list at least one node count");
    for (std::size_t n : o.nodes) {
        if (n < 2) throw std::invalid_argument("node count " + std::to_string(n) + " is below 2");
        if (!o.allow_any_nodes && (n < 3 || n > 10))
            throw std::invalid_argument("node count " + std::to_string(n) +
                                        " is outside 3..10 (pass --allow-any-nodes to override)");
    }
    if (o.rows < 10) throw std::invalid_argument("--rows must be at least 10");
    if (o.categories.empty()) throw std::invalid_argument("--categories must list at least one category");
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw std::invalid_argument("--alpha must lie in (0, 1)");
}

int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err) {
    validate(options);
    PoolSpec spec;
    spec.node_counts = options.nodes;
    spec.rows = options.rows;
    spec.seed = options.seed;
    err << "generate: sampling tables\n";
    const auto pool = generate_pool(spec);

    BenchPlan plan;
    plan.categories = options.categories;
    plan.node_counts = options.nodes;
    plan.items_per_cell = options.items_per_cell;
    plan.alpha = options.alpha;
    plan.seed = options.seed;
    err << "generate: building questions\n";
    const auto items = build_benchmark(pool, plan);

    std::filesystem::create_directories(options.out / "pool");
    write_pool(pool, options.out / "pool");
    write_benchmark(items, options.out / "benchmark.json", options.out / "benchmark.csv");
    out << "tables: " << pool.size() << "\nitems: " << items.size() << "\nwritten to: " << options.out.string()
        << "\n";
    return kExitOk;
}

int cmd_tool(const ToolOptions& options, std::ostream& out, std::ostream& err) {
    const auto& tools = default_tools();
    const ToolSpec* spec = find_tool(tools, options.tool);
    if (!spec) {
        err << unknown_tool_observation(options.tool, tools) << "\n";
        return kExitUsage;
    }
    TableStore store(options.data_dir);
    register_csv(store, options.csv);
    GraphMemory memory;
    ToolContext ctx{memory, store, options.alpha};
    // Edge tools need a graph: build it from the named table first.
    std::string arguments = options.arguments;
    if (spec->name.starts_with("Determine")) {
        const auto args = normalize_arguments(nlohmann::json::parse(arguments, nullptr, false));
        if (args.is_object() && args.contains("cg name") && args.at("cg name").is_string()) {
            const auto name = args.at("cg name").get<std::string>();
            const auto file = name.ends_with(".csv") ? name : name + ".csv";
            bool ok = false;
            const auto obs = dispatch_tool(*find_tool(tools, "Generate Causal"),
                                           nlohmann::json{{"filename", file}, {"analyse relationship", "True"}}.dump(),
                                           ctx, &ok);
            if (!ok) {
                out << obs << "\n";
                return kExitRuntime;
            }
        }
    }
    bool ok = false;
    out << dispatch_tool(*spec, arguments, ctx, &ok) << "\n";
    return ok ? kExitOk : kExitRuntime;
}

int cmd_ask(const AskOptions& options, std::ostream& out, std::ostream& err) {
    options.backend.validate();
    if (options.question.empty()) throw std::invalid_argument("a question is required");
    std::vector<std::string> script;
    if (options.backend.mode == BackendMode::scripted) {
        if (options.replay.empty()) throw std::invalid_argument("--replay is required with the scripted backend");
        script = load_replay(options.replay);
    }
    TableStore store(options.data_dir);
    register_csv(store, options.csv);
    auto backend = make_backend(options.backend, script);
    Transcript transcript;
    int code = kExitOk;
    try {
        transcript = run_session(options.question, store, *backend, options.backend, default_tools(), options.alpha)
                         .transcript;
    } catch (const SessionError& e) {
        err << "ask: " << e.what() << "\n";
        transcript = e.partial();
        code = kExitRuntime;
    }
    write_text(options.transcript, transcript_jsonl(transcript));
    out << (transcript.final_answer ? *transcript.final_answer : std::string("no final answer")) << "\n";
    out << "transcript: " << options.transcript.string() << "\n";
    return code;
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
    options.backend.validate();
    if (options.out.empty()) throw std::invalid_argument("--out is required");
    if (options.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
    const auto manifest =
        std::filesystem::is_directory(options.manifest) ? options.manifest / "benchmark.json" : options.manifest;
    const auto items = read_benchmark(manifest);

    nlohmann::json scripts = nlohmann::json::object();
    if (options.backend.mode == BackendMode::scripted) {
        if (options.replay.empty()) throw std::invalid_argument("--replay is required with the scripted backend");
        std::ifstream in(options.replay);
        if (!in) throw DataError("cannot open replay file '" + options.replay.string() + "'");
        scripts = nlohmann::json::parse(in);
        if (!scripts.is_object()) throw DataError("bench replay must map item ids to lists of model outputs");
    }
    const TablePool pool = items.empty() ? TablePool{} : read_pool(manifest.parent_path() / "pool");

    std::vector<ItemOutcome> outcomes(items.size());
    std::vector<std::string> logs(items.size());
    std::atomic<std::size_t> done{0};
    const auto count = static_cast<std::ptrdiff_t>(items.size());

#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(options.jobs))
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto& item = items[static_cast<std::size_t>(i)];
        auto& outcome = outcomes[static_cast<std::size_t>(i)];
        outcome.id = item.id;
        Transcript transcript;
        try {
            TableStore store;
            store.add(item.filename, item_table(item, pool));
            std::unique_ptr<Backend> backend;
            if (options.backend.mode == BackendMode::oracle) {
                backend = std::make_unique<OraclePolicyBackend>(item);
            } else {
                std::vector<std::string> script;
                if (scripts.contains(item.id)) script = scripts.at(item.id).get<std::vector<std::string>>();
                backend = make_backend(options.backend, script);
            }
            auto session = run_session(item.question, store, *backend, options.backend, default_tools(), options.alpha);
            transcript = std::move(session.transcript);
            outcome.final_answer = transcript.final_answer;
            if (transcript.final_answer && answer_kind(item.category) == AnswerKind::graph) {
                const auto parsed = parse_final_answer(*transcript.final_answer, item.category);
                if (const auto* name = std::get_if<std::string>(&parsed))
                    if (const auto* g = session.memory.find(*name)) outcome.answered_graph = *g;
            }
        } catch (const SessionError& e) {
            transcript = e.partial();
            outcome.error = e.what();
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
        logs[static_cast<std::size_t>(i)] =
            nlohmann::ordered_json{{"type", "item"}, {"id", item.id}, {"error", outcome.error}}.dump() + "\n" +
            transcript_jsonl(transcript);
        const auto finished = ++done;
        if (finished % 100 == 0) {
#pragma omp critical(bench_progress)
            err << "bench: " << finished << "/" << items.size() << " items\n";
        }
    }

    const auto report = score(items, outcomes);
    std::filesystem::create_directories(options.out);
    write_report_csv(report, options.out / "report.csv");
    write_text(options.out / "report.md", render_report_markdown(report, options.stratify));
    std::string all_logs;
    for (const auto& l : logs) all_logs += l;
    write_text(options.out / "transcripts.jsonl", all_logs);

    std::size_t correct = 0;
    for (const auto& s : report.items) correct += s.correct ? 1 : 0;
    out << "items: " << report.items.size() << "\ncorrect: " << correct << "\nreport: "
        << (options.out / "report.md").string() << "\n";
    return kExitOk;
}

}  // namespace causal
