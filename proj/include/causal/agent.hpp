#pragma once

#include "causal/error.hpp"
#include "causal/graph.hpp"
#include "causal/tabular.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace causal {

/// Named causal graphs produced during one session.
class GraphMemory {
public:
    /// Stores `graph` under `stem`, or "stem 2", "stem 3", ... when taken.
    std::string store(std::string_view stem, CausalGraph graph);
    const CausalGraph* find(std::string_view name) const;
    std::size_t size() const { return graphs_.size(); }
    const std::map<std::string, CausalGraph, std::less<>>& entries() const { return graphs_; }

private:
    std::map<std::string, CausalGraph, std::less<>> graphs_;
};

/// Tables addressable by file name. Unregistered names are loaded from
/// `base_dir` on first use and cached.
class TableStore {
public:
    explicit TableStore(std::filesystem::path base_dir = {});

    void add(std::string filename, DataTable table);
    /// Throws DataError when the file is neither registered nor readable.
    const DataTable& get(std::string_view filename);

private:
    std::filesystem::path base_dir_;
    std::map<std::string, std::unique_ptr<DataTable>, std::less<>> tables_;
    std::mutex mutex_;
};

struct ToolContext {
    GraphMemory& memory;
    TableStore& tables;
    double alpha = 0.05;
    std::size_t extension_cap = kDefaultExtensionCap;
};

/// Receives the argument object with normalized keys.
using ToolHandler = std::function<std::string(const nlohmann::json& args, ToolContext& ctx)>;

struct ToolSpec {
    std::string name;
    /// Prompt text, including the leading "<name>: ".
    std::string description;
    ToolHandler handler;
    std::vector<std::string> aliases;
};

/// The six analysis tools with their prompt descriptions.
const std::vector<ToolSpec>& default_tools();

/// Exact match on the trimmed name or an alias.
const ToolSpec* find_tool(const std::vector<ToolSpec>& tools, std::string_view name);

/// Lower-cases keys, maps '_' to ' ', collapses blanks and spells "analyze"
/// as "analyse", recursively through nested objects.
nlohmann::json normalize_arguments(const nlohmann::json& args);

/// Runs one tool. Every failure, including malformed JSON, comes back as an
/// observation string; `ok`, when given, reports whether the tool succeeded.
std::string dispatch_tool(const ToolSpec& spec, std::string_view raw_json, ToolContext& ctx, bool* ok = nullptr);

std::string unknown_tool_observation(std::string_view name, const std::vector<ToolSpec>& tools);

struct Step {
    std::string thought;
    std::string action;
    std::string action_input;
    std::string observation;
    /// Set when the model output could not be parsed; `thought` then holds it raw.
    bool parse_error = false;

    bool operator==(const Step&) const = default;
};

struct Transcript {
    std::string question;
    std::vector<Step> steps;
    std::optional<std::string> final_thought;
    std::optional<std::string> final_answer;

    bool operator==(const Transcript&) const = default;
};

/// Zero-shot prompt, or the one-shot variant with the demo, followed by the
/// serialized scratchpad.
std::string render_prompt(std::string_view question, const std::vector<ToolSpec>& tools, bool icl,
                          const Transcript& transcript);

struct ActionStep {
    std::string thought;
    std::string action;
    std::string action_input;
};
struct FinalStep {
    std::string thought;
    std::string answer;
};
struct ParseFailure {
    std::string reason;
};
using ModelStep = std::variant<ActionStep, FinalStep, ParseFailure>;

ModelStep parse_model_step(std::string_view text);

/// Raised by a backend when it cannot produce a completion.
class BackendError : public Error {
public:
    using Error::Error;
};

/// Raised when the backend keeps failing; carries the partial transcript.
class SessionError : public Error {
public:
    SessionError(const std::string& what, Transcript partial) : Error(what), partial_(std::move(partial)) {}
    const Transcript& partial() const { return partial_; }

private:
    Transcript partial_;
};

class Backend {
public:
    virtual ~Backend() = default;
    /// One completion for `prompt`. `so_far` is the same dialogue in structured form.
    virtual std::string complete(const std::string& prompt, const Transcript& so_far) = 0;
};

enum class BackendMode { http_chat, scripted, oracle };

struct BackendConfig {
    BackendMode mode = BackendMode::scripted;
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.5;
    std::size_t max_iterations = 10;
    std::size_t max_retries = 3;
    std::chrono::milliseconds retry_base_delay{500};
    bool icl = false;

    /// Throws std::invalid_argument on a negative temperature or zero iterations.
    void validate() const;
};

struct SessionResult {
    Transcript transcript;
    GraphMemory memory;
};

/// ReAct loop: render, complete, parse, dispatch, observe, until a final
/// answer or `max_iterations` backend calls.
SessionResult run_session(std::string_view question, TableStore& tables, Backend& backend,
                          const BackendConfig& config, const std::vector<ToolSpec>& tools = default_tools(),
                          double alpha = 0.05);

/// One JSON object per line: the question, each step, then the final answer.
std::string transcript_jsonl(const Transcript& transcript);

}  // namespace causal
