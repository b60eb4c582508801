#include "causal/agent.hpp"

#include "causal/resources.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace causal {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_thought_label(std::string_view s) {
    s = trim(s);
    if (s.starts_with("Thought:")) s = trim(s.substr(8));
    return std::string(s);
}

/// Length of the first balanced JSON object at the start of `s`, or npos.
std::size_t json_object_length(std::string_view s) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

/// JSON-looking input is cut after its first complete object; anything else
/// after the first line.
std::string take_input(std::string_view rest) {
    rest = trim(rest);
    if (rest.starts_with('{')) {
        const auto len = json_object_length(rest);
        if (len != std::string_view::npos) return std::string(rest.substr(0, len));
    }
    return std::string(trim(rest.substr(0, rest.find('\n'))));
}

}  // namespace

std::string GraphMemory::store(std::string_view stem, CausalGraph graph) {
    std::string name(stem);
    for (std::size_t k = 2; graphs_.count(name); ++k) name = std::string(stem) + " " + std::to_string(k);
    graphs_.emplace(name, std::move(graph));
    return name;
}

const CausalGraph* GraphMemory::find(std::string_view name) const {
    const auto it = graphs_.find(name);
    return it == graphs_.end() ? nullptr : &it->second;
}

TableStore::TableStore(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

void TableStore::add(std::string filename, DataTable table) {
    std::lock_guard lock(mutex_);
    tables_[std::move(filename)] = std::make_unique<DataTable>(std::move(table));
}

const DataTable& TableStore::get(std::string_view filename) {
    std::lock_guard lock(mutex_);
    const std::string key(trim(filename));
    if (const auto it = tables_.find(key); it != tables_.end()) return *it->second;
    const std::filesystem::path path = base_dir_.empty() ? std::filesystem::path(key) : base_dir_ / key;
    if (key.empty() || !std::filesystem::is_regular_file(path))
        throw DataError("data file '" + key + "' not found");
    auto table = std::make_unique<DataTable>(load_csv(path));
    return *(tables_[key] = std::move(table));
}

std::string render_prompt(std::string_view question, const std::vector<ToolSpec>& tools, bool icl,
                          const Transcript& transcript) {
    if (tools.empty()) throw std::invalid_argument("render_prompt needs at least one tool");
    std::string p = "Answer the following questions as best you can. You have access to the following tools:\n\n";
    for (const auto& t : tools) p += t.description + "\n\n";
    p += "Use the following format:\n\n"
         "Question: the input question you must answer\n"
         "Thought: you should always think about what to do\n"
         "Action: the action to take, should be one of [";
    for (std::size_t i = 0; i < tools.size(); ++i) {
        if (i) p += ',';
        p += tools[i].name;
    }
    p += "]\n"
         "Action Input: the input to the action\n"
         "Observation: the result of the action\n"
         "... (this Thought/Action/Action Input/Observation can repeat N times)\n"
         "Thought: I now know the final answer\n"
         "Final Answer: the final answer to the original input question\n\n"
         "Begin!\n\n";
    if (icl) {
        p += "##DEMO:\n";
        p += resources::icl_demo();
        p += "\n\n##Requirement:\nAnswer the following questions with examples:\n\n";
    }
    p += "Question: ";
    p += question;
    p += "\nThought:";
    for (const auto& s : transcript.steps) {
        if (!s.thought.empty()) p += " " + s.thought;
        if (!s.parse_error) p += "\nAction: " + s.action + "\nAction Input: " + s.action_input;
        p += "\nObservation: " + s.observation + "\nThought:";
    }
    return p;
}

ModelStep parse_model_step(std::string_view text) {
    const auto final_pos = text.find("Final Answer:");
    const auto action_pos = text.find("Action:");
    if (final_pos != std::string_view::npos && (action_pos == std::string_view::npos || final_pos < action_pos)) {
        auto rest = trim(text.substr(final_pos + 13));
        std::string answer(rest);
        if (rest.starts_with('{')) {
            const auto len = json_object_length(rest);
            if (len != std::string_view::npos) answer = std::string(rest.substr(0, len));
        }
        return FinalStep{strip_thought_label(text.substr(0, final_pos)), answer};
    }
    if (action_pos == std::string_view::npos)
        return ParseFailure{"no 'Action:' or 'Final Answer:' found"};

    const auto after = text.substr(action_pos + 7);
    const auto input_pos = after.find("Action Input:");
    if (input_pos == std::string_view::npos) return ParseFailure{"'Action:' without 'Action Input:'"};
    const auto action_line = after.substr(0, std::min(after.find('\n'), input_pos));
    ActionStep step;
    step.thought = strip_thought_label(text.substr(0, action_pos));
    step.action = std::string(trim(action_line));
    step.action_input = take_input(after.substr(input_pos + 13));
    if (step.action.empty()) return ParseFailure{"empty action name"};
    return step;
}

void BackendConfig::validate() const {
    if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

SessionResult run_session(std::string_view question, TableStore& tables, Backend& backend,
                          const BackendConfig& config, const std::vector<ToolSpec>& tools, double alpha) {
    config.validate();
    SessionResult result;
    Transcript& tr = result.transcript;
    tr.question = std::string(question);
    ToolContext ctx{result.memory, tables, alpha};

    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
        const auto prompt = render_prompt(question, tools, config.icl, tr);
        std::string output;
        for (std::size_t attempt = 0;; ++attempt) {
            try {
                output = backend.complete(prompt, tr);
                break;
            } catch (const BackendError& e) {
                if (attempt >= config.max_retries)
                    throw SessionError(std::string("backend failed after retries: ") + e.what(), tr);
                std::this_thread::sleep_for(config.retry_base_delay * (1LL << attempt));
            }
        }

        const auto parsed = parse_model_step(output);
        if (const auto* fin = std::get_if<FinalStep>(&parsed)) {
            tr.final_thought = fin->thought;
            tr.final_answer = fin->answer;
            break;
        }
        Step step;
        if (const auto* act = std::get_if<ActionStep>(&parsed)) {
            step.thought = act->thought;
            step.action = act->action;
            step.action_input = act->action_input;
            const ToolSpec* spec = find_tool(tools, act->action);
            step.observation = spec ? dispatch_tool(*spec, act->action_input, ctx)
                                    : unknown_tool_observation(act->action, tools);
        } else {
            step.thought = std::string(trim(output));
            step.parse_error = true;
            step.observation = "Invalid Format: " + std::get<ParseFailure>(parsed).reason +
                               ". Reply with 'Action:' and 'Action Input:' lines, or with 'Final Answer:'.";
        }
        tr.steps.push_back(std::move(step));
    }
    return result;
}

std::string transcript_jsonl(const Transcript& transcript) {
    using ojson = nlohmann::ordered_json;
    std::string out = ojson{{"type", "question"}, {"text", transcript.question}}.dump() + "\n";
    for (std::size_t i = 0; i < transcript.steps.size(); ++i) {
        const auto& s = transcript.steps[i];
        out += ojson{{"type", "step"},
                     {"index", i},
                     {"thought", s.thought},
                     {"action", s.action},
                     {"action_input", s.action_input},
                     {"observation", s.observation},
                     {"parse_error", s.parse_error}}
                   .dump() +
               "\n";
    }
    ojson fin{{"type", "final"}};
    fin["thought"] = transcript.final_thought ? ojson(*transcript.final_thought) : ojson(nullptr);
    fin["answer"] = transcript.final_answer ? ojson(*transcript.final_answer) : ojson(nullptr);
    return out + fin.dump() + "\n";
}

}  // namespace causal
