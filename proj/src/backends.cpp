#include "causal/backends.hpp"

#include "causal/dml.hpp"
#include "causal/resources.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>

namespace causal {

namespace {

using nlohmann::json;

std::string trim_copy(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

std::string action_text(std::string_view thought, std::string_view tool, const json& input) {
    return " " + std::string(thought) + "\nAction: " + std::string(tool) + "\nAction Input: " + input.dump();
}

std::string final_text(const json& answer) {
    return " I now know the final answer\nFinal Answer: " + json{{"answer", answer}}.dump();
}

std::optional<std::string> graph_name_from(std::string_view observation) {
    constexpr std::string_view open = "named '";
    const auto b = observation.find(open);
    if (b == std::string_view::npos) return std::nullopt;
    const auto e = observation.find("' is generate succeed!", b);
    if (e == std::string_view::npos) return std::nullopt;
    return std::string(observation.substr(b + open.size(), e - b - open.size()));
}

std::string verdict_from(std::string_view observation) {
    for (const char* v : {"yes", "no", "uncertain"})
        if (observation.starts_with(std::string(v) + ",")) return v;
    return "uncertain";
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<std::string> outputs) : outputs_(std::move(outputs)) {}

std::string ScriptedBackend::complete(const std::string&, const Transcript&) {
    if (next_ >= outputs_.size())
        throw BackendError("replay script exhausted after " + std::to_string(outputs_.size()) + " outputs");
    return outputs_[next_++];
}

std::vector<std::string> load_replay(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open replay file '" + path.string() + "'");
    try {
        const auto doc = json::parse(in);
        return doc.get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw DataError("replay file '" + path.string() + "' must be a JSON array of strings: " + e.what());
    }
}

std::vector<std::string> demo_replay_script() {
    const std::string_view demo = resources::icl_demo();
    std::string_view rest = demo.substr(demo.find("Thought:"));
    std::vector<std::string> outputs;
    for (;;) {
        const auto obs = rest.find("\nObservation:");
        if (obs == std::string_view::npos) {
            outputs.push_back(trim_copy(rest));
            break;
        }
        outputs.push_back(trim_copy(rest.substr(0, obs)));
        const auto line_end = rest.find('\n', obs + 1);
        if (line_end == std::string_view::npos) break;
        rest = rest.substr(line_end + 1);
    }
    return outputs;
}

HttpChatBackend::HttpChatBackend(BackendConfig config) : config_(std::move(config)) {
    for (const char* var : {"CAUSAL_AGENT_API_KEY", "OPENAI_API_KEY"}) {
        if (const char* key = std::getenv(var); key && *key) {
            api_key_ = key;
            break;
        }
    }
}

std::string HttpChatBackend::complete(const std::string& prompt, const Transcript&) {
    const auto& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw BackendError("endpoint '" + url + "' lacks a scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client client(origin);
    if (!client.is_valid()) throw BackendError("cannot connect to '" + origin + "'");
    client.set_connection_timeout(10);
    client.set_read_timeout(120);

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const json body{{"model", config_.model},
                    {"temperature", config_.temperature},
                    {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                    {"stop", json::array({"\nObservation:"})}};

    const auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw BackendError("request to '" + url + "' failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw BackendError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 200));
    try {
        const auto doc = json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("unexpected chat response: ") + e.what());
    }
}

OraclePolicyBackend::OraclePolicyBackend(BenchItem item) : item_(std::move(item)) {}

std::string OraclePolicyBackend::complete(const std::string&, const Transcript& so_far) {
    const auto& steps = so_far.steps;
    const auto& vars = item_.variables;
    const std::string_view last = steps.empty() ? std::string_view{} : std::string_view(steps.back().observation);

    switch (item_.category) {
        case Category::IT:
        case Category::CIT:
        case Category::MULTCIT: {
            if (steps.empty()) {
                return action_text("I should test the independence directly on the data.", "condition independent test",
                                   {{"filename", item_.filename},
                                    {"interesting var", vars},
                                    {"condition", item_.conditions}});
            }
            if (last.find(" is not independent") != std::string_view::npos) return final_text("no");
            if (last.find(" is independent") != std::string_view::npos) return final_text("yes");
            return final_text("uncertain");
        }
        case Category::CAUSE:
        case Category::COLLIDER:
        case Category::CONF: {
            if (steps.empty()) {
                return action_text("I need to generate the causal graph first.", "Generate Causal",
                                   {{"filename", item_.filename}, {"analyse relationship", "True"}});
            }
            if (steps.size() == 1) {
                const auto name = graph_name_from(last);
                if (!name) return final_text("uncertain");
                const char* tool = item_.category == Category::CAUSE      ? "Determine edge directions"
                                   : item_.category == Category::COLLIDER ? "Determine collider"
                                                                          : "Determine confounder";
                return action_text("Now I can inspect the relationship in the graph.", tool,
                                   {{"cg name", *name}, {"interesting var", vars}});
            }
            return final_text(verdict_from(last));
        }
        case Category::TOTAL:
        case Category::PARTIAL: {
            if (steps.empty()) {
                json input{{"filename", item_.filename}};
                if (item_.category == Category::TOTAL) {
                    input["analyse relationship"] = "True";
                } else {
                    input["analyse relationship"] = "False";
                    input["interesting var"] = vars;
                }
                return action_text("I need to generate the causal graph.", "Generate Causal", input);
            }
            const auto name = graph_name_from(last);
            return final_text(name ? *name : "");
        }
        case Category::ATE: {
            if (steps.empty()) {
                const json config{{"Y", json::array({vars.at(1)})},
                                  {"T", json::array({vars.at(0)})},
                                  {"X", item_.conditions},
                                  {"T0", item_.t0},
                                  {"T1", item_.t1}};
                return action_text("I should estimate the effect with the CATE tool.", "calculate CATE",
                                   {{"filename", item_.filename}, {"config", config}});
            }
            const auto pos = last.rfind(" is ");
            if (pos != std::string_view::npos) {
                const std::string number(trim_copy(last.substr(pos + 4)));
                char* end = nullptr;
                const double v = std::strtod(number.c_str(), &end);
                if (end && *end == '\0' && !number.empty()) return final_text(v);
            }
            return final_text("unknown");
        }
    }
    return final_text("uncertain");
}

}  // namespace causal
