#include "causal/agent.hpp"

#include "causal/ci_test.hpp"
#include "causal/dml.hpp"
#include "causal/edge_tools.hpp"
#include "causal/pc.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace causal {

namespace {

using nlohmann::json;

/// Bad or missing tool arguments; the message is shown to the agent.
class ArgumentError : public Error {
public:
    using Error::Error;
};

constexpr const char* kCiDescription =
    R"(condition independent test: Useful for when you need to test the *** independent or d-separate *** of variable A and variable B condition on variable C. input should be a json with the format below 
{"filename":...,"interesting var":[...],"condition":[...]}

interesting var is a list of variables the user interested in. For example, if the user wants to test independent(d-separate) between X and Y conditions on Z, W,Q, interesting var is 
["X","Y"]
, condition is 
["Z","W","Q"]
. condition is 
[] 
if no condition is provided)";

constexpr const char* kGenerateDescription =
    R"(Generate Causal: Useful for when you need to generate causal graph (or partial causal graph). input should be a json with the format below 
{"filename":...,"analyse relationship":...,"interesting var":[...](Optional)}
.if you want to analyze relationship between variables( such as cause-effect, coufounder , Collider), analyse relationship = "True" and please generate complete causal graph and  interesting var is [](which means causal graph contain all variables).if we only need to generate **partial causal graph** (for example, generate a partial causal graph for some variables), interesting var is used and it's values are list of variables appear in causal graph and analyse relationship is "False".Further more, if needed, you can analyse variables relationship in causal graph generated by this tool through these tools: Determine collider,Determine confounder,Determine edge direction)";

constexpr const char* kColliderDescription =
    R"(Determine collider: you should first generate causal graph and then use this tool. Useful When we are interested in whether there is a collider between two variables(ie common effect), we use this tool and the input is {"cg name":...,"interesting var":[...]}, where interesting var is what Variable we want to test, cg name is the name of causal generated by 'Generate Causal'.The output of the tool is yes or no or uncertainty and may be the variable name of the collider. Make sure the causal graph has been generated before using this tool)";

constexpr const char* kConfounderDescription =
    R"(Determine confounder: you should first generate causal graph and then use this tool. Useful When we are interested in whether there is a cofounder (ie common cause) between two variables, we use this tool and the input is {"cg name":...,"interesting var":[...]}, where interesting var is what Variable we want to test, cg name is the name of causal generated by 'Generate Causal'.The output of the tool is yes or no or uncertainty and the backdoor path that may lead to the existence of the cofounder. Make sure the causal graph has been generated before using this tool)";

constexpr const char* kDirectionDescription =
    R"(Determine edge directions: you should first generate causal graph and then use this tool.Useful when we are interested in whether there is a direct edge between two variables and the direction of the edge (such as determining whether A directly leads to B)., we use this tool and the input is {"cg name"=...,"interesting var"=[...]}, where interesting var is what Variable we want to test, cg name is the name of causal generated by 'Generate Causal'.The output of the tool is the relationship of two variables (ie A cause B). Make sure the causal graph has been generated before using this tool)";

constexpr const char* kCateDescription =
    R"(calculate CATE: Useful for when you need to calculate (conditional) average treatment effect (ATE or CATE, etc. in math function is E(Y(T=T1)-Y(T=T0) | X=x) and means if we use treatment, what uplift we will get from treatment).This tool use double machine learn algorithm to calculate ate. input is  a json with format {"filename":...,config: {Y:[...],T:[...],X:[...],T0:...,T1:...} }. Y are names of outcome, T are names of treatment, X are names of covariate affect both T and Y (i.e. confounder). T1 and T0 are two different values of T that need to be calculated in ATE. you should extract each name from the description.)";

std::string trimmed(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

std::string normalize_key(std::string_view key) {
    std::string out;
    bool blank = false;
    for (char c : key) {
        if (c == '_' || c == '-' || std::isspace(static_cast<unsigned char>(c))) {
            blank = !out.empty();
            continue;
        }
        if (blank) out += ' ';
        blank = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (std::size_t pos; (pos = out.find("analyze")) != std::string::npos;) out.replace(pos, 7, "analyse");
    return out;
}

std::string require_string(const json& args, const char* key) {
    if (!args.contains(key)) throw ArgumentError(std::string("missing argument \"") + key + "\"");
    const auto& v = args.at(key);
    if (!v.is_string() || trimmed(v.get<std::string>()).empty())
        throw ArgumentError(std::string("argument \"") + key + "\" must be a non-empty string");
    return trimmed(v.get<std::string>());
}

std::vector<std::string> string_list(const json& args, const char* key, bool required) {
    if (!args.contains(key) || args.at(key).is_null()) {
        if (required) throw ArgumentError(std::string("missing argument \"") + key + "\"");
        return {};
    }
    const auto& v = args.at(key);
    std::vector<std::string> out;
    if (v.is_string()) {
        if (!trimmed(v.get<std::string>()).empty()) out.push_back(trimmed(v.get<std::string>()));
        return out;
    }
    if (!v.is_array()) throw ArgumentError(std::string("argument \"") + key + "\" must be a list of variable names");
    for (const auto& e : v) {
        if (!e.is_string()) throw ArgumentError(std::string("argument \"") + key + "\" must contain only strings");
        out.push_back(trimmed(e.get<std::string>()));
    }
    return out;
}

std::pair<std::string, std::string> variable_pair(const json& args) {
    const auto vars = string_list(args, "interesting var", true);
    if (vars.size() != 2)
        throw ArgumentError("\"interesting var\" must list exactly two variables, got " + std::to_string(vars.size()));
    return {vars[0], vars[1]};
}

bool truthy(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        auto s = normalize_key(v.get<std::string>());
        if (s == "true" || s == "yes" || s == "1") return true;
        if (s == "false" || s == "no" || s == "0") return false;
    }
    if (v.is_number()) return v.get<double>() != 0.0;
    throw ArgumentError("\"analyse relationship\" must be \"True\" or \"False\"");
}

double number_arg(const json& cfg, const char* key) {
    if (!cfg.contains(key)) throw ArgumentError(std::string("missing config value \"") + key + "\"");
    const auto& v = cfg.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 1) return number_arg(json{{key, v.at(0)}}, key);
    if (v.is_string()) {
        const auto s = trimmed(v.get<std::string>());
        double d = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), d);
        if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return d;
    }
    throw ArgumentError(std::string("config value \"") + key + "\" must be a number");
}

std::string single_name(const json& cfg, const char* key) {
    const auto names = string_list(cfg, key, true);
    if (names.size() != 1) throw ArgumentError(std::string("config \"") + key + "\" must name exactly one variable");
    return names.front();
}

std::string graph_stem(const std::string& filename) {
    std::string stem = std::filesystem::path(filename).filename().string();
    if (stem.size() > 4 && stem.ends_with(".csv")) stem.resize(stem.size() - 4);
    return stem;
}

const CausalGraph& recall_graph(const json& args, ToolContext& ctx) {
    const auto name = require_string(args, "cg name");
    const CausalGraph* g = ctx.memory.find(name);
    if (!g) {
        throw ArgumentError("causal graph named '" + name +
                            "' is not in the memory. Generate it first with the Generate Causal tool and pass the "
                            "returned name as \"cg name\"");
    }
    return *g;
}

void require_nodes(const CausalGraph& g, const std::string& x, const std::string& y) {
    for (const auto& v : {x, y})
        if (!g.find(v)) throw ArgumentError("variable '" + v + "' is not a node of the causal graph");
    if (x == y) throw ArgumentError("the two interesting variables must differ");
}

std::string run_ci(const json& args, ToolContext& ctx) {
    const auto filename = require_string(args, "filename");
    const auto [x, y] = variable_pair(args);
    const auto condition = string_list(args, "condition", false);
    const DataTable& table = ctx.tables.get(filename);
    const auto result = condition.empty() ? marginal_independence(table, x, y, ctx.alpha)
                                          : fisher_z_test(table, x, y, condition, ctx.alpha);
    return describe(result);
}

std::string run_generate(const json& args, ToolContext& ctx) {
    const auto filename = require_string(args, "filename");
    const auto subset = string_list(args, "interesting var", false);
    const bool analyse = args.contains("analyse relationship") ? truthy(args.at("analyse relationship")) : subset.empty();
    const DataTable& table = ctx.tables.get(filename);
    CausalGraph g = (analyse || subset.empty()) ? run_pc(table, ctx.alpha) : run_pc_partial(table, subset, ctx.alpha);
    const auto name = ctx.memory.store(graph_stem(filename), std::move(g));
    return "causal graph named '" + name + "' is generate succeed! and have written to the memory.";
}

template <EdgeVerdict (*Fn)(const CausalGraph&, std::string_view, std::string_view, std::size_t)>
std::string run_edge_tool(const json& args, ToolContext& ctx) {
    const CausalGraph& g = recall_graph(args, ctx);
    const auto [x, y] = variable_pair(args);
    require_nodes(g, x, y);
    return Fn(g, x, y, ctx.extension_cap).narrative;
}

std::string run_cate(const json& args, ToolContext& ctx) {
    const auto filename = require_string(args, "filename");
    const json& cfg = args.contains("config") ? args.at("config") : args;
    if (!cfg.is_object()) throw ArgumentError("\"config\" must be an object with Y, T, X, T0 and T1");
    DmlConfig dml;
    dml.outcome = single_name(cfg, "y");
    dml.treatment = single_name(cfg, "t");
    dml.covariates = string_list(cfg, "x", false);
    dml.t0 = number_arg(cfg, "t0");
    dml.t1 = number_arg(cfg, "t1");
    const auto est = estimate_ate(ctx.tables.get(filename), dml);
    return describe_ate(dml, est);
}

std::string example_input(const ToolSpec& spec) {
    if (spec.name == "Generate Causal") return R"({"filename": "data.csv", "analyse relationship": "True"})";
    if (spec.name == "condition independent test")
        return R"({"filename": "data.csv", "interesting var": ["A", "B"], "condition": []})";
    if (spec.name == "calculate CATE")
        return R"({"filename": "data.csv", "config": {"Y": ["B"], "T": ["A"], "X": [], "T0": 0, "T1": 1}})";
    return R"({"cg name": "data", "interesting var": ["A", "B"]})";
}

}  // namespace

json normalize_arguments(const json& args) {
    if (args.is_array()) {
        json out = json::array();
        for (const auto& e : args) out.push_back(normalize_arguments(e));
        return out;
    }
    if (!args.is_object()) return args;
    json out = json::object();
    for (const auto& [k, v] : args.items()) out[normalize_key(k)] = normalize_arguments(v);
    return out;
}

const std::vector<ToolSpec>& default_tools() {
    static const std::vector<ToolSpec> tools{
        {"condition independent test", kCiDescription, run_ci, {}},
        {"Generate Causal", kGenerateDescription, run_generate, {}},
        {"Determine collider", kColliderDescription, run_edge_tool<determine_collider>, {}},
        {"Determine confounder", kConfounderDescription, run_edge_tool<determine_confounder>, {}},
        {"Determine edge directions", kDirectionDescription, run_edge_tool<determine_direct_cause>, {}},
        {"calculate CATE", kCateDescription, run_cate, {"calculate ATE"}},
    };
    return tools;
}

const ToolSpec* find_tool(const std::vector<ToolSpec>& tools, std::string_view name) {
    const auto key = trimmed(name);
    for (const auto& t : tools) {
        if (t.name == key) return &t;
        if (std::find(t.aliases.begin(), t.aliases.end(), key) != t.aliases.end()) return &t;
    }
    return nullptr;
}

std::string unknown_tool_observation(std::string_view name, const std::vector<ToolSpec>& tools) {
    std::string out = "'" + trimmed(name) + "' is an unknown tool. Action must be one of [";
    for (std::size_t i = 0; i < tools.size(); ++i) {
        if (i) out += ',';
        out += tools[i].name;
    }
    return out + "]";
}

std::string dispatch_tool(const ToolSpec& spec, std::string_view raw_json, ToolContext& ctx, bool* ok) {
    if (ok) *ok = false;
    json args;
    try {
        args = json::parse(raw_json);
    } catch (const json::exception&) {
        args = nullptr;
    }
    if (!args.is_object()) {
        return "Invalid Action Input for " + spec.name + ": expected a JSON object such as " + example_input(spec);
    }
    try {
        auto observation = spec.handler(normalize_arguments(args), ctx);
        if (ok) *ok = true;
        return observation;
    } catch (const ArgumentError& e) {
        return "Invalid Action Input for " + spec.name + ": " + e.what() + ". Example: " + example_input(spec);
    } catch (const std::exception& e) {
        return spec.name + " failed: " + e.what();
    }
}

}  // namespace causal
