#include "causal/agent.hpp"
#include "causal/backends.hpp"
#include "causal/scm.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace causal;

namespace {

DataTable demo_table() {
    CausalGraph g({"smoking", "yellow fingers", "lung cancer"});
    g.add_directed("smoking", "yellow fingers");
    g.add_directed("smoking", "lung cancer");
    return sample_table(make_scm(g, MechanismFamily::linear, 3), 2000, 0, "data");
}

BackendConfig fast_config() {
    BackendConfig c;
    c.retry_base_delay = std::chrono::milliseconds(0);
    return c;
}

class FailingBackend : public Backend {
public:
    explicit FailingBackend(std::size_t good) : good_(good) {}
    std::string complete(const std::string&, const Transcript&) override {
        if (calls_++ < good_)
            return " look\nAction: Generate Causal\nAction Input: {\"filename\": \"data.csv\"}";
        throw BackendError("connection refused");
    }
    std::size_t calls_ = 0;

private:
    std::size_t good_;
};

}  // namespace

TEST_CASE("prompt layout") {
    Transcript empty;
    const auto zero = render_prompt("Is A a cause of B?", default_tools(), false, empty);
    CHECK(zero.starts_with("Answer the following questions as best you can. You have access to the following tools:"));
    CHECK(zero.ends_with("Question: Is A a cause of B?\nThought:"));
    CHECK(zero.find("##DEMO:") == std::string::npos);
    CHECK(zero.find("[condition independent test,Generate Causal,") != std::string::npos);

    const auto icl = render_prompt("q", default_tools(), true, empty);
    CHECK(icl.find("##DEMO:\n") != std::string::npos);
    CHECK(icl.find("Final Answer:{\"answer\":\"uncertain\"}") != std::string::npos);
    CHECK(icl.find("##Requirement:\nAnswer the following questions with examples:\n\n") != std::string::npos);

    Transcript t;
    t.steps.push_back({"think", "Generate Causal", "{}", "done", false});
    CHECK(render_prompt("q", default_tools(), false, t)
              .ends_with("Thought: think\nAction: Generate Causal\nAction Input: {}\nObservation: done\nThought:"));
}

TEST_CASE("model output parsing") {
    const auto a = parse_model_step(
        " I should test\nAction: condition independent test\nAction Input: {\"filename\": \"d.csv\"} trailing");
    REQUIRE(std::holds_alternative<ActionStep>(a));
    CHECK(std::get<ActionStep>(a).thought == "I should test");
    CHECK(std::get<ActionStep>(a).action == "condition independent test");
    CHECK(std::get<ActionStep>(a).action_input == "{\"filename\": \"d.csv\"}");

    const auto f = parse_model_step(" I now know the final answer\nFinal Answer: {\"answer\":\"yes\"} because");
    REQUIRE(std::holds_alternative<FinalStep>(f));
    CHECK(std::get<FinalStep>(f).answer == "{\"answer\":\"yes\"}");
    CHECK(std::get<FinalStep>(f).thought == "I now know the final answer");

    const auto plain = parse_model_step("Thought: done\nFinal Answer: no");
    REQUIRE(std::holds_alternative<FinalStep>(plain));
    CHECK(std::get<FinalStep>(plain).answer == "no");

    CHECK(std::holds_alternative<ParseFailure>(parse_model_step("I am not sure what to do")));
    CHECK(std::holds_alternative<ParseFailure>(parse_model_step("Action: Generate Causal")));
}

TEST_CASE("render then parse recovers each step") {
    const std::vector<ActionStep> steps{
        {"first", "Generate Causal", "{\"filename\": \"a.csv\"}"},
        {"second", "Determine collider", "{\"cg name\": \"a\", \"interesting var\": [\"x\", \"y\"]}"},
        {"third", "calculate CATE", "{\"filename\": \"a.csv\", \"config\": {\"Y\": [\"y\"]}}"},
    };
    for (const auto& s : steps) {
        const auto text = " " + s.thought + "\nAction: " + s.action + "\nAction Input: " + s.action_input;
        const auto back = parse_model_step(text);
        REQUIRE(std::holds_alternative<ActionStep>(back));
        CHECK(std::get<ActionStep>(back).thought == s.thought);
        CHECK(std::get<ActionStep>(back).action == s.action);
        CHECK(std::get<ActionStep>(back).action_input == s.action_input);
    }
}

TEST_CASE("demo replay reproduces the demo dialogue") {
    const auto script = demo_replay_script();
    REQUIRE(script.size() == 6);
    TableStore tables;
    tables.add("data.csv", demo_table());
    ScriptedBackend backend(script);
    const auto result = run_session("demo", tables, backend, fast_config());
    const auto& steps = result.transcript.steps;
    REQUIRE(steps.size() == 5);
    const std::vector<std::string> expected{"Generate Causal", "Determine edge directions", "Determine collider",
                                            "Determine confounder", "condition independent test"};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(steps[i].action == expected[i]);
        CHECK_FALSE(steps[i].parse_error);
    }
    CHECK(steps[0].observation == "causal graph named 'data' is generate succeed! and have written to the memory.");
    CHECK(steps[4].observation.find("somking") != std::string::npos);
    REQUIRE(result.transcript.final_answer.has_value());
    CHECK(*result.transcript.final_answer == "{\"answer\":\"uncertain\"}");
    CHECK(result.memory.size() == 1);

    ScriptedBackend again(script);
    TableStore tables2;
    tables2.add("data.csv", demo_table());
    CHECK(transcript_jsonl(run_session("demo", tables2, again, fast_config()).transcript) ==
          transcript_jsonl(result.transcript));
}

TEST_CASE("session error handling") {
    TableStore tables;
    tables.add("data.csv", demo_table());

    SUBCASE("unknown tool") {
        ScriptedBackend b({" x\nAction: Search\nAction Input: {}", " y\nFinal Answer: {\"answer\":\"no\"}"});
        const auto r = run_session("q", tables, b, fast_config());
        REQUIRE(r.transcript.steps.size() == 1);
        CHECK(r.transcript.steps[0].observation.starts_with("'Search' is an unknown tool. Action must be one of ["));
    }
    SUBCASE("iteration cap") {
        auto cfg = fast_config();
        cfg.max_iterations = 1;
        ScriptedBackend b({" x\nAction: Generate Causal\nAction Input: {\"filename\": \"data.csv\"}",
                           " y\nFinal Answer: {\"answer\":\"no\"}"});
        const auto r = run_session("q", tables, b, cfg);
        CHECK(r.transcript.steps.size() == 1);
        CHECK_FALSE(r.transcript.final_answer.has_value());
        CHECK(b.calls() == 1);
    }
    SUBCASE("unparseable output") {
        ScriptedBackend b({"hmm", " y\nFinal Answer: {\"answer\":\"no\"}"});
        const auto r = run_session("q", tables, b, fast_config());
        REQUIRE(r.transcript.steps.size() == 1);
        CHECK(r.transcript.steps[0].parse_error);
        CHECK(r.transcript.steps[0].observation.starts_with("Invalid Format: "));
        CHECK(r.transcript.final_answer == std::optional<std::string>("{\"answer\":\"no\"}"));
    }
    SUBCASE("backend keeps failing") {
        FailingBackend b(1);
        try {
            run_session("q", tables, b, fast_config());
            FAIL("expected SessionError");
        } catch (const SessionError& e) {
            CHECK(std::string(e.what()).find("connection refused") != std::string::npos);
            CHECK(e.partial().steps.size() == 1);
            CHECK(b.calls_ == 1 + 1 + 3);
        }
    }
    SUBCASE("exhausted script") {
        ScriptedBackend b({});
        CHECK_THROWS_AS(run_session("q", tables, b, fast_config()), SessionError);
    }
}

TEST_CASE("graph memory naming and isolation") {
    GraphMemory m;
    CausalGraph g({"A"});
    CHECK(m.store("data", g) == "data");
    CHECK(m.store("data", g) == "data 2");
    CHECK(m.store("data", g) == "data 3");
    CHECK(m.find("data 2") != nullptr);
    CHECK(m.find("data 4") == nullptr);

    TableStore tables;
    tables.add("data.csv", demo_table());
    const std::vector<std::string> script{" a\nAction: Generate Causal\nAction Input: {\"filename\": \"data.csv\"}",
                                          " b\nFinal Answer: {\"answer\":\"data\"}"};
    ScriptedBackend first(script), second(script);
    const auto r1 = run_session("q", tables, first, fast_config());
    const auto r2 = run_session("q", tables, second, fast_config());
    CHECK(r1.memory.size() == 1);
    CHECK(r2.memory.size() == 1);
    CHECK(r2.transcript.steps[0].observation.find("named 'data'") != std::string::npos);
}

TEST_CASE("tool dispatch") {
    GraphMemory memory;
    TableStore tables;
    tables.add("data.csv", demo_table());
    ToolContext ctx{memory, tables};
    const auto& tools = default_tools();
    REQUIRE(tools.size() == 6);

    CHECK(find_tool(tools, " Generate Causal ") == &tools[1]);
    CHECK(find_tool(tools, "calculate ATE") == &tools[5]);
    CHECK(find_tool(tools, "Search") == nullptr);

    const auto norm = normalize_arguments(nlohmann::json::parse(R"({"Interesting_Var": [1], "analyze-relationship": 1})"));
    CHECK(norm.contains("interesting var"));
    CHECK(norm.contains("analyse relationship"));

    bool ok = true;
    CHECK(dispatch_tool(tools[0], "[1, 2]", ctx, &ok).starts_with("Invalid Action Input for condition independent test"));
    CHECK_FALSE(ok);
    CHECK(dispatch_tool(tools[0], R"({"filename": "data.csv"})", ctx, &ok).starts_with("Invalid Action Input"));
    CHECK_FALSE(ok);
    CHECK(dispatch_tool(tools[0], R"({"filename": "nope.csv", "interesting var": ["a", "b"]})", ctx, &ok)
              .find("not found") != std::string::npos);
    CHECK_FALSE(ok);

    const auto marginal = dispatch_tool(
        tools[0], R"({"filename": "data.csv", "interesting var": ["smoking", "lung cancer"], "condition": []})", ctx, &ok);
    CHECK(ok);
    CHECK(marginal == "smoking and lung cancer is not independent");

    const auto given = dispatch_tool(
        tools[0], R"({"filename": "data.csv", "interesting var": ["yellow fingers", "lung cancer"], "condition": ["smoking"]})",
        ctx, &ok);
    CHECK(given == "yellow fingers and lung cancer is independent under conditions: smoking");

    CHECK(dispatch_tool(tools[2], R"({"cg name": "data", "interesting var": ["smoking", "lung cancer"]})", ctx, &ok)
              .find("causal graph named 'data' is not in the memory") != std::string::npos);
    CHECK(dispatch_tool(tools[1], R"({"filename": "data.csv", "analyse relationship": "True"})", ctx, &ok) ==
          "causal graph named 'data' is generate succeed! and have written to the memory.");
    CHECK(dispatch_tool(tools[3], R"({"cg name": "data", "interesting var": ["smoking", "tar"]})", ctx, &ok)
              .find("variable 'tar' is not a node of the causal graph") != std::string::npos);
    CHECK(dispatch_tool(tools[2], R"({"cg name": "data", "interesting var": ["yellow fingers", "lung cancer"]})", ctx, &ok)
              .starts_with("no,"));

    const auto same = dispatch_tool(
        tools[5],
        R"({"filename": "data.csv", "config": {"Y": ["lung cancer"], "T": ["smoking"], "X": [], "T0": 1, "T1": 1}})", ctx,
        &ok);
    CHECK(ok);
    CHECK(same.ends_with(" is 0.000"));
}

TEST_CASE("HTTP chat backend") {
    httplib::Server server;
    std::string seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":" ok\nFinal Answer: {\"answer\":\"yes\"}"}}]})",
                        "application/json");
    });
    server.Post("/broken/chat/completions",
                [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    BackendConfig cfg = fast_config();
    cfg.mode = BackendMode::http_chat;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    HttpChatBackend good(cfg);
    CHECK(good.complete("prompt text", Transcript{}) == " ok\nFinal Answer: {\"answer\":\"yes\"}");
    const auto body = nlohmann::json::parse(seen_body);
    CHECK(body.at("model") == "gpt-3.5-turbo");
    CHECK(body.at("messages").at(0).at("content") == "prompt text");
    CHECK(body.at("stop").at(0) == "\nObservation:");

    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/broken";
    HttpChatBackend bad(cfg);
    CHECK_THROWS_AS(bad.complete("p", Transcript{}), BackendError);

    server.stop();
    worker.join();
}

TEST_CASE("config validation") {
    BackendConfig c;
    CHECK_NOTHROW(c.validate());
    c.max_iterations = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.max_iterations = 3;
    c.temperature = -1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
