#include "causal/questions.hpp"

#include <doctest.h>

#include <set>
#include <stdexcept>

using namespace causal;

TEST_CASE("template instantiation") {
    const auto& it = question_templates(Category::IT);
    REQUIRE(it.size() == 10);
    const std::vector<std::string> pair{"smoking", "cancer"};
    CHECK(instantiate_question(it[0], pair) == "whether smoking and cancer is independent.");
    CHECK_THROWS_AS(instantiate_question(it[0], std::vector<std::string>{"smoking"}), std::invalid_argument);

    const auto& mult = question_templates(Category::MULTCIT);
    REQUIRE(mult[0].takes_list());
    const std::vector<std::string> conds{"age", "diet"};
    const auto q = instantiate_question(mult[0], pair, conds);
    CHECK(q.ends_with(": age, diet"));
    CHECK(q.find("smoking") != std::string::npos);
    CHECK_THROWS_AS(instantiate_question(mult[0], pair), std::invalid_argument);
    CHECK_THROWS_AS(instantiate_question(it[0], pair, conds), std::invalid_argument);
}

TEST_CASE("every category has templates with consistent arity") {
    for (Category c : kAllCategories) {
        const auto& ts = question_templates(c);
        CHECK_FALSE(ts.empty());
        for (const auto& t : ts) {
            std::size_t holes = 0;
            for (auto p = t.pattern.find("{}"); p != std::string::npos; p = t.pattern.find("{}", p + 2)) ++holes;
            CHECK(holes == t.arity);
            CHECK(t.category == c);
        }
        CHECK(parse_category(to_string(c)) == c);
    }
    CHECK(question_templates(Category::ATE)[0].arity == 5);
    CHECK_FALSE(parse_category("NOPE").has_value());
}

TEST_CASE("answer kinds and levels") {
    CHECK(answer_kind(Category::CIT) == AnswerKind::verdict);
    CHECK(answer_kind(Category::PARTIAL) == AnswerKind::graph);
    CHECK(answer_kind(Category::ATE) == AnswerKind::number);
    CHECK(level_of(Category::MULTCIT) == "variable");
    CHECK(level_of(Category::CONF) == "edge");
    CHECK(level_of(Category::TOTAL) == "graph");
    CHECK(level_of(Category::ATE) == "effect");
}

TEST_CASE("composed question is deterministic and names the data file") {
    const std::vector<std::string> elems{"smoking", "yellow fingers", "lung cancer"};
    const auto a = compose_question("whether smoking and lung cancer is independent.", Category::IT, Domain::medical,
                                    elems, "data.csv", {}, 7);
    CHECK(a == compose_question("whether smoking and lung cancer is independent.", Category::IT, Domain::medical, elems,
                                "data.csv", {}, 7));
    CHECK(a.starts_with("Consider 3 elements : smoking, yellow fingers, lung cancer."));
    CHECK(a.find("'data.csv'") != std::string::npos);
    CHECK(a.find("{\"answer\":\"yes\"}") != std::string::npos);

    const std::vector<std::string> cov{"age"};
    const auto ate = compose_question("calculate ...", Category::ATE, Domain::market, elems, "d.csv", cov, 1);
    CHECK(ate.find("age") != std::string::npos);
}

TEST_CASE("keyword lists") {
    for (Domain d : {Domain::medical, Domain::market}) {
        const auto& words = keywords(d);
        CHECK(words.size() == 100);
        CHECK(std::set<std::string>(words.begin(), words.end()).size() == 100);
        for (const auto& w : words) CHECK(w.find(',') == std::string::npos);
    }
    CHECK(parse_domain("market") == Domain::market);
}
