#include "causal/edge_tools.hpp"
#include "causal/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace causal;

namespace {

CausalGraph dag(std::vector<std::string> nodes, std::vector<std::pair<std::string, std::string>> edges) {
    CausalGraph g(std::move(nodes));
    for (const auto& [a, b] : edges) g.add_directed(a, b);
    return g;
}

}  // namespace

TEST_CASE("direct cause") {
    const auto g = dag({"X", "Y", "Z"}, {{"X", "Y"}});
    CHECK(determine_direct_cause(g, "X", "Y").verdict == Verdict::yes);
    CHECK(determine_direct_cause(g, "X", "Y").narrative == "yes, X is a direct cause of Y (edge X -> Y)");
    CHECK(determine_direct_cause(g, "Y", "X").verdict == Verdict::no);
    CHECK(determine_direct_cause(g, "Y", "X").narrative == "no, Y is an effect of X (edge X -> Y)");
    CHECK(determine_direct_cause(g, "X", "Z").narrative == "no, There is no direct edge linking X and Z");

    CausalGraph u({"X", "Y"});
    u.add_undirected("X", "Y");
    CHECK(determine_direct_cause(u, "X", "Y").verdict == Verdict::uncertain);
    CHECK(determine_direct_cause(u, "X", "Y").witnesses.empty());

    // Undirected edge whose reverse would create a new collider: the direction is implied.
    CausalGraph implied({"A", "B", "C"});
    implied.add_directed("A", "B");
    implied.add_undirected("B", "C");
    CHECK(determine_direct_cause(implied, "B", "C").verdict == Verdict::yes);
}

TEST_CASE("collider") {
    const auto v = dag({"A", "B", "K"}, {{"A", "K"}, {"B", "K"}});
    const auto yes = determine_collider(v, "A", "B");
    CHECK(yes.verdict == Verdict::yes);
    CHECK(yes.witnesses == std::vector<std::string>{"K"});
    CHECK(yes.narrative == "yes, There exists at least one collider K of A and B");

    const auto chain = dag({"A", "B", "K"}, {{"A", "K"}, {"K", "B"}});
    CHECK(determine_collider(chain, "A", "B").narrative == "no, There don't exists collider of A and B");

    // A-K undirected with B->A and B->K: K is a common child in one of the two extensions.
    CausalGraph mixed({"A", "B", "K"});
    mixed.add_undirected("A", "K");
    mixed.add_directed("B", "A");
    mixed.add_directed("B", "K");
    REQUIRE(enumerate_dag_extensions(mixed).dags.size() == 2);
    CHECK(determine_collider(mixed, "A", "B").verdict == Verdict::uncertain);
    CHECK(determine_collider(mixed, "A", "B").witnesses.empty());
    CHECK(determine_collider(mixed, "B", "K").verdict == Verdict::uncertain);
}

TEST_CASE("confounder") {
    const auto fork = dag({"X", "Y", "Z"}, {{"Z", "X"}, {"Z", "Y"}});
    const auto v = determine_confounder(fork, "X", "Y");
    CHECK(v.verdict == Verdict::yes);
    CHECK(v.narrative ==
          "yes, There is an unblocked backdoor path between X and Y so confounder exists. Backdoor path: X, Z, Y");
    CHECK(determine_confounder(fork, "Y", "X").verdict == Verdict::yes);

    const auto mediated = dag({"X", "Y", "Z"}, {{"X", "Z"}, {"Z", "Y"}});
    CHECK(determine_confounder(mediated, "X", "Y").verdict == Verdict::no);

    // Y -> A -> X is a backdoor path into X but Y itself is the cause, not a confounder.
    const auto upstream = dag({"X", "Y", "A"}, {{"Y", "A"}, {"A", "X"}});
    CHECK(determine_confounder(upstream, "X", "Y").verdict == Verdict::no);
    CHECK(determine_confounder(upstream, "Y", "X").verdict == Verdict::no);

    CausalGraph chain({"X", "Z", "Y"});
    chain.add_undirected("X", "Z");
    chain.add_undirected("Z", "Y");
    CHECK(determine_confounder(chain, "X", "Y").verdict == Verdict::uncertain);
}

TEST_CASE("verdicts on DAGs match brute-force scans over every 4-node DAG") {
    std::size_t mismatches = 0, asymmetric = 0;
    for (const auto& g : oracle::all_dags(4)) {
        for (std::size_t x = 0; x < 4; ++x) {
            for (std::size_t y = 0; y < 4; ++y) {
                if (x == y) continue;
                const auto& xs = g.name(x);
                const auto& ys = g.name(y);
                const bool edge = g.has_directed(x, y);
                bool common_child = false;
                for (std::size_t k = 0; k < 4; ++k) common_child = common_child || (g.has_directed(x, k) && g.has_directed(y, k));
                const bool trek = oracle::has_common_cause_path(g, x, y);
                mismatches += (determine_direct_cause(g, xs, ys).verdict == Verdict::yes) != edge;
                mismatches += (determine_collider(g, xs, ys).verdict == Verdict::yes) != common_child;
                mismatches += (determine_confounder(g, xs, ys).verdict == Verdict::yes) != trek;
                mismatches += trek != oracle::has_common_ancestor_avoiding(g, x, y);
                asymmetric += determine_confounder(g, xs, ys).verdict != determine_confounder(g, ys, xs).verdict;
            }
        }
    }
    CHECK(mismatches == 0);
    CHECK(asymmetric == 0);
}

TEST_CASE("truncated enumeration answers uncertain") {
    CausalGraph clique({"A", "B", "C", "D"});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) clique.add_undirected(i, j);
    CHECK(determine_collider(clique, "A", "B", 3).verdict == Verdict::uncertain);
    CHECK(determine_confounder(clique, "A", "B", 3).verdict == Verdict::uncertain);
}

TEST_CASE("query errors") {
    const auto g = dag({"X", "Y"}, {{"X", "Y"}});
    CHECK_THROWS_AS(determine_collider(g, "X", "X"), GraphError);
    CHECK_THROWS_AS(determine_confounder(g, "X", "Q"), GraphError);
}
