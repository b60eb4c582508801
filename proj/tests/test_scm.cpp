#include "causal/ci_test.hpp"
#include "causal/error.hpp"
#include "causal/scm.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace causal;

TEST_CASE("random DAG shape") {
    const auto empty = random_dag(5, 0, 1);
    CHECK(empty.size() == 5);
    CHECK(empty.edge_count() == 0);
    CHECK(empty.nodes() == default_names(5));

    const auto full = random_dag(6, 15, 2);
    CHECK(full.edge_count() == 15);
    CHECK(full.is_fully_directed());

    CHECK(random_dag(7, 9, 3) == random_dag(7, 9, 3));
    CHECK(random_dag(7, 9, 3).edge_count() == 9);
    CHECK_THROWS_AS(random_dag(4, 7, 1), GraphError);
}

TEST_CASE("mechanism coefficients and arity") {
    const auto dag = random_dag(6, 8, 5);
    for (auto family : {MechanismFamily::nonlinear, MechanismFamily::linear}) {
        const auto scm = make_scm(dag, family, 9);
        REQUIRE(scm.mechanisms.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(scm.mechanisms[i].arity() == dag.parents(i).size());
            for (double w : scm.mechanisms[i].weight) CHECK((std::abs(w) >= 0.5 && std::abs(w) <= 1.5));
            CHECK(scm.noise_sigma[i] == kDefaultNoiseSigma);
        }
    }
    CHECK(parse_family("linear") == MechanismFamily::linear);
    CHECK_THROWS_AS(parse_family("quadratic"), DataError);
}

TEST_CASE("sampling is seeded and follows the graph") {
    const auto scm = make_scm(random_dag(4, 3, 1), MechanismFamily::nonlinear, 2);
    CHECK(sample_table(scm, 200, 3) == sample_table(scm, 200, 3));
    CHECK_FALSE(sample_table(scm, 200, 3) == sample_table(scm, 200, 4));

    CausalGraph chain({"A", "B", "C"});
    chain.add_directed("A", "B");
    chain.add_directed("B", "C");
    const auto t = sample_table(make_scm(chain, MechanismFamily::linear, 4), 5000, 5);
    CHECK_FALSE(marginal_independence(t, "A", "C").independent);
    const std::vector<std::string> b{"B"};
    CHECK(std::abs(fisher_z_test(t, "A", "C", b).partial_correlation) < 0.05);
}

TEST_CASE("independent columns pass pairwise tests in most seeds") {
    std::size_t clean = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto t = sample_table(make_scm(random_dag(3, 0, seed), MechanismFamily::nonlinear, seed), 5000, seed);
        bool all = true;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j) all = all && marginal_independence(t, t.columns()[i], t.columns()[j]).independent;
        clean += all;
    }
    // Three tests at 5% each: the expected clean share is 0.95^3 = 0.857.
    CHECK(clean >= 30);
}

TEST_CASE("interventional oracle") {
    CausalGraph g({"T", "Y", "W"});
    g.add_directed("T", "Y");
    auto scm = make_scm(g, MechanismFamily::linear, 1);
    scm.mechanisms[1].weight = {2.0};
    const auto e = oracle_interventional_ate(scm, "T", "Y", 0.5, 2.0, 100000, 7);
    CHECK(std::abs(e.ate - 3.0) <= 3.0 * e.standard_error + 1e-12);

    const auto none = oracle_interventional_ate(scm, "W", "Y", 0.0, 1.0, 100000, 7);
    CHECK(std::abs(none.ate) <= 3.0 * none.standard_error + 1e-12);
    CHECK(oracle_interventional_ate(scm, "T", "Y", 1.0, 1.0, 100000, 7).ate == 0.0);
    CHECK_THROWS_AS(oracle_interventional_ate(scm, "T", "Y", 0.0, 1.0, 1000, 7), DataError);
}

TEST_CASE("oracles agree across the equivalence class") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto scm = make_scm(random_dag(5, seed % 10, seed), MechanismFamily::nonlinear, seed);
        const auto ext = enumerate_dag_extensions(oracle_cpdag(scm));
        for (const auto& d : ext.dags) {
            for (std::size_t x = 0; x < 5; ++x)
                for (std::size_t y = x + 1; y < 5; ++y) {
                    const std::vector<std::string> z{d.name((y + 1) % 5 == x ? (y + 2) % 5 : (y + 1) % 5)};
                    if (z[0] == d.name(x) || z[0] == d.name(y)) continue;
                    CHECK(oracle_dsep_label(scm, d.name(x), d.name(y), z) == d_separated(d, d.name(x), d.name(y), z));
                }
        }
    }
}

TEST_CASE("pool manifest regenerates every table") {
    PoolSpec spec;
    spec.node_counts = {3, 5};
    spec.tables_per_count = 2;
    spec.linear_tables_per_count = 1;
    spec.rows = 100;
    spec.seed = 4;
    const auto pool = generate_pool(spec);
    REQUIRE(pool.size() == 6);
    CHECK(pool[0].id == "n03_nl_00");
    CHECK(pool[0].edge_count() == 0);
    CHECK(pool[1].edge_count() == 3);

    const auto dir = std::filesystem::temp_directory_path() / "causal_pool_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_pool(pool, dir);
    const auto back = read_pool(dir);
    REQUIRE(back.size() == pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        CHECK(back[i].id == pool[i].id);
        CHECK(back[i].table == pool[i].table);
        CHECK(back[i].scm.dag == pool[i].scm.dag);
        CHECK(load_csv(dir / back[i].csv).columns() == pool[i].table.columns());
    }
    std::filesystem::remove_all(dir);
}
