#include "causal/ci_test.hpp"
#include "causal/error.hpp"
#include "causal/scm.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace causal;

namespace {

DataTable chain_table(std::size_t rows, std::uint64_t seed) {
    CausalGraph g({"A", "B", "C"});
    g.add_directed("A", "B");
    g.add_directed("B", "C");
    return sample_table(make_scm(g, MechanismFamily::linear, seed), rows, seed + 1);
}

}  // namespace

TEST_CASE("partial correlation equals the residual-regression oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto scm = make_scm(random_dag(5, 6, seed), MechanismFamily::linear, seed);
        const auto t = sample_table(scm, 400, seed);
        const auto corr = correlation_matrix(t);
        const std::vector<std::size_t> z{2, 4};
        CHECK(partial_correlation(corr, 0, 1, z) ==
              doctest::Approx(oracle::residual_partial_correlation(t, 0, 1, {2, 4})).epsilon(1e-9));
        CHECK(partial_correlation(corr, 3, 1, {}) == doctest::Approx(corr(3, 1)).epsilon(1e-12));
    }
}

TEST_CASE("Fisher-Z statistic and p-value") {
    // s = sqrt(n - |z| - 3) * atanh(r) = 1.959963985 gives the two-sided 5% point.
    const double r = std::tanh(1.959963984540054 / std::sqrt(97.0));
    const auto fz = fisher_z_statistic(r, 100, 0);
    CHECK(fz.statistic == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(fz.p_value == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(fisher_z_statistic(0.0, 50, 2).p_value == 1.0);
    CHECK(fisher_z_statistic(1.0, 50, 2).p_value == 0.0);
    CHECK(fisher_z_statistic(-1.0 + 1e-13, 50, 2).p_value == 0.0);
    CHECK_THROWS_AS(fisher_z_statistic(0.1, 5, 2), StatsError);
    CHECK(normal_upper_tail(0.0) == doctest::Approx(0.5));
}

TEST_CASE("chain A->B->C: dependent marginally, independent given B") {
    const auto t = chain_table(5000, 3);
    const auto marginal = marginal_independence(t, "A", "C");
    CHECK_FALSE(marginal.independent);
    const std::vector<std::string> b{"B"};
    const auto given = fisher_z_test(t, "A", "C", b);
    CHECK(given.independent);
    CHECK(std::abs(given.partial_correlation) < 0.05);
}

TEST_CASE("observation text") {
    CiResult r;
    r.x = "yellow fingers";
    r.y = "lung cancer";
    r.conditioning = {"smoking"};
    CHECK(describe(r) == "yellow fingers and lung cancer is independent under conditions: smoking");
    r.independent = false;
    r.conditioning.clear();
    CHECK(describe(r) == "yellow fingers and lung cancer is not independent");
}

TEST_CASE("argument errors") {
    const auto t = chain_table(100, 1);
    CHECK_THROWS_AS(marginal_independence(t, "A", "A"), StatsError);
    CHECK_THROWS_AS(marginal_independence(t, "A", "Q"), DataError);
    const std::vector<std::string> self{"A"};
    CHECK_THROWS_AS(fisher_z_test(correlation_matrix(t), t.rows(), "A", "C", self), StatsError);
}

TEST_CASE("duplicated column is handled by the ridge retry") {
    const auto base = chain_table(200, 5);
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < 3; ++j) cols.emplace_back(base.column(j).begin(), base.column(j).end());
    cols.push_back(cols[1]);
    const DataTable t("dup", {"A", "B", "C", "B2"}, cols);
    const std::vector<std::string> z{"B", "B2"};
    const auto r = fisher_z_test(t, "A", "C", z);
    CHECK(std::isfinite(r.p_value));
}
