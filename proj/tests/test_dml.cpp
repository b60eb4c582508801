#include "causal/dml.hpp"
#include "causal/error.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace causal;

namespace {

DmlConfig config(double t0 = 0.0, double t1 = 1.0) {
    DmlConfig c;
    c.outcome = "Y";
    c.treatment = "T";
    c.covariates = {"X"};
    c.t0 = t0;
    c.t1 = t1;
    return c;
}

}  // namespace

TEST_CASE("constant effect is recovered") {
    const auto t = sample_table(fixture::constant_effect_scm(1), 5000, 2);
    const auto est = estimate_ate(t, config(0.0, 1.0));
    CHECK(est.ate == doctest::Approx(2.0).epsilon(0.05));
    CHECK(est.n_used == 5000);
    CHECK(estimate_ate(t, config(1.0, 3.0)).ate == doctest::Approx(4.0).epsilon(0.05));
    CHECK(est.contrast(0.0, 2.0) == doctest::Approx(2.0 * est.ate).epsilon(1e-12));
}

TEST_CASE("heterogeneous effect matches the interventional oracle") {
    const auto scm = fixture::heterogeneous_effect_scm(3);
    const auto truth = oracle_interventional_ate(scm, "T", "Y", -0.5, 1.5, 200000, 4);
    CHECK(truth.ate == doctest::Approx(2.0).epsilon(0.02));
    const auto est = estimate_ate(sample_table(scm, 5000, 5), config(-0.5, 1.5));
    CHECK(est.ate == doctest::Approx(truth.ate).epsilon(0.075));
    REQUIRE(est.theta_x.size() == 1);
    CHECK(est.theta_x[0] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("equal treatment levels give exactly zero") {
    const auto t = sample_table(fixture::constant_effect_scm(1), 500, 2);
    const auto est = estimate_ate(t, config(0.7, 0.7));
    CHECK(est.ate == 0.0);
    CHECK(describe_ate(config(0.7, 0.7), est) == "ATE of T from 0.7 to 0.7 on Y is 0.000");
}

TEST_CASE("estimates are deterministic in the seed") {
    const auto t = sample_table(fixture::constant_effect_scm(6), 1000, 7);
    auto c = config();
    const double a = estimate_ate(t, c).ate;
    CHECK(estimate_ate(t, c).ate == a);
    c.seed = 99;
    CHECK(estimate_ate(t, c).ate != a);
}

TEST_CASE("fold assignment is balanced and seeded") {
    const auto folds = assign_folds(103, 4, 11);
    CHECK(folds == assign_folds(103, 4, 11));
    std::vector<std::size_t> sizes(4, 0);
    for (auto f : folds) ++sizes.at(f);
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    CHECK(folds != assign_folds(103, 4, 12));
}

TEST_CASE("preconditions") {
    const auto t = sample_table(fixture::constant_effect_scm(1), 25, 2);
    CHECK_THROWS_AS(estimate_ate(t, config()), StatsError);
    const auto big = sample_table(fixture::constant_effect_scm(1), 200, 2);
    auto c = config();
    c.folds = 1;
    CHECK_THROWS_AS(estimate_ate(big, c), StatsError);
    c = config();
    c.outcome = "T";
    CHECK_THROWS_AS(estimate_ate(big, c), StatsError);
    c = config();
    c.covariates = {"Q"};
    CHECK_THROWS_AS(estimate_ate(big, c), DataError);
}

TEST_CASE("four significant digits") {
    CHECK(format_significant(0.0) == "0.000");
    CHECK(format_significant(-0.0) == "0.000");
    CHECK(format_significant(1.23456) == "1.235");
    CHECK(format_significant(-12.3456) == "-12.35");
    CHECK(format_significant(0.012345) == "0.01235");
    CHECK(format_significant(2.5e7) == "2.500e+07");
    CHECK(format_significant(3e-6) == "3.000e-06");
}
