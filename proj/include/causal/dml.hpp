#pragma once

#include "causal/tabular.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace causal {

struct DmlConfig {
    std::string outcome;
    std::string treatment;
    std::vector<std::string> covariates;
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t folds = 2;
    double ridge = 1e-6;
    std::uint64_t seed = 0;
};

/// Final-stage fit of the linear-heterogeneity model theta(x) = theta0 + theta_x . x.
struct AteEstimate {
    double ate = 0.0;
    double theta0 = 0.0;
    std::vector<double> theta_x;
    std::size_t n_used = 0;
    /// Mean of theta(x_i) over rows; ate = (t1 - t0) * mean_effect.
    double mean_effect = 0.0;

    /// Effect of moving the treatment from `from` to `to` under the same fit.
    double contrast(double from, double to) const;
};

/// Cross-fitted double machine learning with ridge least-squares nuisances
/// for E[Y|X] and E[T|X] and a least-squares final stage of the outcome
/// residual on [T_res, T_res * X].
AteEstimate estimate_ate(const DataTable& table, const DmlConfig& cfg);

/// Seeded fold labels 0..folds-1 with sizes differing by at most one.
std::vector<std::size_t> assign_folds(std::size_t rows, std::size_t folds, std::uint64_t seed);

/// "ATE of T from t0 to t1 on Y is <value>" with four significant digits.
std::string describe_ate(const DmlConfig& cfg, const AteEstimate& est);
std::string format_significant(double value, int digits = 4);

}  // namespace causal
