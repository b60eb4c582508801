#include "causal/dml.hpp"

#include "causal/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

namespace causal {

namespace {

// Ridge least squares on [1, X]; the intercept is not penalised.
Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, double ridge) {
    Eigen::MatrixXd gram = design.transpose() * design;
    for (Eigen::Index i = 1; i < gram.rows(); ++i) gram(i, i) += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14)) {
        throw StatsError("nuisance design is rank-deficient (collinear covariates)");
    }
    return ldlt.solve(design.transpose() * target);
}

}  // namespace

double AteEstimate::contrast(double from, double to) const {
    if (from == to) return 0.0;
    return (to - from) * mean_effect;
}

std::vector<std::size_t> assign_folds(std::size_t rows, std::size_t folds, std::uint64_t seed) {
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit draw so the permutation does not depend on
    // the standard library's shuffle.
    for (std::size_t i = rows; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    std::vector<std::size_t> label(rows);
    for (std::size_t pos = 0; pos < rows; ++pos) label[order[pos]] = pos % folds;
    return label;
}

AteEstimate estimate_ate(const DataTable& table, const DmlConfig& cfg) {
    const std::size_t yi = table.index_of(cfg.outcome);
    const std::size_t ti = table.index_of(cfg.treatment);
    if (yi == ti) throw StatsError("outcome and treatment must differ");
    std::vector<std::size_t> xi;
    std::set<std::size_t> seen{yi, ti};
    for (const auto& name : cfg.covariates) {
        const std::size_t i = table.index_of(name);
        if (!seen.insert(i).second) throw StatsError("covariate '" + name + "' repeats the outcome, treatment or another covariate");
        xi.push_back(i);
    }
    if (!std::isfinite(cfg.t0) || !std::isfinite(cfg.t1)) throw StatsError("T0 and T1 must be finite");
    if (cfg.ridge < 0.0) throw StatsError("ridge must be nonnegative");
    const std::size_t n = table.rows();
    const std::size_t p = xi.size();
    if (n < 10 * (p + 2)) {
        throw StatsError("DML needs at least " + std::to_string(10 * (p + 2)) + " rows for " + std::to_string(p) +
                         " covariates, have " + std::to_string(n));
    }
    if (cfg.folds < 2 || cfg.folds > n) throw StatsError("fold count must be in [2, rows]");

    const auto ni = static_cast<Eigen::Index>(n);
    const auto pi = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd design(ni, pi + 1);
    Eigen::VectorXd y(ni), t(ni);
    for (Eigen::Index r = 0; r < ni; ++r) {
        design(r, 0) = 1.0;
        for (Eigen::Index c = 0; c < pi; ++c) design(r, c + 1) = table.at(r, xi[c]);
        y(r) = table.at(r, yi);
        t(r) = table.at(r, ti);
    }

    const auto fold = assign_folds(n, cfg.folds, cfg.seed);
    Eigen::VectorXd y_res(ni), t_res(ni);
    for (std::size_t k = 0; k < cfg.folds; ++k) {
        std::vector<Eigen::Index> train, hold;
        for (std::size_t r = 0; r < n; ++r) (fold[r] == k ? hold : train).push_back(static_cast<Eigen::Index>(r));
        const Eigen::MatrixXd d_train = design(train, Eigen::all);
        const Eigen::VectorXd by = ridge_fit(d_train, y(train), cfg.ridge);
        const Eigen::VectorXd bt = ridge_fit(d_train, t(train), cfg.ridge);
        const Eigen::MatrixXd d_hold = design(hold, Eigen::all);
        y_res(hold) = y(hold) - d_hold * by;
        t_res(hold) = t(hold) - d_hold * bt;
    }

    // Final stage: y_res ~ theta0 * t_res + sum_j theta_j * t_res * x_j.
    Eigen::MatrixXd final_design(ni, pi + 1);
    final_design.col(0) = t_res;
    for (Eigen::Index c = 0; c < pi; ++c) final_design.col(c + 1) = t_res.cwiseProduct(design.col(c + 1));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(final_design);
    qr.setThreshold(1e-10);
    if (qr.rank() < pi + 1) {
        throw StatsError("final-stage design is rank-deficient (treatment residuals carry no variation)");
    }
    const Eigen::VectorXd theta = qr.solve(y_res);

    AteEstimate est;
    est.theta0 = theta(0);
    est.theta_x.assign(theta.data() + 1, theta.data() + theta.size());
    est.n_used = n;
    est.mean_effect = (design * theta).mean();
    est.ate = est.contrast(cfg.t0, cfg.t1);
    return est;
}

std::string format_significant(double value, int digits) {
    if (value == 0.0) value = 0.0;  // drop the sign of negative zero
    char buf[64];
    const double mag = std::abs(value);
    if (mag != 0.0 && (mag >= 1e6 || mag < 1e-4)) {
        std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
        return buf;
    }
    int decimals = digits - 1;
    if (mag != 0.0) decimals = std::max(0, digits - 1 - static_cast<int>(std::floor(std::log10(mag))));
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string describe_ate(const DmlConfig& cfg, const AteEstimate& est) {
    auto shortest = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v == 0.0 ? 0.0 : v);
        return std::string(buf, res.ptr);
    };
    return "ATE of " + cfg.treatment + " from " + shortest(cfg.t0) + " to " + shortest(cfg.t1) +
           " on " + cfg.outcome + " is " + format_significant(est.ate);
}

}  // namespace causal
