#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "fgsim/stats/regression.hpp"

namespace fgsim::stats {

struct HarveyCollierResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_recursive = 0;
};

/// Recursive residuals w_t = (y_t - x_t'b_{t-1}) / sqrt(1 + x_t'(X_{t-1}'X_{t-1})^{-1} x_t)
/// for t = k..n-1, observations taken in the given (time) order.
inline std::vector<double> recursive_residuals(const Eigen::Ref<const Eigen::VectorXd>& y,
                                               const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (y.size() != n) throw ValidationError("recursive_residuals: response and design differ in length");
    if (n < k + 2) throw ValidationError("recursive_residuals: need at least regressors + 2 observations");
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(n - k));
    for (Eigen::Index t = k; t < n; ++t) {
        const auto Xt = X.topRows(t);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xt);
        qr.setThreshold(1e-10);
        if (qr.rank() < k) throw RankDeficientError("recursive_residuals: initial block is rank deficient");
        const Eigen::VectorXd b = qr.solve(y.head(t));
        const Eigen::MatrixXd xtx = Xt.transpose() * Xt;
        const Eigen::VectorXd xt = X.row(t).transpose();
        const double h = xt.dot(xtx.ldlt().solve(xt));
        w.push_back((y(t) - xt.dot(b)) / std::sqrt(1.0 + h));
    }
    return w;
}

/// Harvey-Collier linearity test: one-sample t test that the recursive
/// residuals have zero mean.
inline HarveyCollierResult harvey_collier(const Eigen::Ref<const Eigen::VectorXd>& y,
                                          const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const auto w = recursive_residuals(y, X);
    const double m = static_cast<double>(w.size());
    if (w.size() < 2) throw ValidationError("harvey_collier: too few recursive residuals");
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= m;
    double ss = 0.0;
    for (double v : w) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (m - 1.0));
    HarveyCollierResult r;
    r.n_recursive = w.size();
    r.statistic = sd > 0.0 ? mean / (sd / std::sqrt(m)) : 0.0;
    r.p_value = t_pvalue(r.statistic, m - 1.0);
    return r;
}

inline HarveyCollierResult harvey_collier(const RegressionData& d) { return harvey_collier(d.y, d.X); }

struct WhiteTestResult {
    double lm_statistic = 0.0;
    double lm_p_value = 1.0;
    double f_statistic = 0.0;
    double f_p_value = 1.0;
    std::size_t df = 0;
};

/// White's heteroskedasticity test. The design must contain a constant
/// column; squared residuals are regressed on every product x_i x_j, i <= j.
inline WhiteTestResult white_test(const std::vector<double>& residuals, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (static_cast<Eigen::Index>(residuals.size()) != n) {
        throw ValidationError("white_test: residuals and design differ in length");
    }
    bool has_constant = false;
    for (Eigen::Index j = 0; j < k && !has_constant; ++j) has_constant = (X.col(j).array() == 1.0).all();
    if (!has_constant) throw ValidationError("white_test: design has no constant column");
    const Eigen::Index kaux = k * (k + 1) / 2;
    if (n <= kaux) throw ValidationError("white_test: auxiliary regression has no residual degrees of freedom");
    Eigen::MatrixXd Z(n, kaux);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) Z.col(c++) = X.col(i).cwiseProduct(X.col(j));
    }
    Eigen::VectorXd e2(n);
    for (Eigen::Index i = 0; i < n; ++i) e2(i) = residuals[static_cast<std::size_t>(i)] * residuals[static_cast<std::size_t>(i)];

    RegressionResult aux;
    try {
        aux = ols(e2, Z, true);
    } catch (const RankDeficientError&) {
        throw RankDeficientError("white_test: auxiliary design is degenerate");
    }
    WhiteTestResult r;
    r.df = static_cast<std::size_t>(kaux - 1);
    const double df = static_cast<double>(r.df);
    r.lm_statistic = static_cast<double>(n) * aux.r2;
    r.lm_p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), std::max(0.0, r.lm_statistic)));
    r.f_statistic = (aux.r2 / df) / ((1.0 - aux.r2) / static_cast<double>(n - kaux));
    r.f_p_value = stats::f_pvalue(r.f_statistic, df, static_cast<double>(n - kaux));
    return r;
}

inline WhiteTestResult white_test(const RegressionResult& fit, const RegressionData& d) {
    if (!d.intercept) throw ValidationError("white_test: regression must include an intercept");
    return white_test(fit.residuals, d.X);
}

}  // namespace fgsim::stats
