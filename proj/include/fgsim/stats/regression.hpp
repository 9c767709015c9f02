#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "fgsim/error.hpp"
#include "fgsim/series.hpp"

namespace fgsim::stats {

/// Two-sided Student-t p-value.
inline double t_pvalue(double t, double df) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

inline double f_pvalue(double f, double df1, double df2) {
    if (!(f > 0.0)) return 1.0;
    boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

/// Response and design matrix after listwise deletion, ready for OLS.
struct RegressionData {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<std::string> names;
    std::vector<Period> periods;
    bool intercept = false;
};

/// Aligns y with the regressors, drops incomplete rows and prepends a
/// constant column when requested.
inline RegressionData make_design(const TimeSeries& y, const Panel& X, bool intercept) {
    std::vector<TimeSeries> all{y};
    all.insert(all.end(), X.columns().begin(), X.columns().end());
    const Panel joined = align(all);
    const auto rows = joined.complete_rows();

    RegressionData d;
    d.intercept = intercept;
    const auto k = static_cast<Eigen::Index>(X.cols() + (intercept ? 1 : 0));
    d.y.resize(static_cast<Eigen::Index>(rows.size()));
    d.X.resize(static_cast<Eigen::Index>(rows.size()), k);
    if (intercept) d.names.emplace_back("const");
    for (const auto& c : X.columns()) d.names.push_back(c.name());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = rows[i];
        const auto ei = static_cast<Eigen::Index>(i);
        d.y(ei) = joined.column(0).value(r);
        Eigen::Index c = 0;
        if (intercept) d.X(ei, c++) = 1.0;
        for (std::size_t j = 1; j < joined.cols(); ++j) d.X(ei, c++) = joined.column(j).value(r);
        d.periods.push_back(joined.period(r));
    }
    return d;
}

inline RegressionData make_design(const TimeSeries& y, const TimeSeries& x, bool intercept) {
    return make_design(y, Panel({x}), intercept);
}

struct RegressionResult {
    std::vector<std::string> names;
    std::vector<double> coefficients;  ///< intercept first when present
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double ssr = 0.0;
    double sigma2 = 0.0;
    std::vector<double> residuals;
    std::size_t n_obs = 0;
    std::size_t df_resid = 0;
    bool intercept = false;

    double coef(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return coefficients[i];
        }
        throw ValidationError("no coefficient '" + std::string(name) + "'");
    }
    /// F statistic for all non-constant slopes being zero.
    double f_statistic() const {
        const double df_model = static_cast<double>(coefficients.size() - (intercept ? 1 : 0));
        if (df_model <= 0.0 || r2 >= 1.0) return std::numeric_limits<double>::infinity();
        return (r2 / df_model) / ((1.0 - r2) / static_cast<double>(df_resid));
    }
    double f_pvalue() const {
        const double df_model = static_cast<double>(coefficients.size() - (intercept ? 1 : 0));
        return stats::f_pvalue(f_statistic(), df_model, static_cast<double>(df_resid));
    }
};

/// Ordinary least squares with conventional standard errors. Without an
/// intercept, R² is the uncentered version.
inline RegressionResult ols(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& X,
                            bool intercept_in_X, std::vector<std::string> names = {}) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (y.size() != n) throw ValidationError("ols: response and design differ in length");
    if (n <= k) {
        throw ValidationError("ols: " + std::to_string(n) + " observations for " + std::to_string(k) + " regressors");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw RankDeficientError("ols: design matrix is rank deficient");

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * Rinv * Rinv.transpose() * perm.transpose();

    RegressionResult r;
    r.intercept = intercept_in_X;
    r.n_obs = static_cast<std::size_t>(n);
    r.df_resid = static_cast<std::size_t>(n - k);
    r.ssr = resid.squaredNorm();
    r.sigma2 = r.ssr / static_cast<double>(n - k);
    const double tss = intercept_in_X ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
    r.r2 = tss > 0.0 ? 1.0 - r.ssr / tss : 1.0;
    const double dof_tss = intercept_in_X ? static_cast<double>(n - 1) : static_cast<double>(n);
    r.adj_r2 = 1.0 - (1.0 - r.r2) * dof_tss / static_cast<double>(n - k);
    r.residuals.assign(resid.data(), resid.data() + n);

    if (names.empty()) {
        for (Eigen::Index j = 0; j < k; ++j) names.push_back("x" + std::to_string(j));
    }
    r.names = std::move(names);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double b = beta(j);
        const double se = std::sqrt(std::max(0.0, r.sigma2 * xtx_inv(j, j)));
        double t;
        if (se > 0.0) {
            t = b / se;
        } else {
            t = b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::copysign(std::numeric_limits<double>::infinity(), b);
        }
        r.coefficients.push_back(b);
        r.std_errors.push_back(se);
        r.t_stats.push_back(t);
        r.p_values.push_back(t_pvalue(t, static_cast<double>(r.df_resid)));
    }
    return r;
}

inline RegressionResult ols(const RegressionData& d) { return ols(d.y, d.X, d.intercept, d.names); }

/// Regresses y on the panel columns, dropping incomplete rows.
inline RegressionResult ols(const TimeSeries& y, const Panel& X, bool intercept = true) {
    return ols(make_design(y, X, intercept));
}

inline RegressionResult ols(const TimeSeries& y, const TimeSeries& x, bool intercept = true) {
    return ols(make_design(y, x, intercept));
}

}  // namespace fgsim::stats
