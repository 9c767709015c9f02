#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fgsim/error.hpp"
#include "fgsim/series.hpp"

namespace fgsim::stats {

/// Deterministic treatment in the Johansen procedure. For `None`,
/// `Constant` and `LinearTrend` the data are detrended with a polynomial of
/// that order before the reduced-rank regression, and the lagged-difference
/// block is demeaned unless `None`. `RestrictedConstant` confines the
/// constant to the cointegrating relation, the case for series without
/// drift; the other cases assume drifting data and over-reject the last
/// hypothesis on driftless ones.
enum class JohansenTrend { None = -1, Constant = 0, LinearTrend = 1, RestrictedConstant = 2 };

inline std::string_view to_string(JohansenTrend t) noexcept {
    switch (t) {
        case JohansenTrend::None: return "none";
        case JohansenTrend::Constant: return "constant";
        case JohansenTrend::LinearTrend: return "linear-trend";
        case JohansenTrend::RestrictedConstant: return "restricted-constant";
    }
    return "?";
}

struct JohansenResult {
    std::vector<double> eigenvalues;      ///< descending
    std::vector<double> trace_stats;      ///< H0: rank <= r, r = 0..k-1
    std::vector<double> max_eigen_stats;  ///< H0: rank = r vs r+1
    std::vector<double> crit_5pct_trace;
    std::vector<double> crit_5pct_maxeig;
    std::size_t inferred_rank = 0;
    std::size_t n_obs = 0;
    JohansenTrend trend = JohansenTrend::LinearTrend;
    std::size_t lag_order = 2;
};

namespace detail {

/// 5% critical values (MacKinnon-Haug-Michelis), indexed by number of
/// variables in the hypothesis (k - r), 1..3.
inline double johansen_crit_trace(std::size_t m, JohansenTrend t) {
    static constexpr std::array<std::array<double, 3>, 4> table{{
        {4.1296, 12.3212, 24.2761},   // none
        {3.8415, 15.4943, 29.7961},   // constant
        {3.8415, 18.3985, 35.0116},   // linear trend
        {9.1645, 20.2618, 35.1929},   // restricted constant
    }};
    return table[static_cast<std::size_t>(static_cast<int>(t) + 1)][m - 1];
}

inline double johansen_crit_maxeig(std::size_t m, JohansenTrend t) {
    static constexpr std::array<std::array<double, 3>, 4> table{{
        {4.1296, 11.2246, 17.7961},
        {3.8415, 14.2639, 21.1314},
        {3.8415, 17.1481, 24.2522},
        {9.1645, 15.8921, 22.2996},
    }};
    return table[static_cast<std::size_t>(static_cast<int>(t) + 1)][m - 1];
}

inline Eigen::MatrixXd detrend(const Eigen::MatrixXd& y, int order) {
    if (order < 0 || y.rows() == 0) return y;
    const auto n = y.rows();
    Eigen::MatrixXd T(n, order + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int p = 0; p <= order; ++p) T(i, p) = std::pow(static_cast<double>(i), p);
    }
    return y - T * T.colPivHouseholderQr().solve(y);
}

inline Eigen::MatrixXd residualize(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z) {
    if (z.cols() == 0) return y;
    return y - z * z.colPivHouseholderQr().solve(y);
}

}  // namespace detail

/// Johansen trace and maximum-eigenvalue tests. `lag_order` is the VAR
/// order in levels, so the error-correction form carries lag_order - 1
/// lagged differences.
inline JohansenResult johansen_test(const Eigen::MatrixXd& levels, std::size_t lag_order = 2,
                                    JohansenTrend trend = JohansenTrend::LinearTrend) {
    const auto n = levels.rows();
    const auto k = levels.cols();
    if (k < 2) throw ValidationError("johansen_test: need at least two series");
    if (k > 3) throw ValidationError("johansen_test: critical values are tabulated for at most three series");
    if (lag_order < 1) throw ValidationError("johansen_test: lag order must be at least 1");
    if (n < 10 * k) throw ValidationError("johansen_test: too few observations");
    const auto p = static_cast<Eigen::Index>(lag_order - 1);
    if (n - 1 - p <= k * (p + 1) + 1) throw ValidationError("johansen_test: too few observations for the lag order");

    const bool restricted = trend == JohansenTrend::RestrictedConstant;
    const int order = restricted ? -1 : static_cast<int>(trend);
    const int inner = order > -1 ? 0 : -1;
    const Eigen::MatrixXd x = detail::detrend(levels, order);
    const Eigen::MatrixXd dx_all = x.bottomRows(n - 1) - x.topRows(n - 1);
    const auto m = dx_all.rows() - p;

    Eigen::MatrixXd z(m, k * p);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index j = 1; j <= p; ++j) z.block(r, (j - 1) * k, 1, k) = dx_all.row(r + p - j);
    }
    z = detail::detrend(z, inner);
    const Eigen::MatrixXd dx = detail::detrend(dx_all.bottomRows(m), inner);
    Eigen::MatrixXd lx = detail::detrend(x.middleRows(1, m), inner);
    if (restricted) {
        lx.conservativeResize(Eigen::NoChange, k + 1);
        lx.col(k).setOnes();
    }

    const Eigen::MatrixXd r0 = detail::residualize(dx, z);
    const Eigen::MatrixXd rk = detail::residualize(lx, z);
    const double T = static_cast<double>(m);
    const Eigen::MatrixXd s00 = r0.transpose() * r0 / T;
    const Eigen::MatrixXd skk = rk.transpose() * rk / T;
    const Eigen::MatrixXd sk0 = rk.transpose() * r0 / T;

    Eigen::LDLT<Eigen::MatrixXd> s00_ldlt(s00);
    if (s00_ldlt.info() != Eigen::Success || !s00_ldlt.isPositive() ||
        std::abs(s00.determinant()) < 1e-300) {
        throw NumericalError("johansen_test: singular covariance of differences");
    }
    const Eigen::MatrixXd A = sk0 * s00_ldlt.solve(sk0.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), skk);
    if (es.info() != Eigen::Success) throw NumericalError("johansen_test: singular covariance of levels");

    // the restricted case has one extra, near-zero root from the constant column
    std::vector<double> lambda(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    lambda.resize(static_cast<std::size_t>(k));
    for (auto& l : lambda) l = std::clamp(l, 0.0, 1.0 - 1e-15);

    JohansenResult res;
    res.eigenvalues = lambda;
    res.n_obs = static_cast<std::size_t>(m);
    res.trend = trend;
    res.lag_order = lag_order;
    for (Eigen::Index r = 0; r < k; ++r) {
        double tr = 0.0;
        for (Eigen::Index j = r; j < k; ++j) tr -= T * std::log(1.0 - lambda[static_cast<std::size_t>(j)]);
        res.trace_stats.push_back(tr);
        res.max_eigen_stats.push_back(-T * std::log(1.0 - lambda[static_cast<std::size_t>(r)]));
        const auto dims = static_cast<std::size_t>(k - r);
        res.crit_5pct_trace.push_back(detail::johansen_crit_trace(dims, trend));
        res.crit_5pct_maxeig.push_back(detail::johansen_crit_maxeig(dims, trend));
    }
    res.inferred_rank = static_cast<std::size_t>(k);
    for (std::size_t r = 0; r < res.trace_stats.size(); ++r) {
        if (res.trace_stats[r] < res.crit_5pct_trace[r]) {
            res.inferred_rank = r;
            break;
        }
    }
    return res;
}

/// Johansen test on the complete rows of a panel.
inline JohansenResult johansen_test(const Panel& panel, std::size_t lag_order = 2,
                                    JohansenTrend trend = JohansenTrend::LinearTrend) {
    const auto rows = panel.complete_rows();
    if (rows.size() != panel.rows() && !rows.empty()) {
        // Interior gaps would splice non-adjacent quarters together.
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i] != rows[i - 1] + 1) throw ValidationError("johansen_test: panel has interior gaps");
        }
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(panel.cols()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < panel.cols(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = panel.column(j).value(rows[i]);
        }
    }
    return johansen_test(m, lag_order, trend);
}

}  // namespace fgsim::stats
