#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "fgsim/stats/regression.hpp"

namespace fgsim::stats {

/// Deterministic terms in the Dickey-Fuller regression.
enum class AdfSpec { None, Constant, ConstantTrend };

inline std::string_view to_string(AdfSpec s) noexcept {
    switch (s) {
        case AdfSpec::None: return "none";
        case AdfSpec::Constant: return "constant";
        case AdfSpec::ConstantTrend: return "constant+trend";
    }
    return "?";
}

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t lags = 0;
    std::size_t n_obs = 0;
    AdfSpec spec = AdfSpec::Constant;
    bool reject_at_5pct = false;
};

struct AdfOptions {
    AdfSpec spec = AdfSpec::Constant;
    /// Upper bound for the AIC search; defaults to floor(12 (n/100)^(1/4)).
    std::optional<std::size_t> max_lags;
    /// Skip the search and use exactly this many lagged differences.
    std::optional<std::size_t> fixed_lags;
};

/// MacKinnon (1994) approximate asymptotic p-value for a single-series
/// Dickey-Fuller t statistic.
inline double mackinnon_pvalue(double tau, AdfSpec spec) {
    struct Surface {
        double max_stat, min_stat, star_stat;
        std::array<double, 3> small;
        std::array<double, 4> large;
    };
    static constexpr Surface kNone{std::numeric_limits<double>::infinity(), -19.04, -1.04,
                                   {0.6344, 1.2378, 0.032496},
                                   {0.4797, 0.93557, -0.06999, 0.033066}};
    static constexpr Surface kConstant{2.74, -18.83, -1.61,
                                       {2.1659, 1.4412, 0.038269},
                                       {1.7339, 0.93202, -0.12745, -0.010368}};
    static constexpr Surface kTrend{0.7, -16.18, -2.89,
                                    {3.2512, 1.6047, 0.049588},
                                    {2.5261, 0.61654, -0.37956, -0.060285}};
    const Surface& s = spec == AdfSpec::None ? kNone : spec == AdfSpec::Constant ? kConstant : kTrend;
    if (tau > s.max_stat) return 1.0;
    if (tau < s.min_stat) return 0.0;
    double z = 0.0;
    if (tau <= s.star_stat) {
        z = s.small[0] + tau * (s.small[1] + tau * s.small[2]);
    } else {
        z = s.large[0] + tau * (s.large[1] + tau * (s.large[2] + tau * s.large[3]));
    }
    return boost::math::cdf(boost::math::normal(), z);
}

namespace detail {

inline std::size_t trend_terms(AdfSpec s) { return s == AdfSpec::None ? 0 : s == AdfSpec::Constant ? 1 : 2; }

/// Design for Δx_t on [deterministic, x_{t-1}, Δx_{t-1..t-lags}], using
/// the last `nobs` available differences.
inline void adf_design(std::span<const double> x, std::size_t lags, std::size_t nobs, AdfSpec spec,
                       Eigen::VectorXd& y, Eigen::MatrixXd& X) {
    const std::size_t n = x.size();
    const std::size_t nt = trend_terms(spec);
    const std::size_t first = (n - 1) - nobs;  // index into the difference series
    y.resize(static_cast<Eigen::Index>(nobs));
    X.resize(static_cast<Eigen::Index>(nobs), static_cast<Eigen::Index>(nt + 1 + lags));
    for (std::size_t r = 0; r < nobs; ++r) {
        const std::size_t t = first + r;  // Δx_t = x[t+1] - x[t]
        const auto er = static_cast<Eigen::Index>(r);
        y(er) = x[t + 1] - x[t];
        Eigen::Index c = 0;
        if (nt >= 1) X(er, c++) = 1.0;
        if (nt >= 2) X(er, c++) = static_cast<double>(r + 1);
        X(er, c++) = x[t];
        for (std::size_t j = 1; j <= lags; ++j) X(er, c++) = x[t + 1 - j] - x[t - j];
    }
}

inline double gaussian_aic(const RegressionResult& r) {
    const double n = static_cast<double>(r.n_obs);
    const double llf = -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(r.ssr / n) + 1.0);
    return -2.0 * llf + 2.0 * static_cast<double>(r.coefficients.size());
}

}  // namespace detail

/// Augmented Dickey-Fuller test. The lag order minimizes AIC over
/// 0..max_lags on a common sample, then the chosen regression is refit on
/// every available observation.
inline AdfResult adf_test(std::span<const double> x, const AdfOptions& opt = {}) {
    const std::size_t n = x.size();
    const std::size_t nt = detail::trend_terms(opt.spec);
    if (n < 20) throw ValidationError("adf_test: need at least 20 observations");
    const bool constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    if (constant) throw ValidationError("adf_test: series is constant");

    std::size_t lags = 0;
    if (opt.fixed_lags) {
        lags = *opt.fixed_lags;
    } else {
        std::size_t maxlag = opt.max_lags.value_or(
            static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25))));
        const long cap = static_cast<long>(n / 2) - static_cast<long>(nt) - 1;
        if (cap < 0) throw ValidationError("adf_test: series too short");
        maxlag = std::min<std::size_t>(maxlag, static_cast<std::size_t>(cap));
        const std::size_t nobs = n - 1 - maxlag;
        Eigen::VectorXd y;
        Eigen::MatrixXd X;
        detail::adf_design(x, maxlag, nobs, opt.spec, y, X);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l <= maxlag; ++l) {
            const auto cols = static_cast<Eigen::Index>(nt + 1 + l);
            const double aic = detail::gaussian_aic(ols(y, X.leftCols(cols), nt > 0));
            if (aic < best) {
                best = aic;
                lags = l;
            }
        }
    }
    if (n < lags + 2 + nt + 1 || n - 1 - lags < 20 - 1) {
        throw ValidationError("adf_test: series too short after lag trimming");
    }
    const std::size_t nobs = n - 1 - lags;
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    detail::adf_design(x, lags, nobs, opt.spec, y, X);
    const auto fit = ols(y, X, nt > 0);

    AdfResult r;
    r.statistic = fit.t_stats[nt];
    r.p_value = mackinnon_pvalue(r.statistic, opt.spec);
    r.lags = lags;
    r.n_obs = nobs;
    r.spec = opt.spec;
    r.reject_at_5pct = r.p_value < 0.05;
    return r;
}

/// ADF on a dated series. Leading and trailing gaps are trimmed; gaps in
/// the interior are rejected.
inline AdfResult adf_test(const TimeSeries& s, const AdfOptions& opt = {}) {
    std::size_t lo = 0;
    std::size_t hi = s.size();
    while (lo < hi && s.is_missing(lo)) ++lo;
    while (hi > lo && s.is_missing(hi - 1)) --hi;
    std::vector<double> v;
    for (std::size_t i = lo; i < hi; ++i) {
        if (s.is_missing(i)) throw ValidationError("adf_test: '" + s.name() + "' has interior missing values");
        v.push_back(s.value(i));
    }
    return adf_test(std::span<const double>(v), opt);
}

}  // namespace fgsim::stats
