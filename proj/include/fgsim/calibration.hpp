#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fgsim/series.hpp"
#include "fgsim/stats/descriptive.hpp"
#include "fgsim/stats/johansen.hpp"
#include "fgsim/stats/regression.hpp"

namespace fgsim {

enum class ThresholdMethod { DifferenceRegression, LevelRegression };

inline std::string_view to_string(ThresholdMethod m) noexcept {
    return m == ThresholdMethod::DifferenceRegression ? "difference_regression" : "level_regression";
}

/// Thresholds implied by each observation of a (level, driver) pair, plus
/// their summary.
struct ThresholdEstimate {
    ThresholdMethod method = ThresholdMethod::DifferenceRegression;
    std::vector<double> per_obs_thresholds;
    std::vector<Period> periods;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double max = 0.0;
    /// Level-regression fitted value at the driver threshold.
    std::optional<double> point_estimate;
    double intercept = 0.0;
    double slope = 0.0;
    stats::RegressionResult regression;
};

/// level_t - a - b (driver_t - driver_thresh) for every observation.
inline std::vector<double> difference_thresholds(const std::vector<double>& level, const std::vector<double>& driver,
                                                 double a, double b, double driver_thresh) {
    if (level.size() != driver.size()) throw ValidationError("difference_thresholds: length mismatch");
    std::vector<double> out(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) out[i] = level[i] - a - b * (driver[i] - driver_thresh);
    return out;
}

inline double difference_threshold(double level, double driver, double a, double b, double driver_thresh) {
    return level - a - b * (driver - driver_thresh);
}

/// Fitted level at the driver threshold.
inline double level_threshold(double intercept, double slope, double driver_thresh) {
    return intercept + slope * driver_thresh;
}

namespace detail {

inline void fill_summary(ThresholdEstimate& est) {
    const auto s = stats::summarize(est.per_obs_thresholds);
    est.mean = s.mean;
    est.sd = s.sd;
    est.min = s.min;
    est.p25 = s.p25;
    est.p50 = s.p50;
    est.p75 = s.p75;
    est.max = s.max;
}

/// Complete (level, driver) observations in period order.
inline std::pair<std::vector<double>, std::vector<double>> paired(const Panel& p, std::vector<Period>& periods) {
    std::vector<double> a;
    std::vector<double> b;
    for (auto r : p.complete_rows()) {
        a.push_back(p.column(0).value(r));
        b.push_back(p.column(1).value(r));
        periods.push_back(p.period(r));
    }
    return {std::move(a), std::move(b)};
}

inline ThresholdEstimate difference_method(const TimeSeries& level, const TimeSeries& driver, double driver_thresh,
                                           std::size_t min_obs) {
    const Panel p = align({level, driver});
    ThresholdEstimate est;
    est.method = ThresholdMethod::DifferenceRegression;
    auto [lv, dv] = paired(p, est.periods);
    if (lv.size() < min_obs) {
        throw ValidationError("threshold calibration needs at least " + std::to_string(min_obs) + " observations, got " +
                              std::to_string(lv.size()));
    }
    est.regression = stats::ols(diff(p.column(0)), diff(p.column(1)), true);
    est.intercept = est.regression.coefficients[0];
    est.slope = est.regression.coefficients[1];
    est.per_obs_thresholds = difference_thresholds(lv, dv, est.intercept, est.slope, driver_thresh);
    fill_summary(est);
    return est;
}

}  // namespace detail

/// Difference method: fit Δepop = a + b Δunrate, then map every
/// observation to epop_t - a - b (unrate_t - unrate_thresh).
inline ThresholdEstimate calibrate_epop_threshold(const TimeSeries& epop, const TimeSeries& unrate,
                                                  double unrate_thresh = 6.5) {
    return detail::difference_method(epop, unrate, unrate_thresh, 30);
}

/// Level method, licensed only by cointegration: the Johansen trace
/// procedure must find rank >= 1. The per-observation values are
/// epop_t - slope (unrate_t - thresh), i.e. the point estimate plus each
/// level residual.
inline ThresholdEstimate calibrate_epop_threshold_level(const TimeSeries& epop, const TimeSeries& unrate,
                                                        double unrate_thresh = 6.5, std::size_t johansen_lags = 2,
                                                        stats::JohansenTrend trend = stats::JohansenTrend::LinearTrend) {
    const Panel p = align({epop, unrate});
    const auto joh = stats::johansen_test(p, johansen_lags, trend);
    if (joh.inferred_rank == 0) {
        throw NotCointegratedError("level regression refused: '" + epop.name() + "' and '" + unrate.name() +
                                   "' are not cointegrated (trace " + std::to_string(joh.trace_stats[0]) + " < " +
                                   std::to_string(joh.crit_5pct_trace[0]) + ")");
    }
    ThresholdEstimate est;
    est.method = ThresholdMethod::LevelRegression;
    auto [lv, dv] = detail::paired(p, est.periods);
    est.regression = stats::ols(p.column(0), p.column(1), true);
    est.intercept = est.regression.coefficients[0];
    est.slope = est.regression.coefficients[1];
    est.point_estimate = level_threshold(est.intercept, est.slope, unrate_thresh);
    est.per_obs_thresholds = difference_thresholds(lv, dv, 0.0, est.slope, unrate_thresh);
    detail::fill_summary(est);
    return est;
}

/// Wage threshold by the difference method: Δeciwg = a + b Δpce.
inline ThresholdEstimate calibrate_wage_threshold(const TimeSeries& eciwg, const TimeSeries& pce,
                                                  double pce_thresh = 2.5,
                                                  ThresholdMethod method = ThresholdMethod::DifferenceRegression) {
    if (method == ThresholdMethod::LevelRegression) {
        throw ValidationError("level regression refused for the wage/price pair: the series are not cointegrated");
    }
    if (eciwg.freq() != Frequency::Quarterly || pce.freq() != Frequency::Quarterly) {
        throw ValidationError("calibrate_wage_threshold: series must be quarterly");
    }
    return detail::difference_method(eciwg, pce, pce_thresh, 8);
}

struct PhillipsCurves {
    stats::RegressionResult price;  ///< pce_rate on unrate_gap
    stats::RegressionResult wage;   ///< eciwg_rate on unrate_gap
};

/// Price and wage Phillips curves on a panel with columns pce_rate,
/// eciwg_rate and unrate_gap.
inline PhillipsCurves phillips_regressions(const Panel& p) {
    const auto& gap = p.column("unrate_gap");
    return {stats::ols(p.column("pce_rate"), gap, true), stats::ols(p.column("eciwg_rate"), gap, true)};
}

/// Unemployment gap series, unrate - nairu.
inline TimeSeries unrate_gap(const TimeSeries& unrate, const TimeSeries& nairu) {
    const Panel p = align({unrate, nairu});
    std::vector<std::optional<double>> v(p.rows());
    for (std::size_t r = 0; r < p.rows(); ++r) {
        if (p.row_complete(r)) v[r] = p.column(0).value(r) - p.column(1).value(r);
    }
    return TimeSeries::from_optional("unrate_gap", p.start(), v);
}

/// Price inflation regressed on wage growth.
inline stats::RegressionResult wage_passthrough_regression(const TimeSeries& pce, const TimeSeries& eciwg) {
    if (pce.freq() != Frequency::Quarterly || eciwg.freq() != Frequency::Quarterly) {
        throw ValidationError("wage_passthrough_regression: series must be quarterly");
    }
    return stats::ols(pce, eciwg, true);
}

}  // namespace fgsim
