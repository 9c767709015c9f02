#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fgsim/error.hpp"
#include "fgsim/series.hpp"

namespace fgsim::stats {

/// Percentile with linear interpolation between order statistics,
/// q in [0, 100].
inline double percentile(std::span<const double> xs, double q) {
    if (xs.empty()) throw ValidationError("percentile: empty sample");
    if (!(q >= 0.0 && q <= 100.0)) throw ValidationError("percentile: q must lie in [0, 100]");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;  ///< sample (n - 1) standard deviation
    double min = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

inline Summary summarize(std::span<const double> xs) {
    if (xs.empty()) throw ValidationError("summarize: empty sample");
    Summary s;
    s.count = xs.size();
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    s.min = *lo;
    s.max = *hi;
    s.p25 = percentile(xs, 25.0);
    s.p50 = percentile(xs, 50.0);
    s.p75 = percentile(xs, 75.0);
    return s;
}

/// Pearson correlations over the panel's complete rows.
inline Eigen::MatrixXd correlation_matrix(const Panel& p) {
    const auto rows = p.complete_rows();
    if (rows.size() < 2) throw ValidationError("correlation_matrix: need at least two complete rows");
    const auto k = static_cast<Eigen::Index>(p.cols());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), k);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            m(static_cast<Eigen::Index>(i), j) = p.column(static_cast<std::size_t>(j)).value(rows[i]);
        }
    }
    const Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
    const Eigen::VectorXd norms = centered.colwise().norm();
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!(norms(j) > 1e-12 * std::max(1.0, m.col(j).cwiseAbs().maxCoeff()))) {
            throw ValidationError("correlation_matrix: column '" + p.column(static_cast<std::size_t>(j)).name() +
                                  "' has zero variance");
        }
    }
    Eigen::MatrixXd c = (centered.transpose() * centered).array() / (norms * norms.transpose()).array();
    for (Eigen::Index i = 0; i < k; ++i) {
        c(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = std::clamp(0.5 * (c(i, j) + c(j, i)), -1.0, 1.0);
            c(i, j) = c(j, i) = v;
        }
    }
    return c;
}

struct DecompositionResult {
    TimeSeries trend;     ///< missing for the first and last period/2 entries
    TimeSeries seasonal;  ///< defined everywhere
    TimeSeries residual;  ///< defined where the trend is
    std::size_t period = 0;
};

/// Classical additive decomposition. The trend is a centered moving
/// average of span `period` (a 2 x period average when the period is even).
inline DecompositionResult additive_decompose(const TimeSeries& s, std::size_t period) {
    if (period < 2) throw ValidationError("additive_decompose: period must be at least 2");
    const std::size_t n = s.size();
    if (n < 2 * period) throw ValidationError("additive_decompose: series shorter than two periods");
    for (std::size_t i = 0; i < n; ++i) {
        if (s.is_missing(i)) throw ValidationError("additive_decompose: '" + s.name() + "' has missing values");
    }
    const auto& x = s.raw_values();

    std::vector<double> w(period + (period % 2 == 0 ? 1 : 0), 1.0 / static_cast<double>(period));
    if (period % 2 == 0) w.front() = w.back() = 0.5 / static_cast<double>(period);
    const std::size_t half = w.size() / 2;

    std::vector<std::optional<double>> trend(n);
    for (std::size_t i = half; i + half < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * x[i - half + j];
        trend[i] = acc;
    }

    std::vector<double> pos_sum(period, 0.0);
    std::vector<std::size_t> pos_cnt(period, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (trend[i]) {
            pos_sum[i % period] += x[i] - *trend[i];
            ++pos_cnt[i % period];
        }
    }
    std::vector<double> pattern(period);
    double centre = 0.0;
    for (std::size_t p = 0; p < period; ++p) {
        pattern[p] = pos_sum[p] / static_cast<double>(pos_cnt[p]);
        centre += pattern[p];
    }
    centre /= static_cast<double>(period);
    for (auto& v : pattern) v -= centre;

    std::vector<double> seasonal(n);
    std::vector<std::optional<double>> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        seasonal[i] = pattern[i % period];
        if (trend[i]) resid[i] = x[i] - *trend[i] - seasonal[i];
    }
    return DecompositionResult{TimeSeries::from_optional(s.name() + "_trend", s.start(), trend),
                               TimeSeries(s.name() + "_seasonal", s.start(), seasonal),
                               TimeSeries::from_optional(s.name() + "_residual", s.start(), resid), period};
}

}  // namespace fgsim::stats
