#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fgsim/calibration.hpp"
#include "fgsim/stats/descriptive.hpp"
#include "fgsim/stats/diagnostics.hpp"
#include "fgsim/stats/johansen.hpp"
#include "fgsim/stats/regression.hpp"
#include "fgsim/stats/unit_root.hpp"

using namespace fgsim;
using namespace fgsim::stats;

namespace {

constexpr int kSeeds = 200;

Eigen::MatrixXd with_constant(const std::vector<double>& x) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(x.size()), 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = 1.0;
        X(static_cast<Eigen::Index>(i), 1) = x[i];
    }
    return X;
}

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> random_walk(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> e;
    std::vector<double> x(n);
    double acc = 0.0;
    for (auto& v : x) v = acc += e(rng);
    return x;
}

std::vector<double> white_noise(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> e;
    std::vector<double> x(n);
    for (auto& v : x) v = e(rng);
    return x;
}

Eigen::MatrixXd columns(const std::vector<double>& a, const std::vector<double>& b) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()), 2);
    m.col(0) = vec(a);
    m.col(1) = vec(b);
    return m;
}

const std::vector<TimeSeries>& labor() {
    static const auto s = load_csv(FGSIM_DATA_DIR "/labor_monthly.csv");
    return s;
}

const std::vector<TimeSeries>& inflation() {
    static const auto s = load_csv(FGSIM_DATA_DIR "/inflation_quarterly.csv");
    return s;
}

TimeSeries quarterly_window(const std::string& name, const char* from, const char* to) {
    return find_series(inflation(), name).slice(Period::parse(from), Period::parse(to));
}

}  // namespace

TEST(Ols, PerfectFit) {
    const auto r = ols(vec({1, 2, 3}), with_constant({1, 2, 3}), true);
    EXPECT_NEAR(r.coefficients[1], 1.0, 1e-12);
    EXPECT_NEAR(r.coefficients[0], 0.0, 1e-12);
    EXPECT_NEAR(r.adj_r2, 1.0, 1e-12);
}

TEST(Ols, ConstantResponse) {
    const auto r = ols(vec({2, 2, 2}), with_constant({1, 2, 3}), true);
    EXPECT_NEAR(r.coefficients[1], 0.0, 1e-12);
    EXPECT_NEAR(r.coefficients[0], 2.0, 1e-12);
}

TEST(Ols, HandSolvedNormalEquations) {
    // x̄ = 2.5, ȳ = 2.25, Sxy = 4.5, Sxx = 5
    const auto r = ols(vec({1, 2, 2, 4}), with_constant({1, 2, 3, 4}), true);
    EXPECT_NEAR(r.coefficients[1], 0.9, 1e-10);
    EXPECT_NEAR(r.coefficients[0], 0.0, 1e-10);
    EXPECT_EQ(r.n_obs, 4u);
    EXPECT_EQ(r.df_resid, 2u);
}

TEST(Ols, RankDeficientDesignThrows) {
    EXPECT_THROW(ols(vec({1, 2, 3}), with_constant({5, 5, 5}), true), RankDeficientError);
}

TEST(Ols, NoiselessLineIsRecovered) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = u(rng);
        const double b = u(rng);
        std::vector<double> x(60);
        std::vector<double> y(60);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = u(rng);
            y[i] = a + b * x[i];
        }
        const auto r = ols(vec(y), with_constant(x), true);
        EXPECT_NEAR(r.coefficients[0], a, 1e-10);
        EXPECT_NEAR(r.coefficients[1], b, 1e-10);
    }
}

TEST(Ols, ResidualsOrthogonalToRegressors) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> e;
    const Eigen::Index n = 200;
    Eigen::MatrixXd X(n, 4);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = e(rng) * 10.0;
        X(i, 2) = e(rng) + 50.0;
        X(i, 3) = X(i, 1) * X(i, 1);
        y(i) = 1.0 + 0.3 * X(i, 1) - 0.1 * X(i, 2) + 0.01 * X(i, 3) + e(rng);
    }
    const auto r = ols(y, X, true);
    const Eigen::VectorXd res = vec(r.residuals);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        EXPECT_LT(std::abs(res.dot(X.col(j))), 1e-8 * static_cast<double>(n) * X.col(j).cwiseAbs().maxCoeff());
    }
}

TEST(Ols, ListwiseDeletionThroughDesign) {
    const Period q(Frequency::Quarterly, 2000, 1);
    const TimeSeries y("y", q, {1, 2, 3, 4, 5}, {false, false, true, false, false});
    const TimeSeries x("x", q, {1, 2, 3, 4, 5});
    const auto d = make_design(y, x, true);
    EXPECT_EQ(d.y.size(), 4);
    const auto r = ols(d);
    EXPECT_NEAR(r.coef("x"), 1.0, 1e-12);
    EXPECT_THROW(r.coef("z"), ValidationError);
}

TEST(Adf, WhiteNoiseRejectsRandomWalkDoesNot) {
    int noise_rejects = 0;
    int walk_accepts = 0;
    for (int seed = 0; seed < kSeeds; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        if (adf_test(white_noise(rng, 500)).p_value < 0.05) ++noise_rejects;
        if (adf_test(random_walk(rng, 500)).p_value > 0.05) ++walk_accepts;
    }
    EXPECT_GE(noise_rejects, kSeeds * 9 / 10);
    EXPECT_GE(walk_accepts, kSeeds * 9 / 10);
}

TEST(Adf, AffineRescalingLeavesStatisticUnchanged) {
    std::mt19937_64 rng(17);
    const auto x = random_walk(rng, 300);
    for (auto spec : {AdfSpec::None, AdfSpec::Constant, AdfSpec::ConstantTrend}) {
        AdfOptions opt;
        opt.spec = spec;
        const auto base = adf_test(x, opt);
        opt.fixed_lags = base.lags;
        std::vector<double> y(x.size());
        // a shift is only neutral when a constant is in the regression
        const double shift = spec == AdfSpec::None ? 0.0 : 42.0;
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.5 * x[i] + shift;
        const auto scaled = adf_test(y, opt);
        EXPECT_NEAR(scaled.statistic, base.statistic, 1e-8 * std::abs(base.statistic)) << to_string(spec);
        EXPECT_EQ(scaled.n_obs, base.n_obs);
    }
}

TEST(Adf, PValueIsMonotoneInStatistic) {
    double prev = 0.0;
    for (double tau = -8.0; tau <= 3.0; tau += 0.05) {
        const double p = mackinnon_pvalue(tau, AdfSpec::Constant);
        EXPECT_GE(p, prev - 1e-12);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        prev = p;
    }
    EXPECT_NEAR(mackinnon_pvalue(-2.86, AdfSpec::Constant), 0.05, 0.005);
}

TEST(Adf, FixtureRegions) {
    for (const char* name : {"epop", "unrate"}) {
        const auto& s = find_series(labor(), name);
        EXPECT_GT(adf_test(s).p_value, 0.05) << name;
        EXPECT_LT(adf_test(diff(s)).p_value, 0.05) << name;
    }
}

TEST(Adf, TooShortThrows) { EXPECT_THROW(adf_test(std::vector<double>{1, 2, 3}), ValidationError); }

// The simulated walks have no drift, so the constant belongs inside the
// cointegrating relation.
TEST(Johansen, RecoversCointegrationRank) {
    int rank1 = 0;
    int rank0 = 0;
    std::normal_distribution<double> e;
    for (int seed = 0; seed < kSeeds; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(1000 + seed));
        const auto y1 = random_walk(rng, 500);
        std::vector<double> y2(y1.size());
        for (std::size_t i = 0; i < y1.size(); ++i) y2[i] = 2.0 * y1[i] + e(rng);
        if (johansen_test(columns(y1, y2), 2, JohansenTrend::RestrictedConstant).inferred_rank == 1) ++rank1;
        const auto a = random_walk(rng, 500);
        const auto b = random_walk(rng, 500);
        if (johansen_test(columns(a, b), 2, JohansenTrend::RestrictedConstant).inferred_rank == 0) ++rank0;
    }
    EXPECT_GE(rank1, kSeeds * 9 / 10);
    EXPECT_GE(rank0, kSeeds * 85 / 100);
}

TEST(Johansen, TraceStatisticsDecreaseInRank) {
    std::normal_distribution<double> e;
    for (int seed = 0; seed < 30; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        const auto a = random_walk(rng, 200);
        const auto b = random_walk(rng, 200);
        std::vector<double> c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i] + e(rng);
        Eigen::MatrixXd m(200, 3);
        m.col(0) = vec(a);
        m.col(1) = vec(b);
        m.col(2) = vec(c);
        for (auto trend : {JohansenTrend::None, JohansenTrend::Constant, JohansenTrend::LinearTrend,
                           JohansenTrend::RestrictedConstant}) {
            const auto r = johansen_test(m, 2, trend);
            ASSERT_EQ(r.trace_stats.size(), 3u);
            for (std::size_t i = 1; i < r.trace_stats.size(); ++i) EXPECT_LE(r.trace_stats[i], r.trace_stats[i - 1]);
            for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) EXPECT_LE(r.eigenvalues[i], r.eigenvalues[i - 1]);
        }
    }
}

TEST(Johansen, FixtureInfersRankOne) {
    const auto p = align({find_series(labor(), "epop"), find_series(labor(), "unrate")});
    const auto r = johansen_test(p);
    EXPECT_EQ(r.inferred_rank, 1u);
    EXPECT_GT(r.trace_stats[0], r.crit_5pct_trace[0]);
    EXPECT_LT(r.trace_stats[1], r.crit_5pct_trace[1]);
}

TEST(Johansen, Errors) {
    Eigen::MatrixXd one(50, 1);
    one.setRandom();
    EXPECT_THROW(johansen_test(one), ValidationError);
    Eigen::MatrixXd tiny(4, 2);
    tiny.setRandom();
    EXPECT_THROW(johansen_test(tiny), ValidationError);
}

TEST(HarveyCollier, LinearVersusQuadraticData) {
    std::normal_distribution<double> e(0.0, 0.1);
    int linear_ok = 0;
    int quadratic_rejects = 0;
    for (int seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::vector<double> x(100);
        std::vector<double> lin(100);
        std::vector<double> quad(100);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = static_cast<double>(i) / 10.0;
            lin[i] = 1.0 + 2.0 * x[i] + e(rng);
            quad[i] = 1.0 + 0.5 * x[i] * x[i] + e(rng);
        }
        if (harvey_collier(vec(lin), with_constant(x)).p_value > 0.05) ++linear_ok;
        if (harvey_collier(vec(quad), with_constant(x)).p_value < 0.05) ++quadratic_rejects;
    }
    EXPECT_GE(linear_ok, 45);
    EXPECT_EQ(quadratic_rejects, 50);
}

TEST(HarveyCollier, RecursiveResidualCount) {
    std::vector<double> x{1, 2, 3, 4, 5, 6};
    const auto w = recursive_residuals(vec({1, 3, 2, 5, 4, 6}), with_constant(x));
    EXPECT_EQ(w.size(), 4u);
    EXPECT_THROW(harvey_collier(vec({1, 2, 3}), with_constant({1, 2, 3})), ValidationError);
}

TEST(WhiteTest, HomoscedasticVersusScaledVariance) {
    std::normal_distribution<double> e;
    std::uniform_real_distribution<double> u(1.0, 10.0);
    int homo_ok = 0;
    int hetero_rejects = 0;
    for (int seed = 0; seed < kSeeds; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::vector<double> x(300);
        std::vector<double> y_homo(300);
        std::vector<double> y_het(300);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = u(rng);
            y_homo[i] = 1.0 + 0.5 * x[i] + e(rng);
            y_het[i] = 1.0 + 0.5 * x[i] + x[i] * e(rng);
        }
        const auto X = with_constant(x);
        if (white_test(ols(vec(y_homo), X, true).residuals, X).lm_p_value > 0.05) ++homo_ok;
        if (white_test(ols(vec(y_het), X, true).residuals, X).lm_p_value < 0.05) ++hetero_rejects;
    }
    // the nominal size is 5%, so roughly 95% of homoscedastic draws pass
    EXPECT_GE(homo_ok, kSeeds * 9 / 10);
    EXPECT_GE(hetero_rejects, kSeeds * 9 / 10);
}

TEST(WhiteTest, NeedsConstantColumn) {
    Eigen::MatrixXd X(5, 1);
    X << 1, 2, 3, 4, 5;
    EXPECT_THROW(white_test(std::vector<double>{0.1, -0.1, 0.2, 0.0, -0.2}, X), ValidationError);
}

TEST(Diagnostics, WageRegressionFailsToRejectOnFixture) {
    const auto eci = quarterly_window("eciwg_rate", "1990Q1", "2012Q2");
    const auto pce = quarterly_window("pce_rate", "1990Q1", "2012Q2");
    const auto d = make_design(diff(eci), diff(pce), true);
    const auto fit = ols(d);
    EXPECT_GT(harvey_collier(d).p_value, 0.05);
    const auto w = white_test(fit, d);
    EXPECT_GT(w.lm_p_value, 0.05);
    EXPECT_GT(w.f_p_value, 0.05);
}

TEST(Correlation, IdentityAndAntiCorrelation) {
    const Period q(Frequency::Quarterly, 2000, 1);
    const TimeSeries x("x", q, {1, 4, 2, 8, 5});
    const TimeSeries neg("neg", q, {-1, -4, -2, -8, -5});
    const auto c = correlation_matrix(Panel({x, x, neg}));
    EXPECT_NEAR(c(0, 1), 1.0, 1e-12);
    EXPECT_NEAR(c(0, 2), -1.0, 1e-12);
    EXPECT_NEAR(c(0, 0), 1.0, 1e-12);
}

TEST(Correlation, SymmetricPositiveSemidefinite) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> e;
    const Period q(Frequency::Quarterly, 2000, 1);
    std::vector<TimeSeries> cols;
    std::vector<double> base(40);
    for (auto& v : base) v = e(rng);
    for (int j = 0; j < 5; ++j) {
        std::vector<double> v(40);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = base[i] * j + e(rng);
        cols.emplace_back("c" + std::to_string(j), q, v);
    }
    const auto c = correlation_matrix(Panel(cols));
    EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Correlation, FixtureEpopUnrateStronglyNegative) {
    const auto c = correlation_matrix(align({find_series(labor(), "epop"), find_series(labor(), "unrate")}));
    EXPECT_LT(c(0, 1), -0.9);
}

TEST(Summary, LinearInterpolationPercentiles) {
    const std::vector<double> xs{4, 1, 3, 2};
    const auto s = summarize(xs);
    EXPECT_DOUBLE_EQ(s.p50, 2.5);
    EXPECT_DOUBLE_EQ(s.p25, 1.75);
    EXPECT_DOUBLE_EQ(s.p75, 3.25);
    EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-12);
    EXPECT_THROW(summarize(std::vector<double>{}), ValidationError);
}

TEST(Decompose, PureSinusoidLeavesNoResidual) {
    const std::size_t period = 12;
    std::vector<double> x(96);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
    const auto d = additive_decompose(TimeSeries("s", Period(Frequency::Monthly, 2000, 1), x), period);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!d.residual.is_missing(i)) {
            EXPECT_LT(std::abs(d.residual.value(i)), 1e-6);
        }
    }
}

TEST(Decompose, RampHasNoSeasonality) {
    std::vector<double> x(40);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.3 * static_cast<double>(i) - 2.0;
    const auto d = additive_decompose(TimeSeries("r", Period(Frequency::Quarterly, 2000, 1), x), 4);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_LT(std::abs(d.seasonal.value(i)), 1e-9);
        if (!d.residual.is_missing(i)) {
            EXPECT_LT(std::abs(d.residual.value(i)), 1e-9);
        }
    }
}

TEST(Decompose, RampPlusSquareWaveRecoversBoth) {
    const std::vector<double> wave{1, 1, -1, -1};
    std::vector<double> x(48);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * static_cast<double>(i) + wave[i % 4];
    const auto d = additive_decompose(TimeSeries("c", Period(Frequency::Quarterly, 2000, 1), x), 4);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(d.seasonal.value(i), wave[i % 4], 1e-6);
        if (d.trend.is_missing(i)) continue;
        EXPECT_NEAR(d.trend.value(i), 0.5 * static_cast<double>(i), 1e-6);
        EXPECT_NEAR(d.trend.value(i) + d.seasonal.value(i) + d.residual.value(i), x[i], 1e-12);
    }
    EXPECT_TRUE(d.trend.is_missing(0));
    EXPECT_TRUE(d.trend.is_missing(47));
}

TEST(Decompose, Errors) {
    const TimeSeries s("s", Period(Frequency::Quarterly, 2000, 1), {1, 2, 3, 4, 5});
    EXPECT_THROW(additive_decompose(s, 1), ValidationError);
    EXPECT_THROW(additive_decompose(s, 4), ValidationError);
}

TEST(Decompose, FixtureReconstructsAtInteriorPoints) {
    const auto pce = quarterly_window("pce_rate", "1990Q1", "2012Q2");
    const auto d = additive_decompose(pce, 4);
    for (std::size_t i = 0; i < pce.size(); ++i) {
        if (d.trend.is_missing(i)) continue;
        EXPECT_NEAR(d.trend.value(i) + d.seasonal.value(i) + d.residual.value(i), pce.value(i), 1e-10);
    }
}
