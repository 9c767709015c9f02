#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fgsim/calibration.hpp"

using namespace fgsim;

namespace {

const std::vector<TimeSeries>& labor() {
    static const auto s = load_csv(FGSIM_DATA_DIR "/labor_monthly.csv");
    return s;
}

const std::vector<TimeSeries>& inflation() {
    static const auto s = load_csv(FGSIM_DATA_DIR "/inflation_quarterly.csv");
    return s;
}

TimeSeries quarterly(const std::string& name, const char* from, const char* to) {
    return find_series(inflation(), name).slice(Period::parse(from), Period::parse(to));
}

TimeSeries shifted(const TimeSeries& s, double c) {
    std::vector<std::optional<double>> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.is_missing(i)) v[i] = s.value(i) + c;
    }
    return TimeSeries::from_optional(s.name(), s.start(), v);
}

TimeSeries walk(std::mt19937_64& rng, const std::string& name, double level) {
    std::normal_distribution<double> e(0.0, 0.2);
    std::vector<double> v(270);
    for (auto& x : v) x = level += e(rng);
    return TimeSeries(name, Period(Frequency::Monthly, 1990, 1), v);
}

}  // namespace

TEST(DifferenceThreshold, WorkedExample) {
    EXPECT_NEAR(difference_threshold(80.2, 5.4, -0.0116, -0.5329, 6.5), 79.62541, 1e-5);
}

TEST(DifferenceThreshold, DegenerateCoefficients) {
    const std::vector<double> epop{80.1, 79.3, 78.8};
    const std::vector<double> unrate{5.0, 6.1, 7.9};
    EXPECT_EQ(difference_thresholds(epop, unrate, 0.0, 0.0, 6.5), epop);
    EXPECT_DOUBLE_EQ(difference_threshold(80.2, 6.5, 0.0, -0.5329, 6.5), 80.2);
    EXPECT_THROW(difference_thresholds(epop, {1.0}, 0.0, 0.0, 6.5), ValidationError);
}

TEST(LevelThreshold, WorkedExample) { EXPECT_NEAR(level_threshold(85.6303, -1.0896, 6.5), 78.5479, 1e-4); }

TEST(LevelThreshold, FlatRelationIgnoresThreshold) {
    for (double t : {3.0, 6.5, 9.0}) EXPECT_DOUBLE_EQ(level_threshold(77.0, 0.0, t), 77.0);
}

TEST(EpopCalibration, DifferenceMethodOnFixture) {
    const auto est = calibrate_epop_threshold(find_series(labor(), "epop"), find_series(labor(), "unrate"));
    EXPECT_EQ(est.method, ThresholdMethod::DifferenceRegression);
    EXPECT_EQ(est.per_obs_thresholds.size(), 270u);
    EXPECT_LT(est.slope, 0.0);
    EXPECT_FALSE(est.point_estimate.has_value());
    EXPECT_LE(est.p25, est.p50);
    EXPECT_LE(est.p50, est.p75);
    // per-observation thresholds follow the closed form
    const auto& epop = find_series(labor(), "epop");
    const auto& unrate = find_series(labor(), "unrate");
    for (std::size_t i = 0; i < est.per_obs_thresholds.size(); i += 37) {
        EXPECT_NEAR(est.per_obs_thresholds[i],
                    epop.value(i) - est.intercept - est.slope * (unrate.value(i) - 6.5), 1e-12);
    }
}

TEST(EpopCalibration, DifferenceMethodIsShiftEquivariant) {
    const auto& epop = find_series(labor(), "epop");
    const auto& unrate = find_series(labor(), "unrate");
    const auto base = calibrate_epop_threshold(epop, unrate);
    const auto moved = calibrate_epop_threshold(shifted(epop, 3.25), unrate);
    ASSERT_EQ(moved.per_obs_thresholds.size(), base.per_obs_thresholds.size());
    for (std::size_t i = 0; i < base.per_obs_thresholds.size(); ++i) {
        EXPECT_NEAR(moved.per_obs_thresholds[i] - base.per_obs_thresholds[i], 3.25, 1e-9);
    }
}

TEST(EpopCalibration, CenteredThresholdGivesMeanLevel) {
    const auto& epop = find_series(labor(), "epop");
    const auto& unrate = find_series(labor(), "unrate");
    const double mean_u = stats::summarize(unrate.observed()).mean;
    const double mean_e = stats::summarize(epop.observed()).mean;
    const auto est = calibrate_epop_threshold(epop, unrate, mean_u);
    // with a = 0, the centred driver term averages out
    const auto zero_a = difference_thresholds(epop.observed(), unrate.observed(), 0.0, est.slope, mean_u);
    EXPECT_NEAR(stats::summarize(zero_a).mean, mean_e, 1e-10);
}

TEST(EpopCalibration, LevelMethodOnFixture) {
    const auto est = calibrate_epop_threshold_level(find_series(labor(), "epop"), find_series(labor(), "unrate"));
    ASSERT_TRUE(est.point_estimate.has_value());
    EXPECT_LT(est.slope, 0.0);
    EXPECT_NEAR(*est.point_estimate, est.intercept + est.slope * 6.5, 1e-12);
    EXPECT_NEAR(est.p50, *est.point_estimate, 1.0);
}

TEST(EpopCalibration, LevelPointIsAffineInThreshold) {
    const auto& epop = find_series(labor(), "epop");
    const auto& unrate = find_series(labor(), "unrate");
    const auto a = calibrate_epop_threshold_level(epop, unrate, 5.0);
    const auto b = calibrate_epop_threshold_level(epop, unrate, 7.0);
    const auto c = calibrate_epop_threshold_level(epop, unrate, 8.5);
    EXPECT_NEAR((*b.point_estimate - *a.point_estimate) / 2.0, a.slope, 1e-10);
    EXPECT_NEAR((*c.point_estimate - *b.point_estimate) / 1.5, a.slope, 1e-10);
}

TEST(EpopCalibration, LevelMethodRefusedExactlyWhenRankIsZero) {
    int refused = 0;
    for (int seed = 0; seed < 40; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        const auto e = walk(rng, "epop", 78.0);
        const auto u = walk(rng, "unrate", 6.0);
        const auto rank = stats::johansen_test(align({e, u})).inferred_rank;
        if (rank == 0) {
            EXPECT_THROW(calibrate_epop_threshold_level(e, u), NotCointegratedError) << seed;
            ++refused;
        } else {
            EXPECT_NO_THROW(calibrate_epop_threshold_level(e, u)) << seed;
        }
    }
    EXPECT_GT(refused, 20);
}

TEST(EpopCalibration, TooFewObservations) {
    const TimeSeries e("epop", Period(Frequency::Monthly, 2000, 1), {80, 79, 78, 79, 80});
    const TimeSeries u("unrate", Period(Frequency::Monthly, 2000, 1), {5, 6, 7, 6, 5});
    EXPECT_THROW(calibrate_epop_threshold(e, u), ValidationError);
}

TEST(WageCalibration, FixtureRangeIsPlausible) {
    const auto est = calibrate_wage_threshold(quarterly("eciwg_rate", "1990Q1", "2012Q2"),
                                              quarterly("pce_rate", "1990Q1", "2012Q2"));
    EXPECT_EQ(est.per_obs_thresholds.size(), 90u);
    // the published interquartile range is (3.07, 4.24) with median 3.47
    EXPECT_NEAR(est.p50, 3.47, 0.25);
    EXPECT_NEAR(est.p25, 3.07, 0.25);
    EXPECT_NEAR(est.p75, 4.24, 0.4);
}

TEST(WageCalibration, ZeroCoefficientsReturnWageSeries) {
    const std::vector<double> eci{3.1, 2.9, 3.4};
    EXPECT_EQ(difference_thresholds(eci, {1.0, 2.0, 3.0}, 0.0, 0.0, 2.5), eci);
    EXPECT_EQ(difference_thresholds(eci, {2.5, 2.5, 2.5}, 0.0, 0.7, 2.5), eci);
}

TEST(WageCalibration, LevelMethodAndMonthlyInputsRefused) {
    const auto eci = quarterly("eciwg_rate", "1990Q1", "2012Q2");
    const auto pce = quarterly("pce_rate", "1990Q1", "2012Q2");
    EXPECT_THROW(calibrate_wage_threshold(eci, pce, 2.5, ThresholdMethod::LevelRegression), ValidationError);
    EXPECT_THROW(calibrate_wage_threshold(find_series(labor(), "epop"), find_series(labor(), "unrate")),
                 ValidationError);
}

TEST(PhillipsCurves, FixtureSlopesAreNegative) {
    const auto gap = unrate_gap(quarterly("unrate", "1990Q1", "2012Q2"), quarterly("nairu", "1990Q1", "2012Q2"));
    const Panel p = align({quarterly("pce_rate", "1990Q1", "2012Q2"), quarterly("eciwg_rate", "1990Q1", "2012Q2"), gap});
    const auto pc = phillips_regressions(p);
    EXPECT_LT(pc.price.coef("unrate_gap"), 0.0);
    EXPECT_LT(pc.wage.coef("unrate_gap"), 0.0);
    EXPECT_GE(pc.wage.adj_r2, 0.25);
    EXPECT_LE(pc.wage.adj_r2, 0.45);
}

TEST(PhillipsCurves, ZeroVarianceGapIsRankDeficient) {
    const Period q(Frequency::Quarterly, 2000, 1);
    const TimeSeries pce("pce_rate", q, {1.5, 2.0, 2.5, 1.9});
    const TimeSeries eci("eciwg_rate", q, {3.0, 3.1, 3.3, 2.9});
    const TimeSeries gap("unrate_gap", q, {0.5, 0.5, 0.5, 0.5});
    EXPECT_THROW(phillips_regressions(Panel({pce, eci, gap})), RankDeficientError);
}

TEST(UnrateGap, Subtracts) {
    const Period q(Frequency::Quarterly, 2000, 1);
    const auto g = unrate_gap(TimeSeries("u", q, {5.0, 6.0}), TimeSeries("n", q + 1, {5.5, 5.0}));
    EXPECT_EQ(g.start(), q + 1);
    EXPECT_DOUBLE_EQ(g.value(0), 0.5);
}

TEST(Passthrough, IdentityDataGivesUnitSlope) {
    const Period q(Frequency::Quarterly, 2002, 1);
    const TimeSeries eci("eciwg_rate", q, {3.0, 2.4, 3.7, 1.9, 2.8});
    const auto r = wage_passthrough_regression(TimeSeries("pce_rate", q, eci.observed()), eci);
    EXPECT_NEAR(r.coefficients[1], 1.0, 1e-12);
    EXPECT_NEAR(r.coefficients[0], 0.0, 1e-12);
}

TEST(Passthrough, ConstantWageIsRankDeficient) {
    const Period q(Frequency::Quarterly, 2002, 1);
    EXPECT_THROW(wage_passthrough_regression(TimeSeries("pce_rate", q, {1, 2, 3}), TimeSeries("eciwg_rate", q, {3, 3, 3})),
                 RankDeficientError);
}

TEST(Passthrough, FixtureSlopeIsPositive) {
    const auto r = wage_passthrough_regression(quarterly("pce_rate", "2002Q1", "2020Q2"),
                                               quarterly("eciwg_rate", "2002Q1", "2020Q2"));
    EXPECT_GT(r.coefficients[1], 0.0);
    EXPECT_LT(r.coefficients[1], 1.0);
}
