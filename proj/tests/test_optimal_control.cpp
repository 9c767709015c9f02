#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fgsim/optimal_control.hpp"

using namespace fgsim;

namespace {

const Period kStart(Frequency::Quarterly, 2012, 3);
const std::vector<double> kGrid{0.125, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};

const VarExpectations& frozen_var() {
    static const auto v = VarExpectations::load(FGSIM_DATA_DIR "/var_expectations.json");
    return v;
}

OcWeights weights(double w_pi, double w_u, double w_r) { return OcWeights::of(w_pi, w_u, w_r); }

ModelState state(double pi, double u, double r) {
    ModelState s;
    s.pi = pi;
    s.u = u;
    s.r = r;
    return s;
}

/// A small problem with a random starting point, demand shock and weights.
OcProblem random_problem(std::uint64_t seed, std::size_t horizon = 4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    OcProblem pb;
    pb.params.nairu = 5.5;
    pb.initial = steady_state(pb.params);
    pb.initial.x = -3.0 + 4.0 * u(rng);
    pb.initial.u = pb.params.nairu - pb.params.okun * pb.initial.x;
    pb.initial.epop = epop_identity(pb.initial.lfpr, pb.initial.u);
    pb.initial.pi = 0.5 + 2.5 * u(rng);
    pb.initial.pi_core = pb.initial.pi;
    pb.initial.r = 0.125 + 3.0 * u(rng);
    pb.start = kStart;
    pb.horizon = horizon;
    pb.shocks.push_back(Shock{AggregateDemand{{-2.0 * u(rng), -1.0 * u(rng)}}, kStart, 2});
    const double w_pi = 0.2 + 10.0 * u(rng);
    const double w_u = 0.2 + 5.0 * u(rng);
    pb.weights = weights(w_pi, w_u, 0.2 + 10.0 * u(rng));
    return pb;
}

/// Late-2012 slack with no further shocks.
OcProblem slack_problem(const OcWeights& w, std::size_t horizon = 22) {
    OcProblem pb;
    pb.params.nairu = 5.5;
    pb.initial = steady_state(pb.params);
    pb.initial.u = 8.2;
    pb.initial.x = -(8.2 - 5.5) / pb.params.okun;
    pb.initial.epop = epop_identity(pb.initial.lfpr, pb.initial.u);
    pb.initial.pi = 1.6;
    pb.initial.pi_core = 1.8;
    pb.initial.wage = 1.8;
    pb.initial.r = 0.125;
    pb.start = kStart;
    pb.horizon = horizon;
    pb.weights = w;
    return pb;
}

OcProblem ad_problem(const OcWeights& w) {
    auto pb = slack_problem(w);
    pb.shocks.push_back(Shock{default_ad_path(), kStart, 6});
    return pb;
}

std::vector<double> rule_path(const OcProblem& pb, RuleKind kind, RuleParams rp = {}) {
    const auto tr = simulate(pb.initial, pb.params, frozen_var(), rule_policy(kind, rp), pb.shocks, pb.start, pb.horizon);
    return tr.rates();
}

double smoothing_term(const OcProblem& pb, const std::vector<double>& rates) {
    double acc = 0.0;
    double disc = 1.0;
    double prev = pb.initial.r;
    for (double r : rates) {
        acc += disc * (r - prev) * (r - prev);
        disc *= pb.weights.discount;
        prev = r;
    }
    return acc;
}

}  // namespace

TEST(OcLoss, Examples) {
    const double nairu = 4.5;
    const std::vector<ModelState> flat(5, state(2.0, nairu, 3.0));
    EXPECT_DOUBLE_EQ(oc_loss(flat, 3.0, OcWeights::balanced(), nairu), 0.0);

    const auto pi_only = weights(1.0, 0.0, 0.0);
    const std::vector<ModelState> one{state(3.0, nairu, 3.0)};
    EXPECT_DOUBLE_EQ(oc_loss(one, 3.0, pi_only, nairu), 1.0);
    const std::vector<ModelState> two(2, state(3.0, nairu, 3.0));
    EXPECT_NEAR(oc_loss(two, 3.0, pi_only, nairu), 1.99, 1e-12);

    const auto r_only = weights(0.0, 0.0, 10.0);
    EXPECT_DOUBLE_EQ(oc_loss(flat, 2.0, r_only, nairu), 10.0);
    EXPECT_THROW(oc_loss(std::vector<ModelState>{}, 0.0, pi_only, nairu), ValidationError);
}

TEST(OcLoss, NonnegativeAndZeroOnlyWithoutDeviations) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        std::vector<ModelState> tr;
        for (int t = 0; t < 4; ++t) tr.push_back(state(2.0 + d(rng), 4.5 + d(rng), 2.0 + d(rng)));
        EXPECT_GT(oc_loss(tr, 2.0, OcWeights::balanced(), 4.5), 0.0);
    }
}

TEST(OcWeights, Validation) {
    EXPECT_THROW(weights(0.0, 0.0, 0.0).validate(), ValidationError);
    EXPECT_THROW(weights(-1.0, 1.0, 1.0).validate(), ValidationError);
    OcWeights w;
    w.discount = 0.0;
    EXPECT_THROW(w.validate(), ValidationError);
    EXPECT_NO_THROW(OcWeights::inflation_heavy().validate());
}

TEST(SolveOc, SteadyStateNeedsNoAction) {
    OcProblem pb;
    pb.initial = steady_state(pb.params);
    pb.start = kStart;
    pb.horizon = 12;
    const auto res = solve_oc(pb);
    EXPECT_LT(res.loss, 1e-6);
    for (double r : res.rates) EXPECT_NEAR(r, pb.initial.r, 1e-3);
}

TEST(SolveOc, MatchesBruteForceOnSmallProblems) {
    int matched = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto pb = random_problem(seed);
        OcOptions opt;
        opt.grid = kGrid;
        const auto fast = solve_oc(pb, opt);
        const auto slow = brute_force_oc(pb, kGrid);
        EXPECT_LE(fast.loss, slow.loss + 1e-9 * std::max(1.0, slow.loss)) << seed;
        if (std::abs(fast.loss - slow.loss) <= 1e-9 && fast.rates == slow.rates) ++matched;
    }
    EXPECT_GE(matched, 48);
}

TEST(SolveOc, ContinuousSolutionBeatsEveryGridPath) {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const auto pb = random_problem(seed);
        EXPECT_LE(solve_oc(pb).loss, brute_force_oc(pb, kGrid).loss * (1.0 + 1e-6)) << seed;
    }
}

TEST(SolveOc, RatesRespectTheBound) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto pb = random_problem(seed, 10);
        pb.elb = seed % 2 == 0 ? 0.125 : 0.5;
        for (double r : solve_oc(pb).rates) EXPECT_GE(r, pb.elb);
    }
}

TEST(SolveOc, ReportedLossComesFromSimulation) {
    const auto pb = random_problem(7, 8);
    const auto res = solve_oc(pb);
    EXPECT_DOUBLE_EQ(res.loss, oc_path_loss(pb, res.rates));
    EXPECT_EQ(res.rates.size(), pb.horizon);
}

TEST(SolveOc, DominatesRulePaths) {
    for (const auto& w : {OcWeights::balanced(), OcWeights::inflation_heavy()}) {
        for (const auto& pb : {ad_problem(w), slack_problem(w)}) {
            const double oc = solve_oc(pb).loss;
            for (auto kind : {RuleKind::Taylor, RuleKind::Inertial, RuleKind::Modified}) {
                const auto rp = kind == RuleKind::Modified ? RuleParams::aggressive() : RuleParams{};
                const double rule = oc_path_loss(pb, rule_path(pb, kind, rp));
                EXPECT_LE(oc, rule * (1.0 + 1e-6)) << to_string(kind);
            }
        }
    }
}

TEST(SolveOc, Deterministic) {
    const auto pb = ad_problem(OcWeights::balanced());
    const auto a = solve_oc(pb);
    const auto b = solve_oc(pb);
    EXPECT_EQ(a.rates, b.rates);
    EXPECT_EQ(a.loss, b.loss);
}

TEST(SolveOc, InvalidInputs) {
    auto pb = random_problem(1);
    pb.horizon = 0;
    EXPECT_THROW(solve_oc(pb), ValidationError);
    pb = random_problem(1);
    OcOptions opt;
    opt.grid = std::vector<double>{0.0, 1.0};
    EXPECT_THROW(solve_oc(pb, opt), ValidationError);
    opt.grid = std::vector<double>{};
    EXPECT_THROW(solve_oc(pb, opt), ValidationError);
}

TEST(SolveOc, PresetLiftoffOrdering) {
    for (bool with_shock : {false, true}) {
        const auto balanced = with_shock ? ad_problem(OcWeights::balanced()) : slack_problem(OcWeights::balanced());
        const auto heavy = with_shock ? ad_problem(OcWeights::inflation_heavy()) : slack_problem(OcWeights::inflation_heavy());
        const auto lb = liftoff_quarter(solve_oc(balanced).rates, balanced.elb).value_or(balanced.horizon);
        const auto lh = liftoff_quarter(solve_oc(heavy).rates, heavy.elb).value_or(heavy.horizon);
        EXPECT_GE(lh, lb) << (with_shock ? "demand shock" : "slack only");
    }
}

TEST(BruteForce, TwoPointGridPicksTheCheaperEndpoint) {
    auto pb = random_problem(5, 1);
    pb.elb = 0.0;
    const std::vector<double> grid{0.0, 1.0};
    const auto res = brute_force_oc(pb, grid);
    const double l0 = oc_path_loss(pb, std::vector<double>{0.0});
    const double l1 = oc_path_loss(pb, std::vector<double>{1.0});
    EXPECT_EQ(res.rates.front(), l0 <= l1 ? 0.0 : 1.0);
    EXPECT_DOUBLE_EQ(res.loss, std::min(l0, l1));
    EXPECT_EQ(res.iterations, 2u);
}

TEST(BruteForce, ZeroLossPathIsFound) {
    OcProblem pb;
    pb.initial = steady_state(pb.params);
    pb.start = kStart;
    pb.horizon = 4;
    const auto res = brute_force_oc(pb, kGrid);
    EXPECT_EQ(res.rates, std::vector<double>(4, 3.0));
    EXPECT_NEAR(res.loss, 0.0, 1e-18);
}

TEST(BruteForce, TiesGoToTheLowestPath) {
    OcProblem pb;
    pb.initial = steady_state(pb.params);
    pb.start = kStart;
    pb.horizon = 2;
    pb.weights = weights(0.0, 0.0, 1.0);
    pb.weights.discount = 1.0;
    pb.initial.r = 2.0;
    // no shocks and only the smoothing term: rates 1 and 3 tie for the first step
    const auto res = brute_force_oc(pb, {1.0, 3.0});
    EXPECT_EQ(res.rates, (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(brute_force_oc(pb, {1.0, 3.0}).rates, res.rates);
}

TEST(BruteForce, WeightScalingKeepsTheArgmin) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto pb = random_problem(seed, 3);
        const auto base = brute_force_oc(pb, kGrid);
        for (double c : {0.1, 7.0}) {
            auto scaled = pb;
            scaled.weights.w_pi *= c;
            scaled.weights.w_u *= c;
            scaled.weights.w_r *= c;
            const auto res = brute_force_oc(scaled, kGrid);
            EXPECT_EQ(res.rates, base.rates) << seed;
            EXPECT_NEAR(res.loss, c * base.loss, 1e-9 * c * base.loss);
        }
    }
}

TEST(BruteForce, HeavierSmoothingMovesRatesLess) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto pb = random_problem(seed, 3);
        double prev_term = std::numeric_limits<double>::infinity();
        double prev_moves = std::numeric_limits<double>::infinity();
        for (double w_r : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            pb.weights.w_r = w_r;
            const auto res = brute_force_oc(pb, kGrid);
            const double term = smoothing_term(pb, res.rates);
            double moves = std::abs(res.rates[0] - pb.initial.r);
            for (std::size_t t = 1; t < res.rates.size(); ++t) moves += std::abs(res.rates[t] - res.rates[t - 1]);
            EXPECT_LE(term, prev_term + 1e-12) << seed << " w_r " << w_r;
            EXPECT_LE(moves, prev_moves + 1e-12) << seed << " w_r " << w_r;
            prev_term = term;
            prev_moves = moves;
        }
    }
}

TEST(BruteForce, SearchSpaceGuard) {
    auto pb = random_problem(1, 9);
    EXPECT_THROW(brute_force_oc(pb, kGrid), ValidationError);
}
