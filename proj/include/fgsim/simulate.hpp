#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fgsim/model.hpp"
#include "fgsim/policy.hpp"

namespace fgsim {

enum class ExpectationsMode { Var, PerfectForesight };

inline std::string_view to_string(ExpectationsMode m) noexcept {
    return m == ExpectationsMode::Var ? "var" : "perfect_foresight";
}

/// Everything a policy closure may look at when setting the rate for
/// quarter t. `state` is the last realized quarter.
struct PolicyContext {
    std::size_t t = 0;
    Period period;
    const ModelState& state;
    std::span<const ModelState> history;  ///< oldest first, ends with `state`
    const ThresholdState& thresholds;
    double projected_pce = 0.0;
    const ModelParams& params;
};

/// Returns the prescribed (pre-threshold, pre-bound) policy rate.
using PolicyFn = std::function<double(const PolicyContext&)>;

inline PolicyFn rule_policy(RuleKind kind, RuleParams rp) {
    if (kind == RuleKind::OptimalControl) throw ValidationError("optimal control needs a solved rate path");
    return [kind, rp](const PolicyContext& c) { return rule_rate(kind, c.state.r, c.state, rp, c.params); };
}

/// Exogenous path; quarters beyond its end repeat the final rate.
inline PolicyFn path_policy(std::vector<double> rates) {
    if (rates.empty()) throw ValidationError("path_policy: empty rate path");
    return [rates = std::move(rates)](const PolicyContext& c) { return rates[std::min(c.t, rates.size() - 1)]; };
}

struct SimulationOptions {
    ThresholdConfig threshold{};  ///< inactive unless configured
    double elb = 0.125;
    bool enforce_elb = true;
    bool check_stability = true;
};

struct Trajectory {
    Period start;
    std::vector<ModelState> states;
    std::vector<ThresholdState> thresholds;
    std::vector<double> rule_rates;     ///< prescriptions before hold and bound
    std::vector<double> projected_pce;  ///< what the threshold block saw

    std::size_t size() const noexcept { return states.size(); }
    Period period(std::size_t i) const { return start + static_cast<long>(i); }
    std::vector<double> rates() const {
        std::vector<double> r;
        r.reserve(states.size());
        for (const auto& s : states) r.push_back(s.r);
        return r;
    }
};

namespace detail {

inline std::vector<Vec3> deviations(std::span<const ModelState> hist, const ModelParams& p) {
    std::vector<Vec3> z;
    z.reserve(hist.size());
    for (const auto& s : hist) z.push_back(var_deviation(s, p));
    return z;
}

/// History window for the VAR: the last `order` states, padded at the
/// front with the earliest state available.
inline std::vector<ModelState> var_window(std::span<const ModelState> hist, std::size_t order) {
    std::vector<ModelState> w;
    const std::size_t need = std::max<std::size_t>(order, 1);
    for (std::size_t i = 0; i < need; ++i) {
        const long idx = static_cast<long>(hist.size()) - static_cast<long>(need) + static_cast<long>(i);
        w.push_back(hist[static_cast<std::size_t>(std::max<long>(idx, 0))]);
    }
    return w;
}

/// Deviation forecast h = 1..horizon from the end of `hist`.
inline std::vector<Vec3> forecast(std::span<const ModelState> hist, const VarExpectations& var, const ModelParams& p,
                                  std::size_t horizon) {
    const auto w = var_window(hist, var.order());
    const auto z = deviations(w, p);
    return var_expect(z, var, horizon);
}

/// One VAR-mode quarter: expected inflation is the two-step forecast
/// (the quarter after the one being formed); the long yield uses the
/// forecast rate path from the new quarter on.
inline ModelState var_step(std::span<const ModelState> hist, double rate, const ShockInputs& sh, const ModelParams& p,
                           const VarExpectations& var) {
    const ModelState& s = hist.back();
    const auto f = forecast(hist, var, p, 2);
    StepExpectations e;
    e.pi = next_ptr(s, sh) + f[1](0);
    ModelState n = step(s, rate, sh, p, e);

    std::vector<ModelState> ext(hist.begin(), hist.end());
    ext.push_back(n);
    const auto g = forecast(ext, var, p, kLongYieldQuarters - 1);
    std::vector<double> path{rate};
    for (const auto& z : g) path.push_back(p.r_star + n.ptr + z(1));
    n.rg10 = long_yield(path, p.term_premium);
    return n;
}

}  // namespace detail

/// Spectral radius of the shock-free VAR-mode economy closed by the
/// standard Taylor rule without a lower bound. The map is linear, so unit
/// perturbations of the dynamic state give its exact Jacobian.
inline double closed_loop_radius(const ModelParams& p, const VarExpectations& var, const RuleParams& rule = {}) {
    const std::size_t w = std::max<std::size_t>(var.order(), 1);
    const ModelState ss = steady_state(p);
    const Eigen::Index dim = static_cast<Eigen::Index>(6 + 3 * (w - 1));

    auto unpack = [&](const Eigen::VectorXd& v) {
        std::vector<ModelState> hist(w, ss);
        ModelState& s = hist.back();
        s.x += v(0);
        s.pi += v(1);
        s.pi_core += v(2);
        s.wage += v(3);
        s.fiscal += v(4);
        s.r += v(5);
        for (std::size_t j = 0; j + 1 < w; ++j) {
            ModelState& o = hist[w - 2 - j];
            const auto b = static_cast<Eigen::Index>(6 + 3 * j);
            o.pi += v(b);
            o.r += v(b + 1);
            o.x += v(b + 2);
        }
        return hist;
    };
    auto pack = [&](const std::vector<ModelState>& hist) {
        Eigen::VectorXd v(dim);
        const ModelState& s = hist.back();
        v << s.x - ss.x, s.pi - ss.pi, s.pi_core - ss.pi_core, s.wage - ss.wage, s.fiscal - ss.fiscal, s.r - ss.r,
            Eigen::VectorXd::Zero(dim - 6);
        for (std::size_t j = 0; j + 1 < w; ++j) {
            const ModelState& o = hist[w - 2 - j];
            const auto b = static_cast<Eigen::Index>(6 + 3 * j);
            v(b) = o.pi - ss.pi;
            v(b + 1) = o.r - ss.r;
            v(b + 2) = o.x - ss.x;
        }
        return v;
    };
    auto advance = [&](const Eigen::VectorXd& v) {
        auto hist = unpack(v);
        const double rate = taylor(hist.back(), rule, p);
        ModelState n = detail::var_step(hist, rate, {}, p, var);
        hist.erase(hist.begin());
        hist.push_back(n);
        return pack(hist);
    };

    const Eigen::VectorXd base = advance(Eigen::VectorXd::Zero(dim));
    Eigen::MatrixXd J(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e(i) = 1.0;
        J.col(i) = advance(e) - base;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(J, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline void require_stable(const ModelParams& p, const VarExpectations& var) {
    const double rho = closed_loop_radius(p, var);
    if (!(rho < 1.0)) {
        throw NumericalError("unstable parameter set: closed-loop spectral radius " + std::to_string(rho) + " >= 1");
    }
}

/// Deterministic trajectory under VAR expectations. Row t is the quarter
/// start + t; its rate is set from information through row t - 1.
inline Trajectory simulate(const ModelState& initial, const ModelParams& p, const VarExpectations& var,
                           const PolicyFn& policy, const std::vector<Shock>& shocks, Period start,
                           std::size_t horizon, const SimulationOptions& opt = {}) {
    if (horizon < 1) throw ValidationError("simulate: horizon must be at least 1");
    p.validate();
    opt.threshold.validate();
    initial.validate();
    if (var.order() < 1) throw ValidationError("simulate: VAR expectations need at least one lag");
    if (std::abs(initial.epop - epop_identity(initial.lfpr, initial.u)) > 1e-9) {
        throw ValidationError("initial state violates epop = lfpr (1 - u/100)");
    }
    for (const auto& s : shocks) s.validate();
    if (opt.check_stability) require_stable(p, var);

    Trajectory tr;
    tr.start = start;
    std::vector<ModelState> hist(var.order(), initial);
    ThresholdState ts;
    for (std::size_t t = 0; t < horizon; ++t) {
        const Period per = start + static_cast<long>(t);
        const ModelState& prev = hist.back();
        const auto f4 = detail::forecast(hist, var, p, 4);
        const double projected = prev.ptr + f4[3](0);
        if (opt.threshold.active) {
            double measure = 0.0;
            switch (opt.threshold.side) {
                case ThresholdSide::Pce: measure = projected; break;
                case ThresholdSide::Eci: measure = prev.wage; break;
                case ThresholdSide::EpopFloor: measure = prev.epop; break;
                case ThresholdSide::None: break;
            }
            ts = update_thresholds(ts, {prev.u, measure}, opt.threshold);
        }
        const PolicyContext ctx{t, per, prev, hist, ts, projected, p};
        const double rule = policy(ctx);
        if (!std::isfinite(rule)) throw NumericalError("policy returned a non-finite rate at " + per.to_string());
        const ShockInputs sh = shocks_at(shocks, per);
        double rate = opt.enforce_elb ? effective_rate(rule, ts, opt.threshold, opt.elb)
                                      : (opt.threshold.active && ts.dmptr == 0 ? opt.elb : rule);
        rate += sh.ffr_bps / 100.0;
        if (opt.enforce_elb) rate = std::max(rate, opt.elb);

        ModelState n = detail::var_step(hist, rate, sh, p, var);
        tr.states.push_back(n);
        tr.thresholds.push_back(ts);
        tr.rule_rates.push_back(rule);
        tr.projected_pce.push_back(projected);
        hist.erase(hist.begin());
        hist.push_back(n);
    }
    return tr;
}

namespace detail {

/// Forward pass with a given expected-inflation path; the long yield is
/// filled in afterwards from the realized rates.
inline std::vector<ModelState> pf_pass(const ModelState& initial, const ModelParams& p, std::span<const double> rates,
                                       std::span<const ShockInputs> sh, std::span<const double> expected) {
    std::vector<ModelState> out;
    out.reserve(rates.size());
    ModelState s = initial;
    for (std::size_t t = 0; t < rates.size(); ++t) {
        StepExpectations e;
        e.pi = expected[t];
        s = step(s, rates[t], sh[t], p, e);
        out.push_back(s);
    }
    return out;
}

}  // namespace detail

/// Perfect-foresight trajectory for a given rate path: agents expect the
/// realized inflation of the following quarter, with the final quarter's
/// expectation anchored at ptr. The expectations path solves a linear
/// system because the model is affine in it for a fixed rate path.
inline Trajectory simulate_perfect_foresight(const ModelState& initial, const ModelParams& p,
                                             std::span<const double> rate_path, const std::vector<Shock>& shocks,
                                             Period start, const SimulationOptions& opt = {},
                                             const VarExpectations* stability_var = nullptr) {
    const std::size_t T = rate_path.size();
    if (T < 1) throw ValidationError("simulate_perfect_foresight: empty rate path");
    p.validate();
    initial.validate();
    for (const auto& s : shocks) s.validate();
    if (opt.check_stability && stability_var) require_stable(p, *stability_var);

    std::vector<ShockInputs> sh(T);
    std::vector<double> rates(T);
    for (std::size_t t = 0; t < T; ++t) {
        sh[t] = shocks_at(shocks, start + static_cast<long>(t));
        if (!std::isfinite(rate_path[t])) throw NumericalError("non-finite rate in the policy path");
        double r = rate_path[t] + sh[t].ffr_bps / 100.0;
        if (opt.enforce_elb) r = std::max(r, opt.elb);
        rates[t] = r;
    }

    const auto Ti = static_cast<Eigen::Index>(T);
    std::vector<double> zero(T, 0.0);
    const auto base = detail::pf_pass(initial, p, rates, sh, zero);
    Eigen::VectorXd b(Ti);
    for (Eigen::Index t = 0; t < Ti; ++t) b(t) = base[static_cast<std::size_t>(t)].pi;
    Eigen::MatrixXd A(Ti, Ti);
    for (Eigen::Index s = 0; s < Ti; ++s) {
        std::vector<double> e(T, 0.0);
        e[static_cast<std::size_t>(s)] = 1.0;
        const auto run = detail::pf_pass(initial, p, rates, sh, e);
        for (Eigen::Index t = 0; t < Ti; ++t) A(t, s) = run[static_cast<std::size_t>(t)].pi - b(t);
    }
    // E_t = pi_{t+1} for t < T-1 and E_{T-1} = ptr_{T-1}.
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(Ti, Ti);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Ti);
    for (Eigen::Index t = 0; t + 1 < Ti; ++t) {
        M.row(t) -= A.row(t + 1);
        rhs(t) = b(t + 1);
    }
    rhs(Ti - 1) = base.back().ptr;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw NumericalError("perfect-foresight expectations system is singular");
    const Eigen::VectorXd E = lu.solve(rhs);
    std::vector<double> expected(E.data(), E.data() + Ti);

    Trajectory tr;
    tr.start = start;
    tr.states = detail::pf_pass(initial, p, rates, sh, expected);
    for (std::size_t t = 0; t < T; ++t) {
        tr.states[t].rg10 = long_yield(std::span<const double>(rates).subspan(t), p.term_premium);
        tr.thresholds.emplace_back();
        tr.rule_rates.push_back(rate_path[t]);
        tr.projected_pce.push_back(t + 1 < T ? tr.states[t + 1].pi : tr.states[t].ptr);
    }
    return tr;
}

}  // namespace fgsim
