#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fgsim/policy.hpp"
#include "fgsim/simulate.hpp"

namespace fgsim {

struct OcWeights {
    double w_pi = 1.0;
    double w_u = 1.0;
    double w_r = 10.0;
    double discount = 0.99;
    double pi_target = 2.0;
    std::optional<double> u_target;  ///< the model's nairu when unset

    static OcWeights of(double w_pi, double w_u, double w_r) {
        OcWeights w;
        w.w_pi = w_pi;
        w.w_u = w_u;
        w.w_r = w_r;
        return w;
    }
    static OcWeights balanced() { return of(1.0, 1.0, 10.0); }
    static OcWeights inflation_heavy() { return of(10.0, 5.0, 5.0); }

    void validate() const {
        if (!(w_pi >= 0.0 && w_u >= 0.0 && w_r >= 0.0)) throw ValidationError("loss weights must be nonnegative");
        if (!(w_pi > 0.0 || w_u > 0.0 || w_r > 0.0)) throw ValidationError("at least one loss weight must be positive");
        if (!(discount > 0.0 && discount <= 1.0)) throw ValidationError("loss discount must lie in (0, 1]");
    }
};

/// sum_t discount^t (w_pi (pi_t - target)^2 + w_u (u_t - u*)^2 + w_r (r_t - r_{t-1})^2),
/// with r_{-1} the supplied initial rate.
inline double oc_loss(std::span<const ModelState> traj, double initial_rate, const OcWeights& w, double u_star) {
    if (traj.empty()) throw ValidationError("oc_loss: empty trajectory");
    double loss = 0.0;
    double disc = 1.0;
    double prev = initial_rate;
    for (const auto& s : traj) {
        const double dpi = s.pi - w.pi_target;
        const double du = s.u - u_star;
        const double dr = s.r - prev;
        loss += disc * (w.w_pi * dpi * dpi + w.w_u * du * du + w.w_r * dr * dr);
        disc *= w.discount;
        prev = s.r;
    }
    return loss;
}

/// A rate-path choice problem under perfect foresight.
struct OcProblem {
    ModelState initial;
    ModelParams params;
    std::vector<Shock> shocks;
    Period start;
    std::size_t horizon = 4;
    OcWeights weights;
    double elb = 0.125;

    double u_star() const { return weights.u_target.value_or(params.nairu); }

    void validate() const {
        if (horizon < 1) throw ValidationError("optimal control horizon must be at least 1");
        weights.validate();
        params.validate();
        if (!(elb >= 0.0)) throw ValidationError("effective lower bound must be nonnegative");
    }
};

/// Perfect-foresight trajectory for a rate path.
inline Trajectory oc_trajectory(const OcProblem& pb, std::span<const double> rates) {
    SimulationOptions opt;
    opt.elb = pb.elb;
    opt.check_stability = false;
    return simulate_perfect_foresight(pb.initial, pb.params, rates, pb.shocks, pb.start, opt);
}

/// Loss of a rate path by direct simulation.
inline double oc_path_loss(const OcProblem& pb, std::span<const double> rates) {
    const auto tr = oc_trajectory(pb, rates);
    return oc_loss(tr.states, pb.initial.r, pb.weights, pb.u_star());
}

struct OcOptions {
    std::size_t max_iterations = 10000;
    double tolerance = 1e-8;
    std::optional<std::vector<double>> grid;  ///< restrict rates to these values
};

struct OcResult {
    std::vector<double> rates;
    double loss = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
};

class OcNotConvergedError : public NumericalError {
public:
    OcNotConvergedError(const std::string& what, OcResult best) : NumericalError(what), best_(std::move(best)) {}
    const OcResult& best() const noexcept { return best_; }

private:
    OcResult best_;
};

namespace detail {

/// Loss written as the squared norm of an affine residual e0 + J (r - r0).
/// Exact while every rate stays at or above the bound, because the
/// perfect-foresight model is affine in the rate path.
struct QuadraticLoss {
    Eigen::VectorXd r0;
    Eigen::VectorXd e0;
    Eigen::MatrixXd J;
    Eigen::MatrixXd H;  ///< J'J
    Eigen::VectorXd g;  ///< J'e0

    double value(const Eigen::VectorXd& r) const { return (e0 + J * (r - r0)).squaredNorm(); }
};

inline Eigen::VectorXd weighted_residual(const OcProblem& pb, const Eigen::VectorXd& r) {
    const auto T = r.size();
    const std::vector<double> rates(r.data(), r.data() + T);
    const auto tr = oc_trajectory(pb, rates);
    Eigen::VectorXd e(3 * T);
    double disc = 1.0;
    double prev = pb.initial.r;
    const auto& w = pb.weights;
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto& s = tr.states[static_cast<std::size_t>(t)];
        const double sd = std::sqrt(disc);
        e(3 * t) = sd * std::sqrt(w.w_pi) * (s.pi - w.pi_target);
        e(3 * t + 1) = sd * std::sqrt(w.w_u) * (s.u - pb.u_star());
        e(3 * t + 2) = sd * std::sqrt(w.w_r) * (s.r - prev);
        disc *= w.discount;
        prev = s.r;
    }
    return e;
}

inline QuadraticLoss build_quadratic(const OcProblem& pb) {
    const auto T = static_cast<Eigen::Index>(pb.horizon);
    QuadraticLoss q;
    q.r0 = Eigen::VectorXd::Constant(T, std::max(pb.elb, pb.params.r_star + pb.params.pi_star));
    q.e0 = weighted_residual(pb, q.r0);
    q.J.resize(3 * T, T);
    for (Eigen::Index i = 0; i < T; ++i) {
        Eigen::VectorXd r = q.r0;
        r(i) += 1.0;
        q.J.col(i) = weighted_residual(pb, r) - q.e0;
    }
    q.H = q.J.transpose() * q.J;
    q.g = q.J.transpose() * q.e0;
    return q;
}

/// Rule-of-thumb path: the standard Taylor rule with expectations
/// anchored at ptr, floored at the bound.
inline std::vector<double> taylor_start(const OcProblem& pb) {
    std::vector<double> out;
    ModelState s = pb.initial;
    for (std::size_t t = 0; t < pb.horizon; ++t) {
        const double r = std::max(taylor(s, RuleParams{}, pb.params), pb.elb);
        StepExpectations e;
        e.pi = s.ptr;
        s = step(s, r, shocks_at(pb.shocks, pb.start + static_cast<long>(t)), pb.params, e);
        out.push_back(r);
    }
    return out;
}

inline std::vector<Eigen::VectorXd> starts(const OcProblem& pb) {
    const auto T = static_cast<Eigen::Index>(pb.horizon);
    const double neutral = std::max(pb.elb, pb.params.r_star + pb.params.pi_star);
    const auto tay = taylor_start(pb);
    std::vector<Eigen::VectorXd> s;
    s.push_back(Eigen::VectorXd::Constant(T, pb.elb));
    s.push_back(Eigen::Map<const Eigen::VectorXd>(tay.data(), T));
    s.push_back(Eigen::VectorXd::Constant(T, neutral));
    Eigen::VectorXd up(T);
    Eigen::VectorXd wave(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        up(t) = neutral + 2.0 * static_cast<double>(t + 1) / static_cast<double>(T) - 1.0;
        wave(t) = neutral + 1.5 * std::sin(static_cast<double>(t + 1));
    }
    s.push_back(up);
    s.push_back(wave);
    return s;
}

/// Exact coordinate minimization of the quadratic, with an exterior
/// penalty on bound violations until the iterate is feasible, then
/// projection onto r >= elb.
inline OcResult coordinate_descent(const QuadraticLoss& q, Eigen::VectorXd r, double elb, const OcOptions& opt) {
    const auto T = r.size();
    Eigen::VectorXd grad = q.g + q.H * (r - q.r0);  // half-gradient of the quadratic
    double penalty = 10.0;
    bool projected = false;
    double prev_loss = std::numeric_limits<double>::infinity();
    OcResult res;
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        for (Eigen::Index i = 0; i < T; ++i) {
            const double h = q.H(i, i);
            if (!(h > 0.0)) continue;
            double target = r(i) - grad(i) / h;
            if (projected) {
                target = std::max(target, elb);
            } else if (target < elb) {
                // Minimize h/2 (v - t)^2 + penalty/2 (elb - v)^2 over v < elb.
                target = (h * target + penalty * elb) / (h + penalty);
            }
            const double delta = target - r(i);
            if (delta != 0.0) {
                r(i) = target;
                grad += q.H.col(i) * delta;
            }
        }
        if (!projected) {
            penalty *= 10.0;
            if (r.minCoeff() >= elb || penalty > 1e8) {
                r = r.cwiseMax(elb);
                grad = q.g + q.H * (r - q.r0);
                projected = true;
            }
            continue;
        }
        const double loss = q.value(r);
        res.iterations = it;
        if (std::abs(prev_loss - loss) <= opt.tolerance) {
            res.converged = true;
            res.rates.assign(r.data(), r.data() + T);
            res.loss = loss;
            return res;
        }
        prev_loss = loss;
    }
    res.converged = false;
    res.iterations = opt.max_iterations;
    res.rates.assign(r.data(), r.data() + T);
    res.loss = q.value(r);
    return res;
}

inline std::size_t nearest_index(const std::vector<double>& grid, double v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (std::abs(grid[k] - v) < std::abs(grid[best] - v)) best = k;
    }
    return best;
}

inline bool better(double a, const std::vector<double>& pa, double b, const std::vector<double>& pb) {
    const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    if (a < b - tol) return true;
    if (a > b + tol) return false;
    return pa < pb;
}

/// Local search on the grid: single, pairwise and segment-shift moves until
/// no move lowers the quadratic loss.
inline std::vector<double> grid_search(const QuadraticLoss& q, const std::vector<double>& grid,
                                       std::vector<std::size_t> idx, std::size_t max_iter) {
    const auto T = static_cast<Eigen::Index>(idx.size());
    auto to_vec = [&](const std::vector<std::size_t>& ix) {
        Eigen::VectorXd r(T);
        for (Eigen::Index t = 0; t < T; ++t) r(t) = grid[ix[static_cast<std::size_t>(t)]];
        return r;
    };
    auto path = [&](const std::vector<std::size_t>& ix) {
        std::vector<double> p;
        for (auto k : ix) p.push_back(grid[k]);
        return p;
    };
    double best = q.value(to_vec(idx));
    for (std::size_t it = 0; it < max_iter; ++it) {
        bool improved = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t k = 0; k < grid.size(); ++k) {
                auto cand = idx;
                cand[i] = k;
                const double v = q.value(to_vec(cand));
                if (better(v, path(cand), best, path(idx))) {
                    idx = cand;
                    best = v;
                    improved = true;
                }
            }
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                for (std::size_t a = 0; a < grid.size(); ++a) {
                    for (std::size_t b = 0; b < grid.size(); ++b) {
                        auto cand = idx;
                        cand[i] = a;
                        cand[j] = b;
                        const double v = q.value(to_vec(cand));
                        if (better(v, path(cand), best, path(idx))) {
                            idx = cand;
                            best = v;
                            improved = true;
                        }
                    }
                }
            }
        }
        // Smoothing weights couple neighbours, so also shift whole segments.
        const auto n = static_cast<long>(grid.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                for (long d = -n + 1; d < n; ++d) {
                    if (d == 0) continue;
                    auto cand = idx;
                    bool ok = true;
                    for (std::size_t t = i; t <= j && ok; ++t) {
                        const long k = static_cast<long>(cand[t]) + d;
                        ok = k >= 0 && k < n;
                        if (ok) cand[t] = static_cast<std::size_t>(k);
                    }
                    if (!ok) continue;
                    const double v = q.value(to_vec(cand));
                    if (better(v, path(cand), best, path(idx))) {
                        idx = cand;
                        best = v;
                        improved = true;
                    }
                }
            }
        }
        if (!improved) break;
    }
    return path(idx);
}

inline std::vector<double> checked_grid(const std::optional<std::vector<double>>& g, double elb) {
    std::vector<double> grid = *g;
    if (grid.empty()) throw ValidationError("rate grid is empty");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() < elb) throw ValidationError("rate grid has points below the effective lower bound");
    return grid;
}

}  // namespace detail

/// Rate path minimizing the loss subject to r_t >= elb. Multi-start
/// coordinate descent on the exact quadratic form of the loss; the
/// reported loss comes from direct simulation of the chosen path.
inline OcResult solve_oc(const OcProblem& pb, const OcOptions& opt = {}) {
    pb.validate();
    const auto q = detail::build_quadratic(pb);
    std::optional<std::vector<double>> grid;
    if (opt.grid) grid = detail::checked_grid(opt.grid, pb.elb);

    std::optional<OcResult> best;
    std::optional<OcResult> unconverged;
    for (const auto& s0 : detail::starts(pb)) {
        OcResult r = detail::coordinate_descent(q, s0, pb.elb, opt);
        if (!r.converged) {
            if (!unconverged || r.loss < unconverged->loss) unconverged = r;
            continue;
        }
        if (grid) {
            std::vector<std::size_t> idx;
            for (double v : r.rates) idx.push_back(detail::nearest_index(*grid, v));
            r.rates = detail::grid_search(q, *grid, idx, opt.max_iterations);
            const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(r.rates.data(), static_cast<Eigen::Index>(r.rates.size()));
            r.loss = q.value(v);
        }
        if (!best || detail::better(r.loss, r.rates, best->loss, best->rates)) best = r;
    }
    if (!best) {
        unconverged->loss = oc_path_loss(pb, unconverged->rates);
        throw OcNotConvergedError("optimal control did not converge within " + std::to_string(opt.max_iterations) +
                                      " iterations",
                                  *unconverged);
    }
    best->loss = oc_path_loss(pb, best->rates);
    return *best;
}

/// Exhaustive search over grid^T paths by direct simulation. Ties within
/// a relative 1e-12 go to the lexicographically lowest path.
inline OcResult brute_force_oc(const OcProblem& pb, const std::vector<double>& grid_in) {
    pb.validate();
    const auto grid = detail::checked_grid(grid_in, pb.elb);
    const double space = std::pow(static_cast<double>(grid.size()), static_cast<double>(pb.horizon));
    if (space > 1e7) throw ValidationError("brute_force_oc: search space of " + std::to_string(space) + " paths exceeds 1e7");

    std::vector<std::size_t> idx(pb.horizon, 0);
    std::vector<double> path(pb.horizon);
    OcResult best;
    best.loss = std::numeric_limits<double>::infinity();
    while (true) {
        for (std::size_t t = 0; t < pb.horizon; ++t) path[t] = grid[idx[t]];
        const double loss = oc_path_loss(pb, path);
        if (best.rates.empty() || detail::better(loss, path, best.loss, best.rates)) {
            best.loss = loss;
            best.rates = path;
        }
        ++best.iterations;
        std::size_t pos = pb.horizon;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < grid.size()) break;
            idx[pos] = 0;
            if (pos == 0) return best;
        }
    }
}

}  // namespace fgsim
