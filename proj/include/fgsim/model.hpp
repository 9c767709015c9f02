#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fgsim/error.hpp"
#include "fgsim/series.hpp"
#include "fgsim/stats/regression.hpp"

namespace fgsim {

enum class FiscalRule { None, SurplusStabilizing, DebtStabilizing };

inline std::string_view to_string(FiscalRule f) noexcept {
    switch (f) {
        case FiscalRule::None: return "none";
        case FiscalRule::SurplusStabilizing: return "surplus_stabilizing";
        case FiscalRule::DebtStabilizing: return "debt_stabilizing";
    }
    return "?";
}

/// Calibration of the reduced model. Rates and gaps are in percent.
struct ModelParams {
    double sigma = 0.1;    ///< demand response to the real-rate gap
    double rho_x = 0.85;   ///< output-gap persistence
    double kappa = 0.03;   ///< price Phillips slope
    double lambda = 0.7;   ///< inflation indexation
    double mu = 0.8;       ///< wage stickiness
    double phi = 0.05;     ///< wage Phillips slope
    double okun = 0.5;
    double nairu = 4.5;
    double r_star = 1.0;
    double pi_star = 2.0;
    double prod_growth = 1.2;
    double oil_passthrough = 0.02;  ///< pp of inflation per $/bbl
    double term_premium = 1.0;
    double lfpr_trend = 81.6;
    double potential_growth = 2.0;
    double lfpr_unrate = 0.5;        ///< pp of unemployment per pp of participation shift
    double gov_multiplier = 1.0;
    double fiscal_drag = 0.05;
    FiscalRule fiscal = FiscalRule::None;

    void validate() const {
        auto unit = [](double v, const char* name) {
            if (!(v >= 0.0 && v < 1.0)) throw ValidationError(std::string("model parameter ") + name + " must lie in [0, 1)");
        };
        auto nonneg = [](double v, const char* name) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string("model parameter ") + name + " must be nonnegative");
        };
        unit(rho_x, "rho_x");
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("model parameter lambda must lie in [0, 1]");
        if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("model parameter mu must lie in [0, 1]");
        nonneg(sigma, "sigma");
        nonneg(kappa, "kappa");
        nonneg(phi, "phi");
        nonneg(oil_passthrough, "oil_passthrough");
        nonneg(lfpr_unrate, "lfpr_unrate");
        nonneg(gov_multiplier, "gov_multiplier");
        nonneg(fiscal_drag, "fiscal_drag");
        if (!(okun > 0.0)) throw ValidationError("model parameter okun must be positive");
        if (!(lfpr_trend > 0.0 && lfpr_trend <= 100.0)) throw ValidationError("lfpr_trend must lie in (0, 100]");
        for (double v : {nairu, r_star, pi_star, prod_growth, term_premium, potential_growth}) {
            if (!std::isfinite(v)) throw ValidationError("model parameters must be finite");
        }
    }
};

/// One quarter of the economy.
struct ModelState {
    double x = 0.0;        ///< output gap
    double pi = 2.0;       ///< headline inflation
    double pi_core = 2.0;  ///< core inflation
    double wage = 3.2;     ///< wage growth
    double u = 4.5;        ///< unemployment rate
    double lfpr = 81.6;
    double epop = 81.6 * (1.0 - 0.045);
    double r = 3.0;        ///< policy rate
    double rg10 = 4.0;     ///< 10-year yield
    double rgdp_growth = 2.0;
    double ptr = 2.0;      ///< long-run expected inflation
    double fiscal = 0.0;   ///< fiscal impulse on the gap

    bool operator==(const ModelState&) const = default;

    void validate() const {
        for (double v : {x, pi, pi_core, wage, u, lfpr, epop, r, rg10, rgdp_growth, ptr, fiscal}) {
            if (!std::isfinite(v)) throw NumericalError("model state has a non-finite entry");
        }
        if (u < 0.0) throw NumericalError("unemployment rate went negative");
        if (!(lfpr > 0.0 && lfpr <= 100.0)) throw NumericalError("participation rate left (0, 100]");
    }
};

inline double epop_identity(double lfpr, double u) { return lfpr * (1.0 - u / 100.0); }

/// The resting point of the model at its own parameters.
inline ModelState steady_state(const ModelParams& p) {
    ModelState s;
    s.x = 0.0;
    s.pi = s.pi_core = s.ptr = p.pi_star;
    s.wage = p.pi_star + p.prod_growth;
    s.u = p.nairu;
    s.lfpr = p.lfpr_trend;
    s.epop = epop_identity(s.lfpr, s.u);
    s.r = p.r_star + p.pi_star;
    s.rg10 = s.r + p.term_premium;
    s.rgdp_growth = p.potential_growth;
    s.fiscal = 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// Shocks

struct AggregateDemand {
    std::vector<double> path;  ///< gap residual per quarter, percent of GDP
};
struct Oil {
    double dollars = 20.0;  ///< per barrel
};
struct LfprShift {
    double pp = -2.0;
};
struct PtrDrift {
    double pp = 0.25;  ///< added to long-run expectations each active quarter
};
struct FfrSurprise {
    double bps = 50.0;
};
struct GovSpending {
    double pct_gdp = 1.0;
};

using ShockKind = std::variant<AggregateDemand, Oil, LfprShift, PtrDrift, FfrSurprise, GovSpending>;

struct Shock {
    ShockKind kind;
    Period start;
    std::size_t duration = 1;

    bool active(Period p) const { return p >= start && p - start < static_cast<long>(duration); }

    void validate() const {
        if (duration < 1) throw ValidationError("shock duration must be at least one quarter");
        if (const auto* ad = std::get_if<AggregateDemand>(&kind)) {
            if (ad->path.size() != duration) throw ValidationError("demand shock path length must equal its duration");
        }
    }
};

/// The default demand residuals, percent of GDP.
inline AggregateDemand default_ad_path() { return AggregateDemand{{-1.5, -2.0, -1.5, -1.0, -0.5, -0.25}}; }

/// Sum of every shock active in one quarter.
struct ShockInputs {
    double demand = 0.0;
    double oil = 0.0;
    double lfpr_shift = 0.0;
    double ptr_drift = 0.0;
    double ffr_bps = 0.0;
    double gov = 0.0;
};

inline ShockInputs shocks_at(const std::vector<Shock>& shocks, Period p) {
    ShockInputs in;
    for (const auto& s : shocks) {
        if (!s.active(p)) continue;
        const auto k = static_cast<std::size_t>(p - s.start);
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, AggregateDemand>) in.demand += v.path[k];
                if constexpr (std::is_same_v<T, Oil>) in.oil += v.dollars;
                if constexpr (std::is_same_v<T, LfprShift>) in.lfpr_shift += v.pp;
                if constexpr (std::is_same_v<T, PtrDrift>) in.ptr_drift += v.pp;
                if constexpr (std::is_same_v<T, FfrSurprise>) in.ffr_bps += v.bps;
                if constexpr (std::is_same_v<T, GovSpending>) in.gov += v.pct_gdp;
            },
            s.kind);
    }
    return in;
}

// ---------------------------------------------------------------------------
// VAR expectations

using Vec3 = Eigen::Vector3d;

/// Linear forecasting system z_t = sum_i B_i z_{t-i} over (inflation,
/// policy rate, output gap). The model feeds it deviations from the
/// expectations anchor.
struct VarExpectations {
    std::vector<Eigen::Matrix3d> coeffs;  ///< coeffs[i] multiplies z_{t-1-i}

    std::size_t order() const noexcept { return coeffs.size(); }

    Eigen::MatrixXd companion() const {
        const auto p = static_cast<Eigen::Index>(order());
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3 * p, 3 * p);
        for (Eigen::Index i = 0; i < p; ++i) c.block(0, 3 * i, 3, 3) = coeffs[static_cast<std::size_t>(i)];
        if (p > 1) c.block(3, 0, 3 * (p - 1), 3 * (p - 1)).setIdentity();
        return c;
    }

    double spectral_radius() const {
        if (coeffs.empty()) return 0.0;
        Eigen::EigenSolver<Eigen::MatrixXd> es(companion(), false);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

    static VarExpectations zeros(std::size_t lags) {
        return VarExpectations{std::vector<Eigen::Matrix3d>(lags, Eigen::Matrix3d::Zero())};
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["variables"] = {"pce_rate", "ffr", "output_gap"};
        j["lags"] = order();
        j["coeffs"] = nlohmann::json::array();
        for (const auto& b : coeffs) {
            nlohmann::json m = nlohmann::json::array();
            for (int r = 0; r < 3; ++r) m.push_back({b(r, 0), b(r, 1), b(r, 2)});
            j["coeffs"].push_back(m);
        }
        return j;
    }

    static VarExpectations from_json(const nlohmann::json& j) {
        VarExpectations e;
        try {
            for (const auto& m : j.at("coeffs")) {
                Eigen::Matrix3d b;
                for (int r = 0; r < 3; ++r) {
                    for (int c = 0; c < 3; ++c) b(r, c) = m.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
                }
                e.coeffs.push_back(b);
            }
        } catch (const nlohmann::json::exception& ex) {
            throw ValidationError(std::string("malformed VAR coefficients: ") + ex.what());
        }
        if (e.coeffs.empty()) throw ValidationError("VAR coefficients need at least one lag");
        return e;
    }

    static VarExpectations load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& ex) {
            throw ValidationError(path + ": " + ex.what());
        }
        return from_json(j);
    }
};

/// Equation-by-equation OLS fit of a VAR(p) with intercepts on the
/// complete rows of a three-column panel; the intercepts are dropped.
inline VarExpectations fit_var(const Panel& data, std::size_t lags) {
    if (data.cols() != 3) throw ValidationError("fit_var: need exactly three columns");
    if (lags < 1) throw ValidationError("fit_var: need at least one lag");
    const auto rows = data.complete_rows();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i] != rows[i - 1] + 1) throw ValidationError("fit_var: data have interior gaps");
    }
    if (rows.size() <= lags + 3 * lags + 1) throw ValidationError("fit_var: too few observations");
    const auto n = static_cast<Eigen::Index>(rows.size() - lags);
    const auto k = static_cast<Eigen::Index>(1 + 3 * lags);
    Eigen::MatrixXd X(n, k);
    Eigen::MatrixXd Y(n, 3);
    auto val = [&](std::size_t row, std::size_t col) { return data.column(col).value(rows[row]); };
    for (Eigen::Index t = 0; t < n; ++t) {
        const auto row = static_cast<std::size_t>(t) + lags;
        X(t, 0) = 1.0;
        for (std::size_t l = 1; l <= lags; ++l) {
            for (std::size_t c = 0; c < 3; ++c) X(t, static_cast<Eigen::Index>(1 + 3 * (l - 1) + c)) = val(row - l, c);
        }
        for (std::size_t c = 0; c < 3; ++c) Y(t, static_cast<Eigen::Index>(c)) = val(row, c);
    }
    VarExpectations e = VarExpectations::zeros(lags);
    for (Eigen::Index eq = 0; eq < 3; ++eq) {
        const auto fit = stats::ols(Y.col(eq), X, true);
        for (std::size_t l = 0; l < lags; ++l) {
            for (std::size_t c = 0; c < 3; ++c) {
                e.coeffs[l](eq, static_cast<Eigen::Index>(c)) = fit.coefficients[1 + 3 * l + c];
            }
        }
    }
    return e;
}

/// Iterated forecast. `history` is oldest first and must hold at least
/// order() observations; the result holds horizon steps ahead.
inline std::vector<Vec3> var_expect(std::span<const Vec3> history, const VarExpectations& e, std::size_t horizon) {
    const std::size_t p = e.order();
    if (history.size() < p) {
        throw ValidationError("var_expect: need " + std::to_string(p) + " observations of history, got " +
                              std::to_string(history.size()));
    }
    std::vector<Vec3> window(history.end() - static_cast<long>(p), history.end());
    std::vector<Vec3> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        Vec3 next = Vec3::Zero();
        for (std::size_t i = 0; i < p; ++i) next += e.coeffs[i] * window[window.size() - 1 - i];
        out.push_back(next);
        if (p > 0) {
            window.erase(window.begin());
            window.push_back(next);
        }
    }
    return out;
}

/// Deviations of (inflation, policy rate, gap) from the expectations
/// anchor (ptr, r_star + ptr, 0).
inline Vec3 var_deviation(const ModelState& s, const ModelParams& p) {
    return Vec3(s.pi - s.ptr, s.r - (p.r_star + s.ptr), s.x);
}

// ---------------------------------------------------------------------------
// One-quarter transition

constexpr std::size_t kLongYieldQuarters = 40;

/// Expectations-hypothesis yield: mean of the first 40 expected short
/// rates, the last one repeated when fewer are given, plus the premium.
inline double long_yield(std::span<const double> expected_rates, double term_premium) {
    if (expected_rates.empty()) throw ValidationError("long_yield: empty expected rate path");
    double acc = 0.0;
    for (std::size_t i = 0; i < kLongYieldQuarters; ++i) {
        acc += expected_rates[std::min(i, expected_rates.size() - 1)];
    }
    return acc / static_cast<double>(kLongYieldQuarters) + term_premium;
}

/// What agents expect when the quarter is formed.
struct StepExpectations {
    double pi = 2.0;                  ///< inflation expected for the following quarter
    std::vector<double> rate_path;    ///< short rates from the new quarter on
};

inline double next_ptr(const ModelState& s, const ShockInputs& sh) { return s.ptr + sh.ptr_drift; }

inline ModelState step(const ModelState& s, double r_next, const ShockInputs& sh, const ModelParams& p,
                       const StepExpectations& e) {
    if (!std::isfinite(r_next)) throw NumericalError("step: non-finite policy rate");
    ModelState n;
    n.ptr = next_ptr(s, sh);
    switch (p.fiscal) {
        case FiscalRule::None: n.fiscal = 0.0; break;
        case FiscalRule::SurplusStabilizing: n.fiscal = p.fiscal_drag * s.x; break;
        case FiscalRule::DebtStabilizing: n.fiscal = 0.5 * s.fiscal + 0.5 * p.fiscal_drag * s.x; break;
    }
    n.x = p.rho_x * s.x - p.sigma * (r_next - s.pi - p.r_star) + sh.demand + p.gov_multiplier * sh.gov + n.fiscal;
    n.pi = p.lambda * s.pi + (1.0 - p.lambda) * e.pi + p.kappa * n.x + p.oil_passthrough * sh.oil;
    n.pi_core = p.lambda * s.pi_core + (1.0 - p.lambda) * e.pi + p.kappa * n.x;
    n.lfpr = p.lfpr_trend + sh.lfpr_shift;
    n.u = p.nairu - p.okun * n.x + p.lfpr_unrate * sh.lfpr_shift;
    n.wage = p.mu * s.wage + (1.0 - p.mu) * (n.pi + p.prod_growth) - p.phi * (n.u - p.nairu);
    n.epop = epop_identity(n.lfpr, n.u);
    n.r = r_next;
    n.rgdp_growth = p.potential_growth + (n.x - s.x);
    if (e.rate_path.empty()) {
        const double flat[] = {r_next};
        n.rg10 = long_yield(flat, p.term_premium);
    } else {
        n.rg10 = long_yield(e.rate_path, p.term_premium);
    }
    n.validate();
    return n;
}

}  // namespace fgsim
