#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "fgsim/model.hpp"

namespace fgsim {

enum class RuleKind { Taylor, Inertial, UnempGap, Modified, OptimalControl };

inline std::string_view to_string(RuleKind k) noexcept {
    switch (k) {
        case RuleKind::Taylor: return "taylor";
        case RuleKind::Inertial: return "inertial";
        case RuleKind::UnempGap: return "unemp_gap";
        case RuleKind::Modified: return "modified";
        case RuleKind::OptimalControl: return "optimal_control";
    }
    return "?";
}

inline RuleKind parse_rule_kind(std::string_view s) {
    for (auto k : {RuleKind::Taylor, RuleKind::Inertial, RuleKind::UnempGap, RuleKind::Modified, RuleKind::OptimalControl}) {
        if (to_string(k) == s) return k;
    }
    throw ValidationError("unknown policy '" + std::string(s) + "'");
}

struct RuleParams {
    double a_pi = 0.5;
    double a_y = 0.5;
    double inertia = 0.85;
    double u_gap_coeff = 1.1;      ///< on (unrate - nairu), sign as printed in the source rule
    double u_pi_coeff = 0.375;     ///< extra weight on inflation
    double u_pistar_coeff = 0.5;   ///< weight subtracted on the target
    double elb = 0.125;

    /// The aggressive variant: both gap coefficients raised to 2.
    static RuleParams aggressive() {
        RuleParams r;
        r.a_pi = 2.0;
        r.a_y = 2.0;
        return r;
    }

    void validate() const {
        if (!(inertia >= 0.0 && inertia <= 1.0)) throw ValidationError("rule inertia must lie in [0, 1]");
        if (!(elb >= 0.0) || !std::isfinite(elb)) throw ValidationError("effective lower bound must be nonnegative");
        for (double v : {a_pi, a_y, u_gap_coeff, u_pi_coeff, u_pistar_coeff}) {
            if (!std::isfinite(v)) throw ValidationError("rule coefficients must be finite");
        }
    }
};

/// r* + pi + a_pi (pi - pi*) + a_y x
inline double taylor(const ModelState& s, const RuleParams& rp, const ModelParams& mp) {
    return mp.r_star + s.pi + rp.a_pi * (s.pi - mp.pi_star) + rp.a_y * s.x;
}

inline double inertial_taylor(double prev_r, const ModelState& s, const RuleParams& rp, const ModelParams& mp) {
    if (!std::isfinite(prev_r)) throw ValidationError("inertial_taylor: previous rate is not finite");
    return rp.inertia * prev_r + (1.0 - rp.inertia) * taylor(s, rp, mp);
}

/// r* + pi + c_pi pi - c_target pi* + c_u (u - nairu)
inline double unemp_gap_taylor(const ModelState& s, const RuleParams& rp, const ModelParams& mp) {
    return mp.r_star + s.pi + rp.u_pi_coeff * s.pi - rp.u_pistar_coeff * mp.pi_star + rp.u_gap_coeff * (s.u - mp.nairu);
}

/// Taylor form with the given coefficients, floored at zero.
inline double modified_taylor(const ModelState& s, const RuleParams& rp, const ModelParams& mp) {
    return std::max(taylor(s, rp, mp), 0.0);
}

/// Prescription of a feedback rule. Optimal control has no feedback form.
inline double rule_rate(RuleKind kind, double prev_r, const ModelState& s, const RuleParams& rp, const ModelParams& mp) {
    switch (kind) {
        case RuleKind::Taylor: return taylor(s, rp, mp);
        case RuleKind::Inertial: return inertial_taylor(prev_r, s, rp, mp);
        case RuleKind::UnempGap: return unemp_gap_taylor(s, rp, mp);
        case RuleKind::Modified: return modified_taylor(s, rp, mp);
        case RuleKind::OptimalControl: break;
    }
    throw ValidationError("optimal control is not a feedback rule");
}

// ---------------------------------------------------------------------------
// Threshold-based forward guidance

enum class ThresholdSide { None, Pce, Eci, EpopFloor };

inline std::string_view to_string(ThresholdSide s) noexcept {
    switch (s) {
        case ThresholdSide::None: return "none";
        case ThresholdSide::Pce: return "pce";
        case ThresholdSide::Eci: return "eciwage";
        case ThresholdSide::EpopFloor: return "epop";
    }
    return "?";
}

inline ThresholdSide parse_threshold_side(std::string_view s) {
    for (auto k : {ThresholdSide::None, ThresholdSide::Pce, ThresholdSide::Eci, ThresholdSide::EpopFloor}) {
        if (to_string(k) == s) return k;
    }
    throw ValidationError("unknown threshold side '" + std::string(s) + "'");
}

inline double default_threshold(ThresholdSide s) {
    switch (s) {
        case ThresholdSide::Pce: return 2.5;
        case ThresholdSide::Eci: return 3.5;
        case ThresholdSide::EpopFloor: return 78.55;
        case ThresholdSide::None: return 0.0;
    }
    return 0.0;
}

struct ThresholdConfig {
    double unrate_thresh = 6.5;
    ThresholdSide side = ThresholdSide::Pce;
    double value = 2.5;
    bool active = false;

    void validate() const {
        if (!(unrate_thresh > 0.0) || !std::isfinite(unrate_thresh)) throw ValidationError("unrate threshold must be positive");
        if (side != ThresholdSide::None && (!(value > 0.0) || !std::isfinite(value))) {
            throw ValidationError("threshold value must be positive");
        }
    }
};

struct ThresholdState {
    int dmptunrate = 0;     ///< labor threshold crossed (unrate <= thresh)
    int dmpt_infl = 0;      ///< inflation-side measure strictly above its threshold
    int dmptmax = 0;
    int dmptr = 0;          ///< latched release
    int unrate_above = 0;   ///< 1{unrate > thresh}, the indicator as printed

    bool operator==(const ThresholdState&) const = default;
};

/// Observations the threshold block reads: unemployment plus whichever
/// measure the configured side watches.
struct ThresholdObs {
    double unrate = 0.0;
    double measure = 0.0;
};

inline ThresholdState update_thresholds(const ThresholdState& prev, const ThresholdObs& obs, const ThresholdConfig& cfg) {
    ThresholdState ts;
    ts.unrate_above = obs.unrate > cfg.unrate_thresh ? 1 : 0;
    ts.dmptunrate = 1 - ts.unrate_above;
    ts.dmpt_infl = cfg.side != ThresholdSide::None && obs.measure > cfg.value ? 1 : 0;
    ts.dmptmax = std::max(ts.dmptunrate, ts.dmpt_infl);
    ts.dmptr = std::max(ts.dmptmax, prev.dmptr);
    return ts;
}

/// Held at the bound until release, floored at the bound after.
inline double effective_rate(double rule, const ThresholdState& ts, const ThresholdConfig& cfg, double elb) {
    if (cfg.active && ts.dmptr == 0) return elb;
    return std::max(rule, elb);
}

/// Index of the first rate above the bound.
inline std::optional<std::size_t> liftoff_quarter(std::span<const double> rates, double elb) {
    if (rates.empty()) throw ValidationError("liftoff_quarter: empty trajectory");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] > elb + 1e-9) return i;
    }
    return std::nullopt;
}

}  // namespace fgsim
