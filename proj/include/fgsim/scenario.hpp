#pragma once

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <toml.hpp>

#include "fgsim/model.hpp"
#include "fgsim/optimal_control.hpp"
#include "fgsim/policy.hpp"
#include "fgsim/series.hpp"
#include "fgsim/simulate.hpp"

namespace fgsim {

// ---------------------------------------------------------------------------
// Reported variables

enum class Variable { Ffr, Rgdpch, Unrate, PceRate, Epop, EciwgRate, Rg10, CorepceRate };

inline constexpr std::array<Variable, 8> kReportedVariables{Variable::Ffr,     Variable::Rgdpch,    Variable::Unrate,
                                                            Variable::PceRate, Variable::Epop,      Variable::EciwgRate,
                                                            Variable::Rg10,    Variable::CorepceRate};

inline std::string_view to_string(Variable v) noexcept {
    switch (v) {
        case Variable::Ffr: return "ffr";
        case Variable::Rgdpch: return "rgdpch";
        case Variable::Unrate: return "unrate";
        case Variable::PceRate: return "pce_rate";
        case Variable::Epop: return "epop";
        case Variable::EciwgRate: return "eciwg_rate";
        case Variable::Rg10: return "rg10";
        case Variable::CorepceRate: return "corepce_rate";
    }
    return "?";
}

inline std::string_view panel_title(Variable v) noexcept {
    switch (v) {
        case Variable::Ffr: return "Federal Funds Rate";
        case Variable::Rgdpch: return "Real GDP Growth";
        case Variable::Unrate: return "Unemployment Rate";
        case Variable::PceRate: return "PCE Inflation Rate";
        case Variable::Epop: return "Employment to Population Ratio";
        case Variable::EciwgRate: return "ECI Hourly Compensation Growth";
        case Variable::Rg10: return "10-Year Treasury Rate";
        case Variable::CorepceRate: return "Core PCE Inflation Rate";
    }
    return "?";
}

inline double value_of(const ModelState& s, Variable v) noexcept {
    switch (v) {
        case Variable::Ffr: return s.r;
        case Variable::Rgdpch: return s.rgdp_growth;
        case Variable::Unrate: return s.u;
        case Variable::PceRate: return s.pi;
        case Variable::Epop: return s.epop;
        case Variable::EciwgRate: return s.wage;
        case Variable::Rg10: return s.rg10;
        case Variable::CorepceRate: return s.pi_core;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Scenario definition

struct ScenarioSpec {
    std::string name = "scenario";
    std::string title;
    Period start{Frequency::Quarterly, 2012, 3};
    std::size_t horizon = 22;
    ModelState initial;
    ModelParams params;
    RuleKind policy = RuleKind::Taylor;
    RuleParams rule;
    ThresholdConfig threshold;
    std::vector<Shock> shocks;
    ExpectationsMode expectations = ExpectationsMode::Var;
    OcWeights oc = OcWeights::balanced();
    /// Quarters the optimal path is solved over; the rest holds its last rate.
    std::optional<std::size_t> oc_horizon;
    /// When set, the variant is the stored consensus path, not a model run.
    std::optional<std::string> consensus_file;
    std::string var_file;

    void validate() const {
        if (name.empty()) throw ValidationError("scenario name must not be empty");
        if (start.freq() != Frequency::Quarterly) throw ValidationError(name + ": start must be a quarter");
        if (horizon < 4) throw ValidationError(name + ": horizon must be at least 4 quarters");
        const Period end = start + static_cast<long>(horizon);
        for (const auto& s : shocks) {
            s.validate();
            if (s.start.freq() != Frequency::Quarterly || s.start < start ||
                s.start + static_cast<long>(s.duration) > end) {
                throw ValidationError(name + ": shock at " + s.start.to_string() + " lasting " +
                                      std::to_string(s.duration) + " quarters falls outside [" + start.to_string() +
                                      ", " + end.to_string() + ")");
            }
        }
        if (consensus_file) return;
        params.validate();
        rule.validate();
        threshold.validate();
        initial.validate();
        if (policy == RuleKind::OptimalControl) {
            oc.validate();
            if (expectations != ExpectationsMode::PerfectForesight) {
                throw ValidationError(name + ": optimal control requires perfect_foresight expectations");
            }
            if (threshold.active) throw ValidationError(name + ": thresholds do not apply to optimal control");
            if (oc_horizon && (*oc_horizon < 1 || *oc_horizon > horizon)) {
                throw ValidationError(name + ": oc horizon must lie in [1, " + std::to_string(horizon) + "]");
            }
        } else if (expectations == ExpectationsMode::PerfectForesight) {
            throw ValidationError(name + ": perfect_foresight expectations are only supported for optimal control");
        }
    }
};

/// A scenario file: the base table plus any variants merged over it.
struct ScenarioSet {
    std::string name;
    std::string title;
    std::vector<ScenarioSpec> variants;
};

namespace detail {

inline std::string default_var_file() {
#ifdef FGSIM_DATA_DIR
    return std::string(FGSIM_DATA_DIR) + "/var_expectations.json";
#else
    return "data/var_expectations.json";
#endif
}

inline void merge_tables(toml::table& dst, const toml::table& src) {
    for (auto&& [k, v] : src) {
        if (v.is_table()) {
            if (auto* d = dst.get_as<toml::table>(k)) {
                merge_tables(*d, *v.as_table());
                continue;
            }
        }
        dst.insert_or_assign(k, v);
    }
}

/// Reader that rejects keys it was never asked about.
class Reader {
public:
    Reader(const toml::table& t, std::string where) : t_(t), where_(std::move(where)) {}

    bool has(std::string_view key) {
        seen_.insert(std::string(key));
        return t_.contains(key);
    }

    double number(std::string_view key, double fallback) {
        if (!has(key)) return fallback;
        const auto v = t_[key].value<double>();
        if (!v) fail(key, "a number");
        return *v;
    }

    std::optional<double> number(std::string_view key) {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    std::string string(std::string_view key, std::string fallback) {
        if (!has(key)) return fallback;
        const auto v = t_[key].value<std::string>();
        if (!v) fail(key, "a string");
        return *v;
    }

    bool boolean(std::string_view key, bool fallback) {
        if (!has(key)) return fallback;
        const auto v = t_[key].value<bool>();
        if (!v) fail(key, "a boolean");
        return *v;
    }

    std::size_t count(std::string_view key, std::size_t fallback) {
        if (!has(key)) return fallback;
        const auto v = t_[key].value<std::int64_t>();
        if (!v || *v < 0) fail(key, "a nonnegative integer");
        return static_cast<std::size_t>(*v);
    }

    std::vector<double> numbers(std::string_view key) {
        seen_.insert(std::string(key));
        const auto* a = t_[key].as_array();
        if (!a) fail(key, "an array of numbers");
        std::vector<double> out;
        for (const auto& n : *a) {
            const auto v = n.value<double>();
            if (!v) fail(key, "an array of numbers");
            out.push_back(*v);
        }
        return out;
    }

    const toml::table* table(std::string_view key) {
        if (!has(key)) return nullptr;
        const auto* t = t_[key].as_table();
        if (!t) fail(key, "a table");
        return t;
    }

    const toml::array* array(std::string_view key) {
        if (!has(key)) return nullptr;
        const auto* a = t_[key].as_array();
        if (!a) fail(key, "an array");
        return a;
    }

    void finish() const {
        for (auto&& [k, v] : t_) {
            if (!seen_.count(std::string(k.str()))) {
                throw ValidationError(where_ + ": unknown key '" + std::string(k.str()) + "'");
            }
        }
    }

private:
    [[noreturn]] void fail(std::string_view key, std::string_view what) const {
        throw ValidationError(where_ + ": '" + std::string(key) + "' must be " + std::string(what));
    }

    const toml::table& t_;
    std::string where_;
    std::set<std::string> seen_;
};

inline Period parse_quarter(const std::string& text, const std::string& where) {
    const Period p = Period::parse(text, Frequency::Quarterly);
    if (p.freq() != Frequency::Quarterly) throw ValidationError(where + ": '" + text + "' is not a quarter");
    return p;
}

inline std::string resolve(const std::string& file, const std::filesystem::path& base_dir) {
    const std::filesystem::path p(file);
    return (p.is_absolute() ? p : base_dir / p).lexically_normal().string();
}

inline ModelParams read_params(const toml::table* t, ModelParams p, const std::string& where) {
    if (!t) return p;
    Reader r(*t, where + " [params]");
    p.sigma = r.number("sigma", p.sigma);
    p.rho_x = r.number("rho_x", p.rho_x);
    p.kappa = r.number("kappa", p.kappa);
    p.lambda = r.number("lambda", p.lambda);
    p.mu = r.number("mu", p.mu);
    p.phi = r.number("phi", p.phi);
    p.okun = r.number("okun", p.okun);
    p.nairu = r.number("nairu", p.nairu);
    p.r_star = r.number("r_star", p.r_star);
    p.pi_star = r.number("pi_star", p.pi_star);
    p.prod_growth = r.number("prod_growth", p.prod_growth);
    p.oil_passthrough = r.number("oil_passthrough", p.oil_passthrough);
    p.term_premium = r.number("term_premium", p.term_premium);
    p.lfpr_trend = r.number("lfpr_trend", p.lfpr_trend);
    p.potential_growth = r.number("potential_growth", p.potential_growth);
    p.lfpr_unrate = r.number("lfpr_unrate", p.lfpr_unrate);
    p.gov_multiplier = r.number("gov_multiplier", p.gov_multiplier);
    p.fiscal_drag = r.number("fiscal_drag", p.fiscal_drag);
    r.finish();
    return p;
}

inline RuleParams read_rule(const toml::table* t, const std::string& where) {
    RuleParams rp;
    if (!t) return rp;
    Reader r(*t, where + " [rule]");
    if (r.boolean("aggressive", false)) rp = RuleParams::aggressive();
    rp.a_pi = r.number("a_pi", rp.a_pi);
    rp.a_y = r.number("a_y", rp.a_y);
    rp.inertia = r.number("inertia", rp.inertia);
    rp.u_gap_coeff = r.number("u_gap_coeff", rp.u_gap_coeff);
    rp.u_pi_coeff = r.number("u_pi_coeff", rp.u_pi_coeff);
    rp.u_pistar_coeff = r.number("u_pistar_coeff", rp.u_pistar_coeff);
    rp.elb = r.number("elb", rp.elb);
    r.finish();
    return rp;
}

/// Unspecified entries come from the steady state; an omitted output gap
/// is backed out of unemployment through Okun's law, and epop always
/// follows the identity.
inline ModelState read_initial(const toml::table* t, const ModelParams& p, const std::string& where) {
    ModelState s = steady_state(p);
    if (!t) return s;
    Reader r(*t, where + " [initial]");
    s.u = r.number("u", s.u);
    s.pi = r.number("pi", s.pi);
    s.pi_core = r.number("pi_core", s.pi_core);
    s.wage = r.number("wage", s.wage);
    s.r = r.number("r", s.r);
    s.lfpr = r.number("lfpr", s.lfpr);
    s.ptr = r.number("ptr", s.ptr);
    s.fiscal = r.number("fiscal", s.fiscal);
    s.x = r.number("x").value_or(-(s.u - p.nairu) / p.okun);
    const double flat[] = {s.r};
    s.rg10 = r.number("rg10").value_or(long_yield(flat, p.term_premium));
    s.rgdp_growth = r.number("rgdp_growth", p.potential_growth);
    if (r.has("epop")) throw ValidationError(where + " [initial]: epop is derived from lfpr and u");
    r.finish();
    s.epop = epop_identity(s.lfpr, s.u);
    return s;
}

inline ThresholdConfig read_threshold(const toml::table* t, const std::string& where) {
    ThresholdConfig c;
    if (!t) return c;
    Reader r(*t, where + " [threshold]");
    c.active = r.boolean("active", true);
    c.side = parse_threshold_side(r.string("side", std::string(to_string(c.side))));
    c.value = r.number("value", default_threshold(c.side));
    c.unrate_thresh = r.number("unrate_thresh", c.unrate_thresh);
    r.finish();
    return c;
}

inline OcWeights read_oc(const toml::table* t, std::optional<std::size_t>& horizon, const std::string& where) {
    OcWeights w = OcWeights::balanced();
    if (!t) return w;
    Reader r(*t, where + " [oc]");
    if (r.has("horizon")) horizon = r.count("horizon", 0);
    const auto preset = r.string("preset", "balanced");
    if (preset == "inflation_heavy") {
        w = OcWeights::inflation_heavy();
    } else if (preset != "balanced") {
        throw ValidationError(where + " [oc]: unknown preset '" + preset + "'");
    }
    if (r.has("weights")) {
        const auto ws = r.numbers("weights");
        if (ws.size() != 3) throw ValidationError(where + " [oc]: weights must be [w_pi, w_u, w_r]");
        w.w_pi = ws[0];
        w.w_u = ws[1];
        w.w_r = ws[2];
    }
    w.w_pi = r.number("w_pi", w.w_pi);
    w.w_u = r.number("w_u", w.w_u);
    w.w_r = r.number("w_r", w.w_r);
    w.discount = r.number("discount", w.discount);
    w.pi_target = r.number("pi_target", w.pi_target);
    if (auto u = r.number("u_target")) w.u_target = *u;
    r.finish();
    return w;
}

inline Shock read_shock(const toml::table& t, const std::string& where) {
    Reader r(t, where);
    const auto kind = r.string("kind", "");
    Shock s;
    s.start = parse_quarter(r.string("start", ""), where);
    s.duration = r.count("duration", 1);
    if (kind == "aggregate_demand") {
        AggregateDemand ad = r.has("path") ? AggregateDemand{r.numbers("path")} : default_ad_path();
        if (!r.has("duration")) s.duration = ad.path.size();
        s.kind = std::move(ad);
    } else if (kind == "oil") {
        s.kind = Oil{r.number("dollars", Oil{}.dollars)};
    } else if (kind == "lfpr_shift") {
        s.kind = LfprShift{r.number("pp", LfprShift{}.pp)};
    } else if (kind == "ptr_drift") {
        s.kind = PtrDrift{r.number("pp", PtrDrift{}.pp)};
    } else if (kind == "ffr_surprise") {
        s.kind = FfrSurprise{r.number("bps", FfrSurprise{}.bps)};
    } else if (kind == "gov_spending") {
        s.kind = GovSpending{r.number("pct_gdp", GovSpending{}.pct_gdp)};
    } else {
        throw ValidationError(where + ": unknown shock kind '" + kind + "'");
    }
    r.finish();
    s.validate();
    return s;
}

inline FiscalRule parse_fiscal(const std::string& s, const std::string& where) {
    for (auto f : {FiscalRule::None, FiscalRule::SurplusStabilizing, FiscalRule::DebtStabilizing}) {
        if (to_string(f) == s) return f;
    }
    throw ValidationError(where + ": unknown fiscal rule '" + s + "'");
}

inline ScenarioSpec read_spec(const toml::table& t, const std::filesystem::path& base_dir, const std::string& where) {
    Reader r(t, where);
    ScenarioSpec s;
    s.name = r.string("name", s.name);
    s.title = r.string("title", "");
    s.start = parse_quarter(r.string("start", s.start.to_string()), where);
    s.horizon = r.count("horizon", s.horizon);
    const auto expectations = r.string("expectations", "var");
    if (expectations == "var") {
        s.expectations = ExpectationsMode::Var;
    } else if (expectations == "perfect_foresight") {
        s.expectations = ExpectationsMode::PerfectForesight;
    } else {
        throw ValidationError(where + ": unknown expectations mode '" + expectations + "'");
    }
    s.params = read_params(r.table("params"), ModelParams{}, where);
    s.params.fiscal = parse_fiscal(r.string("fiscal", "none"), where);
    const auto policy = r.string("policy", "taylor");
    const auto baseline = r.string("baseline", "");
    if (policy == "consensus") {
        if (baseline.empty()) throw ValidationError(where + ": consensus policy needs a 'baseline' file");
        s.consensus_file = resolve(baseline, base_dir);
    } else {
        s.policy = parse_rule_kind(policy);
    }
    s.rule = read_rule(r.table("rule"), where);
    s.initial = read_initial(r.table("initial"), s.params, where);
    s.threshold = read_threshold(r.table("threshold"), where);
    s.oc = read_oc(r.table("oc"), s.oc_horizon, where);
    if (const auto* shocks = r.array("shocks")) {
        std::size_t i = 0;
        for (const auto& n : *shocks) {
            const auto* st = n.as_table();
            const auto w = where + " shock " + std::to_string(++i);
            if (!st) throw ValidationError(w + ": must be a table");
            s.shocks.push_back(read_shock(*st, w));
        }
    }
    const auto var_file = r.string("var_file", "");
    s.var_file = var_file.empty() ? default_var_file() : resolve(var_file, base_dir);
    r.finish();
    s.validate();
    return s;
}

}  // namespace detail

/// Parses a scenario document. Each [[variants]] entry is deep-merged over
/// the base table: nested tables merge key by key, anything else (arrays
/// included) replaces. Without variants the base is the only variant.
inline ScenarioSet parse_scenarios(std::string_view text, const std::filesystem::path& base_dir = ".",
                                   const std::string& source = "<string>") {
    toml::table doc;
    try {
        doc = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ":" << e.source().begin.line << ": " << e.description();
        throw ValidationError(os.str());
    }
    toml::table base = doc;
    base.erase("variants");
    ScenarioSet set;
    set.name = base["name"].value_or(std::string("scenario"));
    set.title = base["title"].value_or(std::string());
    const auto* variants = doc["variants"].as_array();
    if (doc.contains("variants") && !variants) throw ValidationError(source + ": 'variants' must be an array of tables");
    if (!variants || variants->empty()) {
        set.variants.push_back(detail::read_spec(base, base_dir, source));
        return set;
    }
    std::set<std::string> names;
    for (const auto& v : *variants) {
        const auto* vt = v.as_table();
        if (!vt) throw ValidationError(source + ": every variant must be a table");
        const auto vname = (*vt)["name"].value<std::string>();
        if (!vname || vname->empty()) throw ValidationError(source + ": every variant needs a name");
        if (!names.insert(*vname).second) throw ValidationError(source + ": duplicate variant '" + *vname + "'");
        toml::table merged = base;
        detail::merge_tables(merged, *vt);
        set.variants.push_back(detail::read_spec(merged, base_dir, source + " variant '" + *vname + "'"));
    }
    return set;
}

inline ScenarioSet load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenarios(buf.str(), std::filesystem::path(path).parent_path(), path);
}

// ---------------------------------------------------------------------------
// Execution

struct ScenarioRun {
    std::string name;
    Trajectory trajectory;
    std::optional<std::size_t> liftoff;  ///< index into the trajectory
    double elb = 0.125;
    bool consensus = false;
};

/// Consensus path from a fixture with one column per reported variable,
/// restricted to the scenario window.
inline Trajectory load_consensus(const std::string& path, const ScenarioSpec& spec) {
    const auto cols = load_csv(path, "period", Frequency::Quarterly);
    std::array<const TimeSeries*, 8> src{};
    for (std::size_t i = 0; i < kReportedVariables.size(); ++i) {
        src[i] = &find_series(cols, to_string(kReportedVariables[i]));
    }
    Trajectory tr;
    tr.start = spec.start;
    for (std::size_t t = 0; t < spec.horizon; ++t) {
        const Period per = spec.start + static_cast<long>(t);
        std::array<double, 8> v{};
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto x = src[i]->at(per);
            if (!x) throw ValidationError(path + ": no " + src[i]->name() + " value for " + per.to_string());
            v[i] = *x;
        }
        ModelState s;
        s.r = v[0];
        s.rgdp_growth = v[1];
        s.u = v[2];
        s.pi = v[3];
        s.epop = v[4];
        s.wage = v[5];
        s.rg10 = v[6];
        s.pi_core = v[7];
        s.lfpr = s.epop / (1.0 - s.u / 100.0);
        s.x = -(s.u - spec.params.nairu) / spec.params.okun;
        s.ptr = spec.params.pi_star;
        tr.states.push_back(s);
        tr.thresholds.emplace_back();
        tr.rule_rates.push_back(s.r);
        tr.projected_pce.push_back(s.pi);
    }
    return tr;
}

inline OcProblem oc_problem(const ScenarioSpec& spec) {
    OcProblem pb;
    pb.initial = spec.initial;
    pb.params = spec.params;
    pb.shocks = spec.shocks;
    pb.start = spec.start;
    pb.horizon = spec.oc_horizon.value_or(spec.horizon);
    pb.weights = spec.oc;
    pb.elb = spec.rule.elb;
    return pb;
}

inline ScenarioRun run_scenario(const ScenarioSpec& spec, const VarExpectations* var = nullptr) {
    spec.validate();
    ScenarioRun run;
    run.name = spec.name;
    run.elb = spec.rule.elb;
    if (spec.consensus_file) {
        run.consensus = true;
        run.trajectory = load_consensus(*spec.consensus_file, spec);
    } else if (spec.policy == RuleKind::OptimalControl) {
        const auto pb = oc_problem(spec);
        auto rates = solve_oc(pb).rates;
        rates.resize(spec.horizon, rates.back());
        run.trajectory = oc_trajectory(pb, rates);
    } else {
        std::optional<VarExpectations> loaded;
        if (!var) var = &loaded.emplace(VarExpectations::load(spec.var_file));
        SimulationOptions opt;
        opt.threshold = spec.threshold;
        opt.elb = spec.rule.elb;
        run.trajectory = simulate(spec.initial, spec.params, *var, rule_policy(spec.policy, spec.rule), spec.shocks,
                                  spec.start, spec.horizon, opt);
    }
    const auto rates = run.trajectory.rates();
    run.liftoff = liftoff_quarter(rates, run.elb);
    return run;
}

// ---------------------------------------------------------------------------
// Comparison

struct ComparisonResult {
    Period start;
    std::size_t horizon = 0;
    std::vector<ScenarioRun> variants;  ///< the first is the reference
    std::vector<std::optional<Period>> liftoff;
    /// Per variant, max |variant - reference| for each reported variable.
    std::vector<std::array<double, 8>> peak_deviations;

    const ScenarioRun& reference() const { return variants.front(); }
};

namespace detail {

inline ComparisonResult assemble(std::vector<ScenarioRun> runs) {
    if (runs.empty()) throw ValidationError("nothing to compare");
    ComparisonResult c;
    c.start = runs.front().trajectory.start;
    c.horizon = runs.front().trajectory.size();
    std::set<std::string> names;
    for (const auto& r : runs) {
        if (r.trajectory.start != c.start || r.trajectory.size() != c.horizon) {
            throw ValidationError("variant '" + r.name + "' covers " + r.trajectory.start.to_string() + " + " +
                                  std::to_string(r.trajectory.size()) + " quarters, expected " + c.start.to_string() +
                                  " + " + std::to_string(c.horizon));
        }
        if (!names.insert(r.name).second) throw ValidationError("duplicate variant name '" + r.name + "'");
    }
    const auto& ref = runs.front().trajectory.states;
    for (const auto& r : runs) {
        c.liftoff.push_back(r.liftoff ? std::optional<Period>(c.start + static_cast<long>(*r.liftoff)) : std::nullopt);
        std::array<double, 8> peak{};
        for (std::size_t t = 0; t < c.horizon; ++t) {
            for (std::size_t i = 0; i < kReportedVariables.size(); ++i) {
                const auto v = kReportedVariables[i];
                peak[i] = std::max(peak[i], std::abs(value_of(r.trajectory.states[t], v) - value_of(ref[t], v)));
            }
        }
        c.peak_deviations.push_back(peak);
    }
    c.variants = std::move(runs);
    return c;
}

}  // namespace detail

/// Aligns at least two runs against the first one.
inline ComparisonResult compare(std::vector<ScenarioRun> runs) {
    if (runs.size() < 2) throw ValidationError("compare needs at least two variants");
    return detail::assemble(std::move(runs));
}

inline ComparisonResult compare(const std::vector<ScenarioSpec>& specs, const VarExpectations* var = nullptr) {
    if (specs.size() < 2) throw ValidationError("compare needs at least two variants");
    for (const auto& s : specs) {
        if (s.horizon != specs.front().horizon || s.start != specs.front().start) {
            throw ValidationError("variant '" + s.name + "' does not share the window of '" + specs.front().name + "'");
        }
    }
    std::vector<ScenarioRun> runs;
    for (const auto& s : specs) runs.push_back(run_scenario(s, var));
    return compare(std::move(runs));
}

/// Every variant of a scenario set; a single variant is reported alone.
inline ComparisonResult run_set(const ScenarioSet& set) {
    std::vector<ScenarioRun> runs;
    for (const auto& s : set.variants) runs.push_back(run_scenario(s));
    return detail::assemble(std::move(runs));
}

// ---------------------------------------------------------------------------
// Output

enum class OutputFormat { Csv, Svg, Both };

inline OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "svg") return OutputFormat::Svg;
    if (s == "both") return OutputFormat::Both;
    throw ValidationError("unknown output format '" + std::string(s) + "'");
}

/// One series per variant for a reported variable.
inline std::vector<TimeSeries> variable_series(const ComparisonResult& c, Variable v) {
    std::vector<TimeSeries> out;
    for (const auto& r : c.variants) {
        std::vector<double> xs;
        for (const auto& s : r.trajectory.states) xs.push_back(value_of(s, v));
        out.emplace_back(r.name, c.start, std::move(xs));
    }
    return out;
}

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : std::string()));
    }
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace detail

/// One file per reported variable, columns period then variant names.
inline std::vector<std::filesystem::path> emit_csv(const ComparisonResult& c, const std::filesystem::path& dir) {
    detail::ensure_dir(dir);
    std::vector<std::filesystem::path> files;
    for (auto v : kReportedVariables) {
        const auto path = dir / (std::string(to_string(v)) + ".csv");
        write_csv(path.string(), variable_series(c, v), "period");
        files.push_back(path);
    }
    return files;
}

/// Small-multiples grid, four rows by two columns, one line per variant.
inline std::string render_svg(const ComparisonResult& c, std::string_view title = {}) {
    static constexpr const char* kColors[] = {"#222222", "#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
    constexpr double pw = 420, ph = 220, pad = 40, top = 70;
    const double width = 2 * pw + 3 * pad;
    const double height = top + 4 * (ph + pad) + pad;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(width) << "\" height=\""
       << detail::fmt(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        os << "<text x=\"" << detail::fmt(pad) << "\" y=\"24\" font-size=\"15\">" << detail::xml_escape(title)
           << "</text>\n";
    }
    double lx = pad;
    for (std::size_t k = 0; k < c.variants.size(); ++k) {
        const auto* col = kColors[k % std::size(kColors)];
        os << "<line x1=\"" << detail::fmt(lx) << "\" y1=\"46\" x2=\"" << detail::fmt(lx + 20)
           << "\" y2=\"46\" stroke=\"" << col << "\" stroke-width=\"2\"/>";
        os << "<text x=\"" << detail::fmt(lx + 25) << "\" y=\"50\">" << detail::xml_escape(c.variants[k].name)
           << "</text>\n";
        lx += 30 + 7.0 * static_cast<double>(c.variants[k].name.size()) + 20;
    }
    for (std::size_t i = 0; i < kReportedVariables.size(); ++i) {
        const auto v = kReportedVariables[i];
        const double x0 = pad + static_cast<double>(i % 2) * (pw + pad);
        const double y0 = top + static_cast<double>(i / 2) * (ph + pad);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& r : c.variants) {
            for (const auto& s : r.trajectory.states) {
                lo = std::min(lo, value_of(s, v));
                hi = std::max(hi, value_of(s, v));
            }
        }
        if (hi - lo < 1e-6) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double iy = y0 + 18;  // plot area below the panel title
        const double ih = ph - 36;
        auto sx = [&](std::size_t t) {
            return c.horizon > 1 ? x0 + pw * static_cast<double>(t) / static_cast<double>(c.horizon - 1) : x0;
        };
        auto sy = [&](double val) { return iy + ih * (hi - val) / (hi - lo); };
        os << "<g>\n<text x=\"" << detail::fmt(x0) << "\" y=\"" << detail::fmt(y0 + 10) << "\" font-weight=\"bold\">"
           << detail::xml_escape(panel_title(v)) << "</text>\n";
        os << "<rect x=\"" << detail::fmt(x0) << "\" y=\"" << detail::fmt(iy) << "\" width=\"" << detail::fmt(pw)
           << "\" height=\"" << detail::fmt(ih) << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
        os << "<text x=\"" << detail::fmt(x0 + pw + 3) << "\" y=\"" << detail::fmt(iy + 8) << "\">" << detail::fmt(hi)
           << "</text><text x=\"" << detail::fmt(x0 + pw + 3) << "\" y=\"" << detail::fmt(iy + ih) << "\">"
           << detail::fmt(lo) << "</text>\n";
        os << "<text x=\"" << detail::fmt(x0) << "\" y=\"" << detail::fmt(iy + ih + 14) << "\">"
           << c.start.to_string() << "</text><text x=\"" << detail::fmt(x0 + pw - 40) << "\" y=\""
           << detail::fmt(iy + ih + 14) << "\">" << (c.start + static_cast<long>(c.horizon) - 1).to_string()
           << "</text>\n";
        for (std::size_t k = 0; k < c.variants.size(); ++k) {
            os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kColors[k % std::size(kColors)]
               << "\" points=\"";
            const auto& st = c.variants[k].trajectory.states;
            for (std::size_t t = 0; t < st.size(); ++t) {
                os << (t ? " " : "") << detail::fmt(sx(t)) << "," << detail::fmt(sy(value_of(st[t], v)));
            }
            os << "\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline std::filesystem::path emit_svg(const ComparisonResult& c, const std::filesystem::path& file,
                                      std::string_view title = {}) {
    if (file.has_parent_path()) detail::ensure_dir(file.parent_path());
    std::ofstream out(file);
    if (!out) throw IoError("cannot write '" + file.string() + "'");
    out << render_svg(c, title);
    if (!out) throw IoError("write to '" + file.string() + "' failed");
    return file;
}

inline std::vector<std::filesystem::path> emit(const ComparisonResult& c, OutputFormat format,
                                               const std::filesystem::path& dir, std::string_view title = {}) {
    std::vector<std::filesystem::path> files;
    if (format != OutputFormat::Svg) files = emit_csv(c, dir);
    if (format != OutputFormat::Csv) {
        detail::ensure_dir(dir);
        files.push_back(emit_svg(c, dir / "figures.svg", title));
    }
    return files;
}

/// Liftoff table: variant, liftoff quarter or "none".
inline std::string liftoff_table(const ComparisonResult& c) {
    std::ostringstream os;
    os << "variant,liftoff\n";
    for (std::size_t i = 0; i < c.variants.size(); ++i) {
        os << c.variants[i].name << ',' << (c.liftoff[i] ? c.liftoff[i]->to_string() : "none") << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Suite

/// Scenario files listed by a manifest's [[scenario]] entries, in order,
/// resolved against the manifest's directory.
inline std::vector<std::string> load_manifest(const std::string& path) {
    toml::table doc;
    try {
        doc = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        if (!std::filesystem::exists(path)) throw IoError("cannot open '" + path + "'");
        std::ostringstream os;
        os << path << ":" << e.source().begin.line << ": " << e.description();
        throw ValidationError(os.str());
    }
    const auto base = std::filesystem::path(path).parent_path();
    const auto* list = doc["scenario"].as_array();
    if (!list || list->empty()) throw ValidationError(path + ": manifest lists no [[scenario]] entries");
    std::vector<std::string> files;
    for (const auto& n : *list) {
        const auto* t = n.as_table();
        const auto file = t ? (*t)["file"].value<std::string>() : std::nullopt;
        if (!file) throw ValidationError(path + ": every [[scenario]] needs a 'file'");
        files.push_back(detail::resolve(*file, base));
    }
    return files;
}

/// Worker cap from SIM_THREADS, else the hardware concurrency.
inline std::size_t thread_cap() {
    if (const char* env = std::getenv("SIM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1) {
            throw ValidationError("SIM_THREADS must be a positive integer, got '" + std::string(env) + "'");
        }
        return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct SuiteEntry {
    std::string name;
    std::string title;
    ComparisonResult result;
};

/// Runs every listed scenario, possibly in parallel. Results keep manifest
/// order; the first failure in that order is rethrown.
inline std::vector<SuiteEntry> run_suite(const std::vector<std::string>& files, std::size_t threads = thread_cap()) {
    const std::size_t n = files.size();
    std::vector<std::optional<SuiteEntry>> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                const auto set = load_scenarios(files[i]);
                out[i] = SuiteEntry{set.name, set.title, run_set(set)};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t k = std::min(std::max<std::size_t>(threads, 1), n);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < k; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    std::set<std::string> names;
    std::vector<SuiteEntry> results;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        if (!names.insert(out[i]->name).second) throw ValidationError("duplicate scenario name '" + out[i]->name + "'");
        results.push_back(std::move(*out[i]));
    }
    return results;
}

/// Single-threaded collector: one directory per scenario plus a liftoff
/// summary at the root.
inline void write_suite(const std::vector<SuiteEntry>& results, const std::filesystem::path& dir, OutputFormat format) {
    detail::ensure_dir(dir);
    std::ostringstream summary;
    summary << "scenario,variant,liftoff\n";
    for (const auto& e : results) {
        emit(e.result, format, dir / e.name, e.title);
        for (std::size_t i = 0; i < e.result.variants.size(); ++i) {
            summary << e.name << ',' << e.result.variants[i].name << ','
                    << (e.result.liftoff[i] ? e.result.liftoff[i]->to_string() : "none") << '\n';
        }
    }
    const auto path = dir / "liftoff.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << summary.str();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace fgsim
