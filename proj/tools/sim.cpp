#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fgsim/calibration.hpp"
#include "fgsim/scenario.hpp"
#include "fgsim/series.hpp"
#include "fgsim/stats/descriptive.hpp"
#include "fgsim/stats/johansen.hpp"
#include "fgsim/stats/regression.hpp"
#include "fgsim/stats/unit_root.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

std::string data_file(const char* name) { return std::string(FGSIM_DATA_DIR) + "/" + name; }

fgsim::TimeSeries column(const std::string& path, const std::string& date_column, const std::string& name) {
    return fgsim::find_series(fgsim::load_csv(path, date_column), name);
}

fgsim::TimeSeries window(const fgsim::TimeSeries& s, const std::string& from, const std::string& to) {
    const auto lo = from.empty() ? s.start() : fgsim::Period::parse(from, s.freq());
    const auto hi = to.empty() ? s.end() : fgsim::Period::parse(to, s.freq());
    return s.slice(lo, hi);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

json regression_json(const fgsim::stats::RegressionResult& r) {
    json j;
    for (std::size_t i = 0; i < r.coefficients.size(); ++i) {
        j["coefficients"][r.names.empty() ? std::to_string(i) : r.names[i]] = {
            {"estimate", r.coefficients[i]}, {"std_error", r.std_errors[i]}, {"t", r.t_stats[i]}, {"p", r.p_values[i]}};
    }
    j["r2"] = r.r2;
    j["adj_r2"] = r.adj_r2;
    j["n_obs"] = r.n_obs;
    j["f_statistic"] = r.f_statistic();
    j["f_pvalue"] = r.f_pvalue();
    return j;
}

json threshold_json(const fgsim::ThresholdEstimate& e) {
    json j{{"method", fgsim::to_string(e.method)},
           {"intercept", e.intercept},
           {"slope", e.slope},
           {"adj_r2", e.regression.adj_r2},
           {"n_obs", e.per_obs_thresholds.size()},
           {"mean", e.mean},
           {"sd", e.sd},
           {"min", e.min},
           {"p25", e.p25},
           {"p50", e.p50},
           {"p75", e.p75},
           {"max", e.max}};
    if (e.point_estimate) j["point_estimate"] = *e.point_estimate;
    return j;
}

void print_table(const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it->is_object()) {
            std::cout << it.key() << ":\n";
            for (auto jt = it->begin(); jt != it->end(); ++jt) std::cout << "  " << jt.key() << " = " << jt->dump() << '\n';
        } else {
            std::cout << it.key() << " = " << it->dump() << '\n';
        }
    }
}

void report(const fgsim::ComparisonResult& c, std::ostream& os) {
    os << fgsim::liftoff_table(c);
    if (c.variants.size() < 2) return;
    os << "peak deviation from " << c.reference().name << '\n';
    for (std::size_t i = 1; i < c.variants.size(); ++i) {
        os << "  " << c.variants[i].name << ':';
        for (std::size_t k = 0; k < fgsim::kReportedVariables.size(); ++k) {
            os << ' ' << fgsim::to_string(fgsim::kReportedVariables[k]) << '=' << std::setprecision(4)
               << c.peak_deviations[i][k];
        }
        os << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward-guidance threshold simulator"};
    app.require_subcommand(1);

    std::string out_dir;
    std::string format = "csv";
    auto add_output = [&](CLI::App* sc, const std::string& default_dir) {
        out_dir = default_dir;
        sc->add_option("--out", out_dir, "output directory");
        sc->add_option("--format", format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
    };

    auto* run = app.add_subcommand("run", "run one scenario file and emit its variants");
    std::string scenario;
    run->add_option("scenario", scenario, "scenario TOML")->required();
    add_output(run, "");

    auto* cmp = app.add_subcommand("compare", "compare scenarios against a base scenario");
    std::vector<std::string> others;
    std::string base;
    cmp->add_option("scenarios", others, "scenario TOMLs")->required();
    cmp->add_option("--base", base, "reference scenario TOML")->required();
    cmp->add_option("--out", out_dir, "output directory");
    cmp->add_option("--format", format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));

    auto* suite = app.add_subcommand("suite", "run every scenario in a manifest");
    std::string manifest;
    suite->add_option("manifest", manifest, "suite manifest TOML")->required();
    suite->add_option("--out", out_dir, "output directory");
    suite->add_option("--format", format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));

    bool as_json = false;
    std::string from;
    std::string to;
    auto* cal = app.add_subcommand("calibrate", "threshold calibration");
    cal->require_subcommand(1);
    auto* cal_epop = cal->add_subcommand("epop", "employment-to-population threshold");
    std::string labor = data_file("labor_monthly.csv");
    std::string method = "difference";
    double unrate_thresh = 6.5;
    cal_epop->add_option("--data", labor, "CSV with date, epop, unrate");
    cal_epop->add_option("--method", method)->check(CLI::IsMember({"difference", "level"}));
    cal_epop->add_option("--unrate-thresh", unrate_thresh);
    auto* cal_wage = cal->add_subcommand("wage", "wage-growth threshold");
    std::string inflation = data_file("inflation_quarterly.csv");
    double pce_thresh = 2.5;
    cal_wage->add_option("--data", inflation, "CSV with date, eciwg_rate, pce_rate");
    cal_wage->add_option("--method", method)->check(CLI::IsMember({"difference", "level"}));
    cal_wage->add_option("--pce-thresh", pce_thresh);
    for (auto* sc : {cal_epop, cal_wage}) {
        sc->add_option("--from", from, "first period");
        sc->add_option("--to", to, "last period");
        sc->add_flag("--json", as_json);
    }

    auto* st = app.add_subcommand("stats", "econometric tests on CSV columns");
    st->require_subcommand(1);
    std::string csv;
    std::string date_column = "date";
    std::vector<std::string> cols;
    bool difference = false;
    auto* adf = st->add_subcommand("adf", "augmented Dickey-Fuller test");
    std::string adf_spec = "constant";
    adf->add_option("--spec", adf_spec)->check(CLI::IsMember({"none", "constant", "trend"}));
    auto* joh = st->add_subcommand("johansen", "Johansen trace test");
    std::size_t lags = 2;
    std::string trend = "linear";
    joh->add_option("--lags", lags);
    joh->add_option("--trend", trend)->check(CLI::IsMember({"none", "constant", "linear", "restricted"}));
    auto* ols = st->add_subcommand("ols", "least squares, first column on the rest");
    auto* dec = st->add_subcommand("decompose", "additive seasonal decomposition");
    std::size_t period = 12;
    dec->add_option("--period", period);
    for (auto* sc : {adf, joh, ols, dec}) {
        sc->add_option("csv", csv, "input CSV")->required();
        sc->add_option("--columns", cols, "column names")->required()->delimiter(',');
        sc->add_option("--date-column", date_column);
        sc->add_option("--from", from, "first period");
        sc->add_option("--to", to, "last period");
        sc->add_flag("--json", as_json);
    }
    for (auto* sc : {adf, ols}) sc->add_flag("--diff", difference, "first-difference the columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        const auto fmt = fgsim::parse_output_format(format);
        if (*run) {
            const auto set = fgsim::load_scenarios(scenario);
            const auto result = fgsim::run_set(set);
            const fs::path dir = out_dir.empty() ? fs::path("out") / set.name : fs::path(out_dir);
            fgsim::emit(result, fmt, dir, set.title);
            report(result, std::cout);
        } else if (*cmp) {
            std::vector<fgsim::ScenarioSpec> specs;
            others.insert(others.begin(), base);
            for (const auto& path : others) {
                auto set = fgsim::load_scenarios(path);
                // variants of different files may share names; qualify them by scenario
                const bool several = set.variants.size() > 1;
                for (auto& s : set.variants) {
                    s.name = several ? set.name + ":" + s.name : set.name;
                    specs.push_back(std::move(s));
                }
            }
            const auto result = fgsim::compare(specs);
            fgsim::emit(result, fmt, out_dir.empty() ? fs::path("out") / "compare" : fs::path(out_dir));
            report(result, std::cout);
        } else if (*suite) {
            const auto results = fgsim::run_suite(fgsim::load_manifest(manifest));
            fgsim::write_suite(results, out_dir.empty() ? fs::path("out") : fs::path(out_dir), fmt);
            for (const auto& e : results) {
                std::cout << "== " << e.name << '\n';
                report(e.result, std::cout);
            }
        } else if (*cal_epop) {
            const auto epop = window(column(labor, "date", "epop"), from, to);
            const auto unrate = window(column(labor, "date", "unrate"), from, to);
            const auto est = method == "level" ? fgsim::calibrate_epop_threshold_level(epop, unrate, unrate_thresh)
                                               : fgsim::calibrate_epop_threshold(epop, unrate, unrate_thresh);
            as_json ? print(threshold_json(est)) : print_table(threshold_json(est));
        } else if (*cal_wage) {
            const auto eci = window(column(inflation, "date", "eciwg_rate"), from, to);
            const auto pce = window(column(inflation, "date", "pce_rate"), from, to);
            const auto est = fgsim::calibrate_wage_threshold(
                eci, pce, pce_thresh,
                method == "level" ? fgsim::ThresholdMethod::LevelRegression
                                  : fgsim::ThresholdMethod::DifferenceRegression);
            as_json ? print(threshold_json(est)) : print_table(threshold_json(est));
        } else {
            const auto all = fgsim::load_csv(csv, date_column);
            std::vector<fgsim::TimeSeries> series;
            for (const auto& c : cols) {
                auto s = window(fgsim::find_series(all, c), from, to);
                series.push_back(difference ? fgsim::diff(s).renamed("d_" + c) : s);
            }
            json j;
            if (*adf) {
                fgsim::stats::AdfOptions opt;
                opt.spec = adf_spec == "none"       ? fgsim::stats::AdfSpec::None
                           : adf_spec == "constant" ? fgsim::stats::AdfSpec::Constant
                                                    : fgsim::stats::AdfSpec::ConstantTrend;
                for (const auto& s : series) {
                    const auto r = fgsim::stats::adf_test(s, opt);
                    j[s.name()] = {{"statistic", r.statistic}, {"p_value", r.p_value}, {"lags", r.lags},
                                   {"n_obs", r.n_obs},         {"reject_at_5pct", r.reject_at_5pct}};
                }
            } else if (*joh) {
                const auto t = trend == "none"       ? fgsim::stats::JohansenTrend::None
                               : trend == "constant" ? fgsim::stats::JohansenTrend::Constant
                               : trend == "restricted" ? fgsim::stats::JohansenTrend::RestrictedConstant
                                                     : fgsim::stats::JohansenTrend::LinearTrend;
                const auto r = fgsim::stats::johansen_test(fgsim::align(series), lags, t);
                j = {{"eigenvalues", r.eigenvalues},         {"trace_stats", r.trace_stats},
                     {"crit_5pct_trace", r.crit_5pct_trace}, {"max_eigen_stats", r.max_eigen_stats},
                     {"crit_5pct_maxeig", r.crit_5pct_maxeig}, {"rank", r.inferred_rank},
                     {"n_obs", r.n_obs}};
            } else if (*ols) {
                if (series.size() < 2) throw fgsim::ValidationError("ols needs a response and at least one regressor");
                const auto aligned = fgsim::align(series);
                std::vector<fgsim::TimeSeries> rhs(aligned.columns().begin() + 1, aligned.columns().end());
                j = regression_json(fgsim::stats::ols(aligned.column(0), fgsim::Panel(rhs), true));
            } else {
                const auto r = fgsim::stats::additive_decompose(series.front(), period);
                const auto s = r.seasonal.observed();
                j = {{"period", r.period}, {"seasonal", std::vector<double>(s.begin(), s.begin() + static_cast<long>(period))}};
                if (as_json) {
                    j["trend"] = json::array();
                    for (std::size_t i = 0; i < r.trend.size(); ++i) {
                        const auto v = r.trend.at(i);
                        j["trend"].push_back(v ? json(*v) : json(nullptr));
                    }
                }
            }
            as_json ? print(j) : print_table(j);
        }
    } catch (const fgsim::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const fgsim::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const fgsim::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}
