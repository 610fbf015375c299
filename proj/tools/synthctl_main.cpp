// Command-line front end: estimation, placebo inference, hull diagnostics,
// the simulation study, and robustness modes. Results land in files; stdout
// carries a one-line summary per invocation.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthctl/csv.hpp"
#include "synthctl/errors.hpp"
#include "synthctl/estimators.hpp"
#include "synthctl/hull.hpp"
#include "synthctl/inference.hpp"
#include "synthctl/panel.hpp"
#include "synthctl/simulation.hpp"
#include "synthctl/tuning.hpp"

using json = nlohmann::json;
using namespace synthctl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct DataFlags {
    std::string data;
    std::string predictors;
    std::string treated;
    std::string t0;
    bool standardize = false;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
    cmd->add_option("--data", flags.data, "wide outcome CSV (unit,<t1>,...,<tT>)")
        ->required();
    cmd->add_option("--predictors", flags.predictors,
                    "optional predictor CSV (unit,<p1>,...,<pk>)");
    cmd->add_option("--treated", flags.treated, "treated unit id")->required();
    cmd->add_option("--t0", flags.t0,
                    "pretreatment period count, or the label of the first treated period")
        ->required();
    cmd->add_flag("--standardize", flags.standardize,
                  "divide each matching column by its across-unit standard deviation");
}

// An integer that is a valid pretreatment count wins; otherwise the string is
// resolved as a period label.
TreatmentTime parse_t0(const std::string& text, int n_periods) {
    try {
        size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used == text.size() && value >= 1 && value < n_periods) return value;
    } catch (const std::exception&) {
    }
    return text;
}

PanelData load_from_flags(const DataFlags& flags) {
    CsvTable probe = read_unit_table(flags.data);
    const TreatmentTime t0 = parse_t0(flags.t0, static_cast<int>(probe.column_labels.size()));
    std::optional<std::string> preds;
    if (!flags.predictors.empty()) preds = flags.predictors;
    return load_panel(flags.data, preds, flags.treated, t0);
}

struct TuningFlags {
    std::string a_star = "auto";
    std::string b_star = "auto";
    std::string cv = "controls";
    double grid_step = 0.1;
};

void add_tuning_flags(CLI::App* cmd, TuningFlags& flags) {
    cmd->add_option("--a-star", flags.a_star, "L1 tuning in [0,1], or 'auto'");
    cmd->add_option("--b-star", flags.b_star, "L2 tuning in [0,1], or 'auto'");
    cmd->add_option("--cv", flags.cv, "cross-validation scheme: controls|pretreat")
        ->check(CLI::IsMember({"controls", "pretreat"}));
    cmd->add_option("--grid-step", flags.grid_step, "tuning grid step (must divide 1)");
}

CvScheme parse_scheme(const std::string& cv) {
    return cv == "pretreat" ? CvScheme::pretreatment_periods : CvScheme::control_units;
}

double parse_star(const std::string& text, const char* name) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && v >= 0.0 && v <= 1.0) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string(name) + " must be a number in [0,1] or 'auto', got '" +
                          text + "'");
}

struct ResolvedTuning {
    TuningParams params;
    std::optional<CvSurface> surface;
};

ResolvedTuning resolve_tuning(const PanelData& panel, const ColumnSpec& spec,
                              Method method, const TuningFlags& flags,
                              bool standardize) {
    const bool a_auto = flags.a_star == "auto";
    const bool b_auto = flags.b_star == "auto";
    if (a_auto != b_auto)
        throw ValidationError("--a-star and --b-star must both be explicit or both 'auto'");
    if (!a_auto) {
        const double a_star = parse_star(flags.a_star, "--a-star");
        const double b_star = parse_star(flags.b_star, "--b-star");
        if (!method_has_l1(method) && a_star != 0.0)
            throw ValidationError("method osc has no L1 penalty; --a-star must be 0");
        if (!method_has_l2(method) && b_star != 0.0)
            throw ValidationError(std::string("method ") + method_name(method) +
                                  " has no L2 penalty; --b-star must be 0");
        MatchingMatrix m = build_matching(panel, spec, standardize);
        ResolvedTuning out;
        out.params = eigen_scale(m, a_star, b_star);
        out.params.grid_step = flags.grid_step;
        return out;
    }
    ResolvedTuning out;
    auto [tp, surface] = select_tuning(panel, spec, method, parse_scheme(flags.cv),
                                       flags.grid_step, standardize);
    out.params = tp;
    out.surface = surface;
    return out;
}

json tuning_json(const TuningParams& tp, const std::optional<CvSurface>& surface) {
    json eigs = json::array();
    for (Eigen::Index i = 0; i < tp.scaling.gram_eigenvalues.size(); ++i)
        eigs.push_back(tp.scaling.gram_eigenvalues(i));
    json out = {
        {"a_star", tp.a_star},
        {"b_star", tp.b_star},
        {"a", tp.a},
        {"b", tp.b},
        {"scheme", cv_scheme_name(tp.scheme)},
        {"grid_step", tp.grid_step},
        {"eigenvalues", eigs},
        {"n", tp.scaling.n},
        {"shortfall", tp.scaling.shortfall},
        {"a_index", tp.scaling.a_index},
        {"b_index", tp.scaling.b_index},
    };
    if (surface) {
        out["cv_converged"] = surface->converged;
        out["cv_mse"] = surface->best_mse;
        out["cv_rounds"] = surface->rounds;
    }
    return out;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

void write_json(const std::string& path, const json& value) {
    write_text(path, value.dump(2) + "\n");
}

ColumnSpec default_spec(const PanelData& panel) {
    return ColumnSpec::all_pretreatment(panel);
}

std::string plot_csv(const EffectEstimate& e) {
    std::ostringstream out;
    out << "period,treated,synthetic,gap,ci_lo,ci_hi\n";
    for (size_t t = 0; t < e.periods.size(); ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        out << e.periods[t] << ',' << format_double(e.treated(i)) << ','
            << format_double(e.synthetic(i)) << ',' << format_double(e.gap(i)) << ',';
        if (e.has_intervals())
            out << format_double(e.ci_lower(i)) << ',' << format_double(e.ci_upper(i));
        else
            out << ',';
        out << '\n';
    }
    return out.str();
}

int cmd_estimate(const DataFlags& data_flags, const TuningFlags& tuning_flags,
                 const std::string& method_name_str, double level,
                 const std::string& out_prefix) {
    PanelData panel = load_from_flags(data_flags);
    const Method method = method_from_name(method_name_str);
    const ColumnSpec spec = default_spec(panel);
    ResolvedTuning tuning =
        resolve_tuning(panel, spec, method, tuning_flags, data_flags.standardize);

    MatchingMatrix m = build_matching(panel, spec, data_flags.standardize);
    WeightVector wv = fit_weights(panel, m, method, tuning.params);
    EffectEstimate effect = estimate_effect(panel, wv);
    if (panel.n_donors() >= 2) {
        VarianceEstimate var =
            estimate_variance(panel, spec, method, tuning.params, data_flags.standardize);
        effect = confidence_intervals(effect, var, level);
    }

    json weights = json::array();
    const auto donors = panel.donor_indices();
    for (size_t r = 0; r < donors.size(); ++r)
        weights.push_back({{"unit", panel.unit_ids[static_cast<size_t>(donors[r])]},
                           {"weight", wv.w(static_cast<Eigen::Index>(r))}});

    json result = {
        {"command", "estimate"},
        {"method", method_name(method)},
        {"treated", panel.treated_id()},
        {"t0", panel.t0},
        {"periods", panel.time_labels},
        {"weights", weights},
        {"tuning", tuning_json(tuning.params, tuning.surface)},
        {"pre_rmspe", wv.pre_rmspe},
        {"treated_outcome", vector_json(effect.treated)},
        {"synthetic", vector_json(effect.synthetic)},
        {"gap", vector_json(effect.gap)},
    };
    if (effect.has_intervals()) {
        result["variance"] = vector_json(effect.variance);
        result["ci_lower"] = vector_json(effect.ci_lower);
        result["ci_upper"] = vector_json(effect.ci_upper);
        result["ci_level"] = effect.ci_level;
    }
    write_json(out_prefix + ".json", result);
    write_text(out_prefix + ".csv", plot_csv(effect));

    std::printf("estimate method=%s treated=%s t0=%d a*=%g b*=%g pre_rmspe=%g out=%s.{json,csv}\n",
                method_name(method), panel.treated_id().c_str(), panel.t0,
                tuning.params.a_star, tuning.params.b_star, wv.pre_rmspe,
                out_prefix.c_str());
    return kExitOk;
}

int cmd_placebo(const DataFlags& data_flags, const TuningFlags& tuning_flags,
                const std::string& method_name_str, const std::string& policy_str,
                const std::string& out_prefix) {
    PanelData panel = load_from_flags(data_flags);
    const Method method = method_from_name(method_name_str);
    const ColumnSpec spec = default_spec(panel);
    const TuningPolicy policy =
        policy_str == "reselect" ? TuningPolicy::reselect : TuningPolicy::reuse;

    std::optional<TuningParams> reuse;
    std::optional<CvSurface> surface;
    if (policy == TuningPolicy::reuse) {
        ResolvedTuning tuning =
            resolve_tuning(panel, spec, method, tuning_flags, data_flags.standardize);
        reuse = tuning.params;
        surface = tuning.surface;
    }
    PermutationResult res =
        permutation_test(panel, spec, method, policy, reuse, parse_scheme(tuning_flags.cv),
                         tuning_flags.grid_step, data_flags.standardize);

    std::ostringstream table;
    table << "unit,pre_rmspe,post_rmspe,ratio\n";
    for (const auto& rec : res.records) {
        table << rec.unit << ',';
        if (rec.failed) {
            table << ",,\n";
            continue;
        }
        table << format_double(rec.pre_rmspe) << ',' << format_double(rec.post_rmspe) << ','
              << (std::isinf(rec.ratio) ? "inf" : format_double(rec.ratio)) << '\n';
    }
    write_text(out_prefix + ".csv", table.str());

    json result = {
        {"command", "placebo"},
        {"method", method_name(method)},
        {"treated", panel.treated_id()},
        {"t0", panel.t0},
        {"tuning_policy", policy == TuningPolicy::reuse ? "reuse" : "reselect"},
        {"n_units", panel.n_units()},
        {"n_ranked", res.n_ranked},
        {"treated_rank", res.treated_rank},
        {"p_value", res.p_value},
        {"warnings", res.warnings},
    };
    if (reuse) result["tuning"] = tuning_json(*reuse, surface);
    write_json(out_prefix + ".json", result);

    std::printf("placebo treated=%s p=%g rank=%d/%d out=%s.{json,csv}\n",
                panel.treated_id().c_str(), res.p_value, res.treated_rank, res.n_ranked,
                out_prefix.c_str());
    return kExitOk;
}

int cmd_hull(const DataFlags& data_flags, bool experiment, int samples, int max_controls,
             const std::string& t0_list_str, std::uint64_t seed, double tol,
             const std::string& out_prefix) {
    if (experiment) {
        HullExperimentConfig config;
        config.n_samples = samples;
        config.max_controls = max_controls;
        config.seed = seed;
        config.tol = tol;
        config.t0_list.clear();
        std::stringstream ss(t0_list_str);
        std::string token;
        while (std::getline(ss, token, ',')) {
            try {
                config.t0_list.push_back(std::stoi(token));
            } catch (const std::exception&) {
                throw ValidationError("invalid --t0-list entry '" + token + "'");
            }
        }
        auto rows = hull_sample_experiment(config);
        write_text(out_prefix + ".csv", hull_experiment_csv(rows));
        std::printf("hull-experiment samples=%d max_controls=%d out=%s.csv\n",
                    config.n_samples, config.max_controls, out_prefix.c_str());
        return kExitOk;
    }

    if (data_flags.data.empty() || data_flags.treated.empty() || data_flags.t0.empty())
        throw ValidationError("hull needs --data, --treated and --t0 (or --experiment)");
    PanelData panel = load_from_flags(data_flags);
    MatchingMatrix m = build_matching(panel, default_spec(panel), data_flags.standardize);
    HullQuery query;
    query.z1 = m.z1;
    query.z0 = m.z0;
    query.tol = tol;
    HullResult res = in_convex_hull(query);

    json certificate = {
        {"command", "hull"},
        {"treated", panel.treated_id()},
        {"inside", res.inside},
        {"objective", res.objective},
        {"residual", vector_json(res.residual)},
    };
    if (res.inside) {
        json weights = json::array();
        const auto donors = panel.donor_indices();
        for (size_t r = 0; r < donors.size(); ++r)
            weights.push_back({{"unit", panel.unit_ids[static_cast<size_t>(donors[r])]},
                               {"weight", res.weights(static_cast<Eigen::Index>(r))}});
        certificate["weights"] = weights;
    }
    write_json(out_prefix + ".json", certificate);
    std::printf("%s objective=%g out=%s.json\n", res.inside ? "inside" : "outside",
                res.objective, out_prefix.c_str());
    return kExitOk;
}

int cmd_simulate(const std::string& settings_str, const std::string& scale,
                 std::uint64_t seed, int threads, const std::string& cv,
                 const std::string& bias_mode, const std::string& out_path) {
    StudyConfig config;
    config.seed = seed;
    config.threads = threads;
    config.cv_scheme = parse_scheme(cv);
    config.bias_absolute_of_mean = bias_mode == "mean-error";
    if (scale == "paper") {
        config.n_param_sets = 20;
        config.n_shock_draws = 250;
    } else {
        config.n_param_sets = 5;
        config.n_shock_draws = 50;
    }

    if (settings_str == "paper") {
        config.settings = paper_settings();
    } else {
        std::stringstream groups(settings_str);
        std::string triple;
        while (std::getline(groups, triple, ';')) {
            std::stringstream ss(triple);
            std::string token;
            std::vector<int> values;
            while (std::getline(ss, token, ',')) {
                try {
                    values.push_back(std::stoi(token));
                } catch (const std::exception&) {
                    throw ValidationError("invalid setting token '" + token + "'");
                }
            }
            if (values.size() != 3)
                throw ValidationError("settings must be J,T0,r triples separated by ';'");
            config.settings.push_back({values[0], values[1], values[2]});
        }
    }

    StudyResult result =
        run_study(config, {Method::osc, Method::esc, Method::psc, Method::nsc});
    write_text(out_path, study_csv(result));
    int failures = 0;
    for (const auto& cell : result.cells) failures += cell.n_failures;
    std::printf("simulate settings=%zu scale=%s seed=%llu failures=%d out=%s\n",
                config.settings.size(), scale.c_str(),
                static_cast<unsigned long long>(seed), failures, out_path.c_str());
    return kExitOk;
}

int cmd_robust(const DataFlags& data_flags, const TuningFlags& tuning_flags,
               const std::string& method_name_str, const std::string& mode,
               const std::string& new_t0, double level, const std::string& out_prefix) {
    PanelData panel = load_from_flags(data_flags);
    const Method method = method_from_name(method_name_str);
    const ColumnSpec spec = default_spec(panel);
    // Tuning comes from the original window and is re-used, not re-selected,
    // inside the robustness loops.
    ResolvedTuning tuning =
        resolve_tuning(panel, spec, method, tuning_flags, data_flags.standardize);

    json result = {
        {"command", "robust"},
        {"mode", mode},
        {"method", method_name(method)},
        {"treated", panel.treated_id()},
        {"tuning", tuning_json(tuning.params, tuning.surface)},
    };

    if (mode == "backdate") {
        if (new_t0.empty()) throw ValidationError("--new-t0 is required for backdate");
        const TreatmentTime marker = parse_t0(new_t0, panel.n_periods());
        int resolved;
        if (std::holds_alternative<int>(marker)) {
            resolved = std::get<int>(marker);
        } else {
            const auto& label = std::get<std::string>(marker);
            auto it = std::find(panel.time_labels.begin(), panel.time_labels.end(), label);
            if (it == panel.time_labels.end())
                throw ValidationError("backdate label '" + label + "' not found");
            resolved = static_cast<int>(it - panel.time_labels.begin());
        }
        PanelData shifted = backdate(panel, resolved);
        const ColumnSpec shifted_spec = default_spec(shifted);
        MatchingMatrix m = build_matching(shifted, shifted_spec, data_flags.standardize);
        WeightVector wv = fit_weights(shifted, m, method, tuning.params);
        EffectEstimate effect = estimate_effect(shifted, wv);
        if (shifted.n_donors() >= 2) {
            VarianceEstimate var = estimate_variance(shifted, shifted_spec, method,
                                                     tuning.params, data_flags.standardize);
            effect = confidence_intervals(effect, var, level);
        }
        write_text(out_prefix + ".csv", plot_csv(effect));
        result["new_t0"] = resolved;
        result["pre_rmspe"] = wv.pre_rmspe;
        write_json(out_prefix + ".json", result);
        std::printf("robust mode=backdate new_t0=%d out=%s.{json,csv}\n", resolved,
                    out_prefix.c_str());
        return kExitOk;
    }

    auto estimates = leave_one_out(panel, spec, method, tuning.params,
                                   data_flags.standardize);
    std::ostringstream table;
    table << "excluded_unit,period,gap\n";
    const auto donors = panel.donor_indices();
    for (size_t i = 0; i < estimates.size(); ++i) {
        const std::string& excluded = panel.unit_ids[static_cast<size_t>(donors[i])];
        for (size_t t = 0; t < estimates[i].periods.size(); ++t)
            table << excluded << ',' << estimates[i].periods[t] << ','
                  << format_double(estimates[i].gap(static_cast<Eigen::Index>(t))) << '\n';
    }
    write_text(out_prefix + ".csv", table.str());
    result["n_series"] = estimates.size();
    write_json(out_prefix + ".json", result);
    std::printf("robust mode=loo series=%zu out=%s.{json,csv}\n", estimates.size(),
                out_prefix.c_str());
    return kExitOk;
}

// --config <file.json> supplies defaults for the invoked subcommand; explicit
// flags win. Keys are long option names without the leading dashes.
std::vector<std::string> inject_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string config_path;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (config_path.empty()) return args;
    if (args.size() < 2) throw ValidationError("--config requires a subcommand");

    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config file " + config_path);
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw ValidationError("config file " + config_path + ": " + e.what());
    }
    if (!config.is_object()) throw ValidationError("config file must hold a JSON object");

    std::vector<std::string> injected;
    for (const auto& [key, value] : config.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) injected.push_back("--" + key);
        } else if (value.is_string()) {
            injected.push_back("--" + key + "=" + value.get<std::string>());
        } else if (value.is_number_integer()) {
            injected.push_back("--" + key + "=" + std::to_string(value.get<long long>()));
        } else if (value.is_number_float()) {
            injected.push_back("--" + key + "=" + format_double(value.get<double>()));
        } else {
            throw ValidationError("config key '" + key + "' must be a scalar");
        }
    }
    // Defaults go right after the subcommand so later explicit flags override.
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic control estimation toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    DataFlags data_flags;
    TuningFlags tuning_flags;
    std::string method = "nsc";
    std::string out_prefix = "synthctl_out";
    double level = 0.95;

    auto* estimate = app.add_subcommand("estimate", "fit weights and the per-period gap");
    add_data_flags(estimate, data_flags);
    add_tuning_flags(estimate, tuning_flags);
    estimate->add_option("--method", method, "osc|esc|psc|nsc")
        ->check(CLI::IsMember({"osc", "esc", "psc", "nsc"}));
    estimate->add_option("--level", level, "confidence level");
    estimate->add_option("--out", out_prefix, "output path prefix");

    std::string policy = "reuse";
    auto* placebo = app.add_subcommand("placebo", "permutation test over placebo fits");
    add_data_flags(placebo, data_flags);
    add_tuning_flags(placebo, tuning_flags);
    placebo->add_option("--method", method, "osc|esc|psc|nsc")
        ->check(CLI::IsMember({"osc", "esc", "psc", "nsc"}));
    placebo->add_option("--tuning-policy", policy, "reuse|reselect")
        ->check(CLI::IsMember({"reuse", "reselect"}));
    placebo->add_option("--out", out_prefix, "output path prefix");

    bool experiment = false;
    int samples = 100;
    int max_controls = 10000;
    std::string t0_list = "1,2,3,4,5";
    std::uint64_t seed = 0;
    double tol = 1e-7;
    auto* hull = app.add_subcommand("hull", "convex-hull membership diagnostic");
    hull->add_option("--data", data_flags.data, "wide outcome CSV");
    hull->add_option("--predictors", data_flags.predictors, "optional predictor CSV");
    hull->add_option("--treated", data_flags.treated, "treated unit id");
    hull->add_option("--t0", data_flags.t0, "pretreatment count or first treated label");
    hull->add_flag("--standardize", data_flags.standardize, "standardize matching columns");
    hull->add_flag("--experiment", experiment, "run the sample-size experiment instead");
    hull->add_option("--samples", samples, "experiment: number of samples");
    hull->add_option("--max-controls", max_controls, "experiment: donor cap");
    hull->add_option("--t0-list", t0_list, "experiment: comma list of matched period counts");
    hull->add_option("--seed", seed, "experiment: RNG seed");
    hull->add_option("--tol", tol, "membership tolerance on the LP objective");
    hull->add_option("--out", out_prefix, "output path prefix");

    std::string settings = "paper";
    std::string scale = "desk";
    std::string bias_mode = "mae";
    int threads = 1;
    std::string sim_out = "study.csv";
    auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo study");
    simulate->add_option("--settings", settings, "J,T0,r triples ';'-separated, or 'paper'");
    simulate->add_option("--scale", scale, "desk|paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    simulate->add_option("--seed", seed, "study seed");
    simulate->add_option("--threads", threads, "worker threads");
    simulate->add_option("--cv", tuning_flags.cv, "controls|pretreat")
        ->check(CLI::IsMember({"controls", "pretreat"}));
    simulate->add_option("--bias-mode", bias_mode,
                         "bias column: mae (mean |error|) or mean-error (|mean error|)")
        ->check(CLI::IsMember({"mae", "mean-error"}));
    simulate->add_option("--out", sim_out, "output CSV path");

    std::string mode = "backdate";
    std::string new_t0;
    auto* robust = app.add_subcommand("robust", "backdating and leave-one-out checks");
    add_data_flags(robust, data_flags);
    add_tuning_flags(robust, tuning_flags);
    robust->add_option("--method", method, "osc|esc|psc|nsc")
        ->check(CLI::IsMember({"osc", "esc", "psc", "nsc"}));
    robust->add_option("--mode", mode, "backdate|loo")
        ->check(CLI::IsMember({"backdate", "loo"}));
    robust->add_option("--new-t0", new_t0, "backdate: earlier pretreatment count or label");
    robust->add_option("--level", level, "confidence level");
    robust->add_option("--out", out_prefix, "output path prefix");

    try {
        std::vector<std::string> args = inject_config(argc, argv);
        std::vector<const char*> raw;
        raw.reserve(args.size());
        for (const auto& a : args) raw.push_back(a.c_str());
        app.parse(static_cast<int>(raw.size()), raw.data());

        if (estimate->parsed())
            return cmd_estimate(data_flags, tuning_flags, method, level, out_prefix);
        if (placebo->parsed())
            return cmd_placebo(data_flags, tuning_flags, method, policy, out_prefix);
        if (hull->parsed())
            return cmd_hull(data_flags, experiment, samples, max_controls, t0_list, seed,
                            tol, out_prefix);
        if (simulate->parsed())
            return cmd_simulate(settings, scale, seed, threads, tuning_flags.cv, bias_mode,
                                sim_out);
        if (robust->parsed())
            return cmd_robust(data_flags, tuning_flags, method, mode, new_t0, level,
                              out_prefix);
        std::fprintf(stderr, "error: usage: no subcommand given\n");
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help path
        std::fprintf(stderr, "error: usage: %s\n", e.what());
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: validation: %s\n", e.what());
        return kExitValidation;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error: solver: %s\n", e.what());
        return kExitSolver;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: io: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return kExitSolver;
    }
}
