// teamopt command-line front end.
//
//   teamopt gen-data   --kind scenario1|moons --n N --out file.csv
//   teamopt train      --data file.csv --model linear|mlp --loss eu|team --out dir
//   teamopt eval       --data file.csv --model-file model.json --out dir
//   teamopt exhaustive --data file.csv --out dir
//   teamopt sweep      --data file.csv --a 0.8,0.9,1.0 --out dir
//   teamopt analyze    --data file.csv --run dir --out dir
//
// Every command accepts --config file.json whose keys mirror the long flag
// names; flags given on the command line win. Usage errors exit with 2,
// runtime failures with 1.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teamopt/analysis.hpp"
#include "teamopt/data.hpp"
#include "teamopt/exhaustive.hpp"
#include "teamopt/pipeline.hpp"
#include "teamopt/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace teamopt;

namespace {

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Settings shared by the experiment commands.
struct Common {
    double beta = 1.0;
    double lambda = 0.5;
    double a = 1.0;
    double p = 1.0;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out;
};

struct Settings {
    Common common;
    std::vector<double> a_values;     // sweep only
    std::vector<double> beta_values;  // sweep only

    // gen-data
    std::string kind = "scenario1";
    std::size_t n = 10000;
    double noise = kDefaultMoonsNoise;

    // data-consuming commands
    std::string data;
    std::string label = "label";
    std::string model = "linear";
    std::string loss = "eu";
    std::optional<double> team_offset;
    std::size_t seeds = 10;
    std::string grid = "desk";
    int max_epochs = 100;
    std::string warm_start = "auto";
    std::string model_file;
    std::string run_dir;
    std::string baseline_file;
    std::string team_file;
    std::size_t bins = 20;
    std::size_t angles = 180;
    std::size_t offsets = 101;
};

void add_policy_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--beta", c.beta, "penalty for a wrong final decision (>= 1)")->capture_default_str();
    cmd->add_option("--lambda", c.lambda, "cost of solving (>= 0)")->capture_default_str();
    cmd->add_option("--a", c.a, "human accuracy when solving")->capture_default_str();
    cmd->add_option("--p", c.p, "probability of accepting above the threshold")->capture_default_str();
}

void add_run_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "base seed")->envname("TEAMOPT_SEED")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--out", c.out, "output directory")->required();
}

void add_data_flags(CLI::App* cmd, Settings& s) {
    cmd->add_option("--data", s.data, "input CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--label", s.label, "label column name")->capture_default_str();
}

void add_training_flags(CLI::App* cmd, Settings& s) {
    cmd->add_option("--model", s.model, "model class")
        ->check(CLI::IsMember({"linear", "mlp"}))
        ->capture_default_str();
    cmd->add_option("--seeds", s.seeds, "number of train/test splits")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--grid", s.grid, "hyperparameter grid")
        ->check(CLI::IsMember({"desk", "full"}))
        ->capture_default_str();
    cmd->add_option("--max-epochs", s.max_epochs, "epochs per training run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

// ---- config file mirror -------------------------------------------------

std::string scalar_to_arg(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// Appends "--key value" for every config entry the command line does not set.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    json cfg;
    try {
        cfg = read_json(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("cannot read config: ") + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (key == "config" || key == "command" || flag_present(args, flag)) continue;
        if (value.is_null()) continue;
        if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar_to_arg(v);
            args.push_back(flag);
            args.push_back(joined);
        } else if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else {
            args.push_back(flag);
            args.push_back(scalar_to_arg(value));
        }
    }
    return args;
}

json typed_value(const std::string& s) {
    std::int64_t i = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), i);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return i;
    std::uint64_t u = 0;
    r = std::from_chars(s.data(), s.data() + s.size(), u);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return u;
    double d = 0.0;
    r = std::from_chars(s.data(), s.data() + s.size(), d);
    if (!s.empty() && r.ec == std::errc() && r.ptr == s.data() + s.size()) return d;
    return s;
}

// Every long option of the command with its effective value, in a form
// that --config accepts back.
json resolved_config(const CLI::App& cmd) {
    json j;
    j["command"] = cmd.get_name();
    for (const CLI::Option* opt : cmd.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config" || opt->get_lnames().empty()) continue;
        const std::string key = opt->get_lnames().front();
        if (opt->get_expected_min() == 0) {
            j[key] = opt->count() > 0;
            continue;
        }
        std::vector<std::string> values = opt->results();
        if (values.empty()) {
            if (opt->get_default_str().empty()) continue;
            values = {opt->get_default_str()};
        }
        if (opt->get_expected_max() > 1) {
            json arr = json::array();
            for (const auto& v : values) arr.push_back(typed_value(v));
            j[key] = arr;
        } else {
            j[key] = typed_value(values.back());
        }
    }
    return j;
}

// ---- helpers -------------------------------------------------------------

// Out-of-range policy flags are usage errors.
UtilityParams params_of(const Common& c) {
    UtilityParams u{c.beta, c.lambda, c.a};
    try {
        u.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return u;
}

HumanPolicy policy_of(const Common& c) {
    HumanPolicy p{params_of(c), c.p};
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

fs::path prepare_out(const std::string& dir) {
    fs::create_directories(dir);
    return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

ExperimentOptions experiment_options(const Settings& s) {
    ExperimentOptions o;
    o.n_seeds = s.seeds;
    o.base_seed = s.common.seed;
    o.team_loss = parse_loss_kind(s.loss);
    o.team_offset = s.team_offset;
    o.accept_probability = s.common.p;
    o.grid = s.grid == "full" ? GridSpec::full() : GridSpec::desk();
    o.base.max_epochs = s.max_epochs;
    o.jobs = s.common.jobs;
    return o;
}

Model load_model(const std::string& path, std::optional<Standardization>* stats = nullptr) {
    const json j = read_json(path);
    if (stats) *stats = standardization_from_json(j);
    return model_from_json(j);
}

Dataset prepare_eval_data(const Dataset& raw, const std::optional<Standardization>& stats) {
    return stats ? apply_standardization(raw, *stats) : raw;
}

// ---- commands ------------------------------------------------------------

int cmd_gen_data(const Settings& s, const CLI::App& cmd) {
    const Dataset d = s.kind == "moons" ? gen_moons(s.n, s.noise, s.common.seed)
                                        : gen_scenario1(s.n, s.common.seed);
    const fs::path out(s.common.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_csv(d, out);
    fs::path cfg = out;
    cfg.replace_extension(".config.resolved.json");
    write_json(resolved_config(cmd), cfg);
    std::cout << "wrote " << d.size() << " rows to " << out.string() << "; positive fraction "
              << d.positive_fraction() << '\n';
    return 0;
}

int cmd_train(const Settings& s, const CLI::App& cmd) {
    const Dataset data = load_csv(s.data, s.label);
    const UtilityParams params = params_of(s.common);
    policy_of(s.common);
    ExperimentOptions o = experiment_options(s);
    if (s.warm_start != "auto") {
        std::optional<Standardization> stats;
        o.baseline_model = load_model(s.warm_start, &stats);
        if (o.baseline_model->n_features() != data.n_features())
            throw std::invalid_argument("warm-start model expects " +
                                        std::to_string(o.baseline_model->n_features()) +
                                        " features, data has " + std::to_string(data.n_features()));
    }
    const ModelKind kind = parse_model_kind(s.model);
    const fs::path out = prepare_out(s.common.out);
    write_json(resolved_config(cmd), out / "config.resolved.json");

    const ExperimentReport r = run_experiment(data, kind, params, o);
    write_json(to_json(r), out / "report.json");
    const SeedOutcome& first = r.seeds.front();
    write_json(model_to_json(first.baseline_model, first.standardization), out / "baseline_model.json");
    write_json(model_to_json(first.team_model, first.standardization), out / "team_model.json");
    std::ostringstream history;
    write_history_csv(first.team_training, history);
    write_text(out / "team_history.csv", history.str());
    const std::array<double, 2> outer{1.0 - o.test_fraction, o.test_fraction};
    save_csv(split(data, outer, o.base_seed)[1], out / "test_split.csv", s.label);

    std::cout << "baseline EU " << r.mean_baseline.expected_utility << ", team EU "
              << r.mean_team.expected_utility << ", delta " << r.mean_delta.expected_utility
              << " over " << r.seeds.size() << " seeds\n";
    return 0;
}

int cmd_eval(const Settings& s, const CLI::App& cmd) {
    std::optional<Standardization> stats;
    const Model m = load_model(s.model_file, &stats);
    const Dataset data = prepare_eval_data(load_csv(s.data, s.label), stats);
    const HumanPolicy pol = policy_of(s.common);
    const fs::path out = prepare_out(s.common.out);
    write_json(resolved_config(cmd), out / "config.resolved.json");
    const Metrics met = evaluate(m, data, pol);
    write_json({{"params", to_json(pol.params)}, {"accept_probability", pol.accept_probability},
                {"n", data.size()}, {"metrics", to_json(met)}},
               out / "metrics.json");
    std::cout << "accuracy " << met.accuracy << ", expected utility " << met.expected_utility
              << ", empirical utility " << met.empirical_utility << '\n';
    return 0;
}

int cmd_exhaustive(const Settings& s, const CLI::App& cmd) {
    const Dataset data = load_csv(s.data, s.label);
    const HumanPolicy pol = policy_of(s.common);
    const fs::path out = prepare_out(s.common.out);
    write_json(resolved_config(cmd), out / "config.resolved.json");

    ExhaustiveOptions o;
    o.n_seeds = s.seeds;
    o.base_seed = s.common.seed;
    o.grid.angle_steps = s.angles;
    o.grid.offset_steps = s.offsets;
    o.jobs = s.common.jobs;

    // Log-loss hyperparameters come from the same grid search the training
    // pipeline runs, on the first seed's top-2-feature training split.
    const std::array<double, 2> outer{1.0 - o.test_fraction, o.test_fraction};
    const auto parts = split(data, outer, o.base_seed);
    const Dataset std_train = apply_standardization(parts[0], fit_standardization(parts[0]));
    const auto f = select_top2_features(std_train);
    const std::array<std::size_t, 2> cols{f.first, f.second};
    TrainConfig base;
    base.max_epochs = s.max_epochs;
    base.seed = o.base_seed;
    const GridSpec grid = s.grid == "full" ? GridSpec::full() : GridSpec::desk();
    o.logloss_config = cross_validate(std_train.select_features(cols), ModelKind::Linear, LossSpec{},
                                      grid, base, s.common.jobs)
                           .best;

    const auto rows = compare_exhaustive(data, pol, o);
    json jrows = json::array();
    double a = 0, b = 0, c = 0;
    for (const auto& r : rows) {
        jrows.push_back(to_json(r));
        a += r.delta_eu();
        b += r.delta_emp();
        c += r.delta_star_emp();
    }
    const double n = static_cast<double>(rows.size());
    const std::string name = fs::path(s.data).stem().string();
    write_json({{"dataset", name},
                {"params", to_json(pol.params)},
                {"logloss_config", to_json(o.logloss_config)},
                {"rows", jrows},
                {"mean", {{"delta_eu_A", a / n}, {"delta_emp_B", b / n}, {"delta_star_emp_C", c / n}}}},
               out / "exhaustive.json");
    std::ostringstream csv;
    write_exhaustive_csv(name, rows, csv);
    write_text(out / "exhaustive.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_sweep(const Settings& s, const CLI::App& cmd) {
    const bool a_axis = s.a_values.size() > 1;
    const bool beta_axis = s.beta_values.size() > 1;
    if (a_axis == beta_axis)
        throw UsageError("sweep needs a list for exactly one of --a or --beta, e.g. --a 0.8,0.9,1.0");
    Common fixed = s.common;
    if (!s.a_values.empty()) fixed.a = s.a_values.front();
    if (!s.beta_values.empty()) fixed.beta = s.beta_values.front();
    policy_of(fixed);
    for (double v : a_axis ? s.a_values : s.beta_values) {
        Common point = fixed;
        (a_axis ? point.a : point.beta) = v;
        params_of(point);
    }

    const Dataset data = load_csv(s.data, s.label);
    const fs::path out = prepare_out(s.common.out);
    write_json(resolved_config(cmd), out / "config.resolved.json");

    const auto axis = a_axis ? SweepAxis::HumanAccuracy : SweepAxis::Beta;
    const auto rows = sweep(data, parse_model_kind(s.model), axis, a_axis ? s.a_values : s.beta_values,
                            params_of(fixed), experiment_options(s));
    std::ostringstream csv;
    write_sweep_csv(rows, csv);
    write_text(out / "sweep.csv", csv.str());
    json jrows = json::array();
    for (const auto& r : rows)
        jrows.push_back({{"value", r.value}, {"params", to_json(r.params)},
                         {"baseline_eu", r.baseline_eu}, {"delta_eu", r.delta_eu}});
    write_json({{"axis", a_axis ? "a" : "beta"}, {"rows", jrows}}, out / "sweep.json");
    std::cout << csv.str();
    return 0;
}

int cmd_analyze(const Settings& s, const CLI::App& cmd) {
    std::string base_path = s.baseline_file, team_path = s.team_file;
    if (!s.run_dir.empty()) {
        if (base_path.empty()) base_path = (fs::path(s.run_dir) / "baseline_model.json").string();
        if (team_path.empty()) team_path = (fs::path(s.run_dir) / "team_model.json").string();
    }
    if (base_path.empty() || team_path.empty())
        throw UsageError("analyze needs --run or both --baseline and --team");

    std::optional<Standardization> base_stats, team_stats;
    const Model base = load_model(base_path, &base_stats);
    const Model team = load_model(team_path, &team_stats);
    const Dataset raw = load_csv(s.data, s.label);
    const HumanPolicy pol = policy_of(s.common);
    const fs::path out = prepare_out(s.common.out);
    write_json(resolved_config(cmd), out / "config.resolved.json");

    const BehaviorReport rb = behavior_report(base, prepare_eval_data(raw, base_stats), pol, s.bins);
    const BehaviorReport rt = behavior_report(team, prepare_eval_data(raw, team_stats), pol, s.bins);
    const BehaviorDiff diff = compare_reports(rb, rt);
    write_json({{"params", to_json(pol.params)},
                {"baseline", {{"metrics", to_json(rb.metrics)}, {"curves", to_json(rb.curves)}}},
                {"team", {{"metrics", to_json(rt.metrics)}, {"curves", to_json(rt.curves)}}},
                {"diff", to_json(diff)}},
               out / "behavior.json");
    std::ostringstream cb, ct;
    write_curves_csv(rb.curves, cb);
    write_curves_csv(rt.curves, ct);
    write_text(out / "curves_baseline.csv", cb.str());
    write_text(out / "curves_team.csv", ct.str());
    std::cout << "accept fraction " << rb.curves.accept_fraction << " -> " << rt.curves.accept_fraction
              << ", expected utility " << rb.metrics.expected_utility << " -> "
              << rt.metrics.expected_utility << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Train classifiers for accept-or-solve human-AI teams"};
    app.require_subcommand(1);

    Settings s;

    auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset as CSV");
    gen->add_option("--kind", s.kind, "generator")
        ->check(CLI::IsMember({"scenario1", "moons"}))
        ->capture_default_str();
    gen->add_option("--n", s.n, "number of points")->capture_default_str();
    gen->add_option("--noise", s.noise, "moons noise stddev")->capture_default_str();
    gen->add_option("--seed", s.common.seed, "generator seed")->envname("TEAMOPT_SEED")->capture_default_str();
    gen->add_option("--out", s.common.out, "output CSV path")->required();

    auto* train = app.add_subcommand("train", "log-loss baseline plus warm-started team training");
    add_data_flags(train, s);
    add_training_flags(train, s);
    add_policy_flags(train, s.common);
    add_run_flags(train, s.common);
    train->add_option("--loss", s.loss, "team objective (the log-loss baseline is always trained)")
        ->check(CLI::IsMember({"eu", "team"}))
        ->capture_default_str();
    train->add_option("--team-offset", s.team_offset, "K for the team loss (default beta)");
    train->add_option("--warm-start", s.warm_start, "'auto' or a baseline model JSON")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "metrics of a saved model");
    add_data_flags(eval, s);
    add_policy_flags(eval, s.common);
    add_run_flags(eval, s.common);
    eval->add_option("--model-file", s.model_file, "model JSON")->required()->check(CLI::ExistingFile);

    auto* exh = app.add_subcommand("exhaustive", "grid search over 2-D linear models");
    add_data_flags(exh, s);
    add_policy_flags(exh, s.common);
    add_run_flags(exh, s.common);
    exh->add_option("--seeds", s.seeds, "number of train/test splits")->check(CLI::PositiveNumber)->capture_default_str();
    exh->add_option("--grid", s.grid, "log-loss hyperparameter grid")
        ->check(CLI::IsMember({"desk", "full"}))
        ->capture_default_str();
    exh->add_option("--max-epochs", s.max_epochs, "log-loss training epochs")->check(CLI::PositiveNumber)->capture_default_str();
    exh->add_option("--angles", s.angles, "angle steps")->check(CLI::PositiveNumber)->capture_default_str();
    exh->add_option("--offsets", s.offsets, "offset steps")->check(CLI::PositiveNumber)->capture_default_str();

    auto* sw = app.add_subcommand("sweep", "vary human accuracy or the mistake penalty");
    add_data_flags(sw, s);
    add_training_flags(sw, s);
    add_run_flags(sw, s.common);
    sw->add_option("--a", s.a_values, "human accuracy value(s)")->delimiter(',');
    sw->add_option("--beta", s.beta_values, "penalty value(s)")->delimiter(',');
    sw->add_option("--lambda", s.common.lambda, "cost of solving")->capture_default_str();
    sw->add_option("--p", s.common.p, "probability of accepting above the threshold")->capture_default_str();
    sw->add_option("--loss", s.loss, "team objective")->check(CLI::IsMember({"eu", "team"}))->capture_default_str();
    sw->add_option("--team-offset", s.team_offset, "K for the team loss (default beta)");

    auto* an = app.add_subcommand("analyze", "behavior curves of a baseline/team model pair");
    add_data_flags(an, s);
    add_policy_flags(an, s.common);
    add_run_flags(an, s.common);
    an->add_option("--run", s.run_dir, "train output directory")->check(CLI::ExistingDirectory);
    an->add_option("--baseline", s.baseline_file, "baseline model JSON")->check(CLI::ExistingFile);
    an->add_option("--team", s.team_file, "team model JSON")->check(CLI::ExistingFile);
    an->add_option("--bins", s.bins, "number of confidence bins")->check(CLI::Range(2, 1000))->capture_default_str();

    // The config file is merged into argv up front; each command only needs
    // to accept the flag.
    std::string config_path;
    for (CLI::App* cmd : {gen, train, eval, exh, sw, an})
        cmd->add_option("--config", config_path, "JSON file with flag values (flags win)");

    try {
        const std::vector<std::string> args = merge_config({argv + 1, argv + argc});
        // CLI11 consumes the vector from the back.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*gen) return cmd_gen_data(s, *gen);
        if (*train) return cmd_train(s, *train);
        if (*eval) return cmd_eval(s, *eval);
        if (*exh) return cmd_exhaustive(s, *exh);
        if (*sw) return cmd_sweep(s, *sw);
        if (*an) return cmd_analyze(s, *an);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
