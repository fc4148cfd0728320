#include "teamopt/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "teamopt/parallel.hpp"

namespace teamopt {

namespace {

constexpr std::uint64_t kValSplitSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kFoldSalt = 0xd1b54a32d192ed03ULL;

}  // namespace

GridSpec GridSpec::full() { return GridSpec{}; }

GridSpec GridSpec::desk() {
    GridSpec g;
    g.learning_rates = {1e-2, 1e-1};
    g.l2_weights = {1e-3, 1e-2};
    g.batch_sizes = {32};
    g.decays = {0.9};
    g.patiences = {5};
    return g;
}

std::size_t GridSpec::size() const {
    return learning_rates.size() * l2_weights.size() * batch_sizes.size() * decays.size() *
           patiences.size();
}

void GridSpec::validate() const {
    if (size() == 0) throw std::invalid_argument("hyperparameter grid has an empty axis");
}

std::vector<TrainConfig> GridSpec::cells(const TrainConfig& base) const {
    validate();
    std::vector<TrainConfig> out;
    for (double lr : learning_rates)
        for (double l2 : l2_weights)
            for (std::size_t bs : batch_sizes)
                for (double decay : decays)
                    for (int patience : patiences) {
                        TrainConfig c = base;
                        c.learning_rate = lr;
                        c.l2_weight = l2;
                        c.batch_size = bs;
                        c.scheduler_decay = decay;
                        c.scheduler_patience = patience;
                        out.push_back(c);
                    }
    return out;
}

CvResult cross_validate(const Dataset& train80, const ModelFactory& factory,
                        const LossSpec& spec, const GridSpec& grid, const TrainConfig& base,
                        int jobs) {
    if (train80.size() < kFolds * 5)
        throw std::invalid_argument("cross validation needs at least 5 examples per fold, got " +
                                    std::to_string(train80.size()) + " examples");
    const auto folds = kfold_indices(train80.size(), kFolds, base.seed ^ kFoldSalt);
    std::vector<Dataset> fold_train, fold_val;
    for (std::size_t f = 0; f < kFolds; ++f) {
        std::vector<std::size_t> rest;
        for (std::size_t g = 0; g < kFolds; ++g)
            if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
        std::sort(rest.begin(), rest.end());
        fold_train.push_back(train80.subset(rest));
        fold_val.push_back(train80.subset(folds[f]));
    }

    const std::vector<TrainConfig> configs = grid.cells(base);
    std::vector<Model> initial(kFolds);
    for (std::size_t f = 0; f < kFolds; ++f) initial[f] = factory(fold_train[f], base.seed + f);

    // One task per (cell, fold).
    std::vector<double> fold_scores(configs.size() * kFolds, 0.0);
    parallel_for(fold_scores.size(), jobs, [&](std::size_t task) {
        const std::size_t cell = task / kFolds;
        const std::size_t f = task % kFolds;
        TrainConfig cfg = configs[cell];
        cfg.seed = base.seed + f;
        double score = -std::numeric_limits<double>::infinity();
        try {
            const TrainResult r = train(initial[f], fold_train[f], fold_val[f], spec, cfg);
            if (std::isfinite(r.best_metric)) score = r.best_metric;
        } catch (const TrainingError&) {
        }
        fold_scores[task] = score;
    });

    CvResult result;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        double sum = 0.0;
        for (std::size_t f = 0; f < kFolds; ++f) sum += fold_scores[c * kFolds + f];
        result.cells.push_back({configs[c], sum / static_cast<double>(kFolds)});
    }

    std::vector<std::size_t> order(configs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const CvCell& x = result.cells[a];
        const CvCell& y = result.cells[b];
        if (x.score != y.score) return x.score > y.score;
        if (x.config.learning_rate != y.config.learning_rate)
            return x.config.learning_rate < y.config.learning_rate;
        if (x.config.l2_weight != y.config.l2_weight) return x.config.l2_weight > y.config.l2_weight;
        return x.config.batch_size > y.config.batch_size;
    });
    result.best = result.cells[order.front()].config;
    result.best_score = result.cells[order.front()].score;
    result.best.seed = base.seed;
    return result;
}

CvResult cross_validate(const Dataset& train80, ModelKind kind, const LossSpec& spec,
                        const GridSpec& grid, const TrainConfig& base, int jobs) {
    const ModelFactory factory = [kind](const Dataset& fold_train, std::uint64_t seed) {
        return init_model(kind, fold_train.n_features(), seed);
    };
    return cross_validate(train80, factory, spec, grid, base, jobs);
}

namespace {

struct SeedSplits {
    Dataset train80;  // standardized
    Dataset fit;      // checkpointing splits of train80
    Dataset val;
    Dataset test;
};

SeedSplits make_splits(const Dataset& data, std::uint64_t seed, const ExperimentOptions& o) {
    const std::array<double, 2> outer{1.0 - o.test_fraction, o.test_fraction};
    const auto parts = split(data, outer, seed);
    const std::array<Dataset, 1> rest{parts[1]};
    auto standardized = standardize(parts[0], rest);
    const std::array<double, 2> inner{1.0 - o.val_fraction, o.val_fraction};
    auto fit_val = split(standardized[0], inner, seed ^ kValSplitSalt);
    return {std::move(standardized[0]), std::move(fit_val[0]), std::move(fit_val[1]),
            std::move(standardized[1])};
}

Model train_baseline(ModelKind kind, const Dataset& fit, const Dataset& val,
                     const TrainConfig& cfg, std::uint64_t seed) {
    TrainConfig c = cfg;
    c.checkpoint_metric = CheckpointMetric::Accuracy;
    c.seed = seed;
    const LossSpec logloss{LossKind::LogLoss, HumanPolicy{}, std::nullopt};
    return train(init_model(kind, fit.n_features(), seed), fit, val, logloss, c).best_model;
}

Metrics mean_of(const std::vector<SeedOutcome>& seeds, Metrics SeedOutcome::*field) {
    Metrics m;
    for (const auto& s : seeds) {
        m.accuracy += (s.*field).accuracy;
        m.expected_utility += (s.*field).expected_utility;
        m.empirical_utility += (s.*field).empirical_utility;
    }
    const double n = static_cast<double>(seeds.size());
    return {m.accuracy / n, m.expected_utility / n, m.empirical_utility / n};
}

TrainConfig select_baseline_config(ModelKind kind, const Dataset& train80,
                                   const ExperimentOptions& o) {
    if (o.baseline_config) return *o.baseline_config;
    TrainConfig base = o.base;
    base.checkpoint_metric = CheckpointMetric::Accuracy;
    base.seed = o.base_seed;
    const LossSpec logloss{LossKind::LogLoss, HumanPolicy{}, std::nullopt};
    return cross_validate(train80, kind, logloss, o.grid, base, o.jobs).best;
}

TrainConfig select_team_config(ModelKind kind, const Dataset& train80, const LossSpec& team_spec,
                               const TrainConfig& baseline_cfg, const ExperimentOptions& o) {
    if (o.team_config) return *o.team_config;
    TrainConfig base = o.base;
    base.checkpoint_metric = CheckpointMetric::ExpectedUtility;
    base.seed = o.base_seed;
    const ModelFactory warm = [&](const Dataset& fold_train, std::uint64_t seed) {
        if (o.baseline_model) return *o.baseline_model;
        const std::array<double, 2> inner{1.0 - o.val_fraction, o.val_fraction};
        const auto fv = split(fold_train, inner, seed ^ kValSplitSalt);
        return train_baseline(kind, fv[0], fv[1], baseline_cfg, seed);
    };
    return cross_validate(train80, warm, team_spec, o.grid, base, o.jobs).best;
}

ExperimentReport run_with_configs(const Dataset& data, ModelKind kind, const UtilityParams& params,
                                  const ExperimentOptions& o, const TrainConfig& baseline_cfg,
                                  const TrainConfig& team_cfg) {
    const HumanPolicy policy{params, o.accept_probability};
    const LossSpec team_spec{o.team_loss, policy, o.team_offset};

    ExperimentReport report;
    report.model_kind = kind;
    report.params = params;
    report.accept_probability = o.accept_probability;
    report.team_loss = o.team_loss;
    report.baseline_config = baseline_cfg;
    report.team_config = team_cfg;
    report.seeds.resize(o.n_seeds);

    parallel_for(o.n_seeds, o.jobs, [&](std::size_t s) {
        const std::uint64_t seed = o.base_seed + s;
        const SeedSplits sp = make_splits(data, seed, o);
        SeedOutcome& out = report.seeds[s];
        out.seed = seed;
        out.standardization = *sp.train80.standardization();
        out.baseline_model = o.baseline_model ? *o.baseline_model
                                              : train_baseline(kind, sp.fit, sp.val, baseline_cfg, seed);

        TrainConfig tc = team_cfg;
        tc.checkpoint_metric = CheckpointMetric::ExpectedUtility;
        tc.seed = seed;
        out.team_training = train(out.baseline_model, sp.fit, sp.val, team_spec, tc);
        out.team_model = out.team_training.best_model;
        out.warm_start_val_eu = out.team_training.initial_metric;
        out.team_val_eu = out.team_training.best_metric;
        out.team_best_epoch = out.team_training.best_epoch;

        out.baseline = evaluate(out.baseline_model, sp.test, policy);
        out.team = evaluate(out.team_model, sp.test, policy);
        out.delta = {out.team.accuracy - out.baseline.accuracy,
                     out.team.expected_utility - out.baseline.expected_utility,
                     out.team.empirical_utility - out.baseline.empirical_utility};
    });

    report.mean_baseline = mean_of(report.seeds, &SeedOutcome::baseline);
    report.mean_team = mean_of(report.seeds, &SeedOutcome::team);
    report.mean_delta = mean_of(report.seeds, &SeedOutcome::delta);
    return report;
}

}  // namespace

ExperimentReport run_experiment(const Dataset& data, ModelKind kind, const UtilityParams& params,
                                const ExperimentOptions& options) {
    params.validate();
    const HumanPolicy policy{params, options.accept_probability};
    policy.validate();
    if (options.n_seeds == 0) throw std::invalid_argument("run_experiment needs at least one seed");

    const SeedSplits first = make_splits(data, options.base_seed, options);
    const TrainConfig baseline_cfg = select_baseline_config(kind, first.train80, options);
    const LossSpec team_spec{options.team_loss, policy, options.team_offset};
    const TrainConfig team_cfg = select_team_config(kind, first.train80, team_spec, baseline_cfg, options);
    return run_with_configs(data, kind, params, options, baseline_cfg, team_cfg);
}

std::vector<SweepRow> sweep(const Dataset& data, ModelKind kind, SweepAxis axis,
                            const std::vector<double>& values, const UtilityParams& fixed,
                            const ExperimentOptions& options) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    std::vector<UtilityParams> points;
    for (double v : values) {
        UtilityParams p = fixed;
        (axis == SweepAxis::HumanAccuracy ? p.human_accuracy : p.beta) = v;
        p.validate();
        points.push_back(p);
    }

    ExperimentOptions o = options;
    const SeedSplits first = make_splits(data, o.base_seed, o);
    o.baseline_config = select_baseline_config(kind, first.train80, o);

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const ExperimentReport r = run_experiment(data, kind, points[i], o);
        rows.push_back({values[i], points[i], r.mean_baseline.expected_utility,
                        r.mean_delta.expected_utility});
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "a_or_beta,baseline_eu,delta_eu\n";
    for (const auto& r : rows)
        out << fmt(r.value) << ',' << fmt(r.baseline_eu) << ',' << fmt(r.delta_eu) << '\n';
}

}  // namespace teamopt
