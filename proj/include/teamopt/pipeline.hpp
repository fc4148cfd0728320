#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "teamopt/analysis.hpp"
#include "teamopt/classifiers.hpp"
#include "teamopt/data.hpp"
#include "teamopt/losses.hpp"
#include "teamopt/optim.hpp"

namespace teamopt {

// Candidate hyperparameters; the grid is their Cartesian product.
struct GridSpec {
    std::vector<double> learning_rates{1e-3, 1e-2, 1e-1, 1.0};
    std::vector<double> l2_weights{1e-3, 1e-2, 1e-1};
    std::vector<std::size_t> batch_sizes{4, 8, 32};
    std::vector<double> decays{0.1, 0.9};
    std::vector<int> patiences{2, 5, 10};

    // The full published grid (the defaults above).
    static GridSpec full();
    // A 2x2x1x1x1 subset of the published values for quick runs.
    static GridSpec desk();

    std::size_t size() const;
    void validate() const;
    // Expands the grid; non-grid fields are copied from `base`.
    std::vector<TrainConfig> cells(const TrainConfig& base) const;
};

struct CvCell {
    TrainConfig config;
    double score = 0.0;  // mean best validation metric over folds; -inf if diverged
};

struct CvResult {
    TrainConfig best;
    double best_score = 0.0;
    std::vector<CvCell> cells;
};

// Builds the starting model for one fold's training split.
using ModelFactory = std::function<Model(const Dataset& fold_train, std::uint64_t seed)>;

inline constexpr std::size_t kFolds = 5;

// k-fold grid search. Each cell trains on 4 folds with the held-out fold as
// the checkpointing set and is scored by the mean best checkpoint metric.
// Diverging cells score -inf. Ties prefer smaller lr, then larger l2, then
// larger batch, then the first-enumerated cell.
// Throws std::invalid_argument when a fold would hold fewer than 5 examples.
CvResult cross_validate(const Dataset& train80, const ModelFactory& factory,
                        const LossSpec& spec, const GridSpec& grid, const TrainConfig& base,
                        int jobs = 1);

// Same with a fresh init_model(kind, ...) per fold.
CvResult cross_validate(const Dataset& train80, ModelKind kind, const LossSpec& spec,
                        const GridSpec& grid, const TrainConfig& base, int jobs = 1);

struct ExperimentOptions {
    std::size_t n_seeds = 10;
    std::uint64_t base_seed = 0;
    double test_fraction = 0.2;
    double val_fraction = 0.2;  // of the training portion, for checkpointing
    LossKind team_loss = LossKind::ExpectedUtility;
    std::optional<double> team_offset;
    double accept_probability = 1.0;
    GridSpec grid = GridSpec::desk();
    TrainConfig base;  // max_epochs and friends for every run
    // Skip the corresponding grid search when set.
    std::optional<TrainConfig> baseline_config;
    std::optional<TrainConfig> team_config;
    // Use this model as the warm start instead of training a log-loss
    // baseline per seed.
    std::optional<Model> baseline_model;
    int jobs = 1;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    Metrics baseline;  // test split
    Metrics team;      // test split
    Metrics delta;     // team - baseline
    double warm_start_val_eu = 0.0;  // team training, epoch 0
    double team_val_eu = 0.0;        // team training, checkpoint
    int team_best_epoch = 0;
    Model baseline_model;
    Model team_model;
    Standardization standardization;
    TrainResult team_training;
};

struct ExperimentReport {
    ModelKind model_kind = ModelKind::Linear;
    UtilityParams params;
    double accept_probability = 1.0;
    LossKind team_loss = LossKind::ExpectedUtility;
    TrainConfig baseline_config;
    TrainConfig team_config;
    std::vector<SeedOutcome> seeds;
    Metrics mean_baseline;
    Metrics mean_team;
    Metrics mean_delta;
};

// Grid searches run once on the first seed's training split (log-loss first,
// then the team loss warm-started from per-fold log-loss models), then every
// seed trains a log-loss baseline checkpointed on accuracy and a warm-started
// team model checkpointed on expected utility.
ExperimentReport run_experiment(const Dataset& data, ModelKind kind, const UtilityParams& params,
                                const ExperimentOptions& options);

enum class SweepAxis { HumanAccuracy, Beta };

struct SweepRow {
    double value = 0.0;  // a or beta
    UtilityParams params;
    double baseline_eu = 0.0;
    double delta_eu = 0.0;
};

// Runs run_experiment at each value of the swept parameter; the remaining
// fields come from `fixed`. The log-loss grid search is shared across points.
std::vector<SweepRow> sweep(const Dataset& data, ModelKind kind, SweepAxis axis,
                            const std::vector<double>& values, const UtilityParams& fixed,
                            const ExperimentOptions& options);

// Header: a_or_beta,baseline_eu,delta_eu.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace teamopt
