#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "teamopt/analysis.hpp"
#include "teamopt/classifiers.hpp"
#include "teamopt/data.hpp"
#include "teamopt/losses.hpp"

namespace teamopt {

// Raised when training produces a non-finite loss or parameter.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AdamState {
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;

    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    AdamState() = default;
    explicit AdamState(const Model& model)
        : m(model.parameter_count(), 0.0), v(model.parameter_count(), 0.0) {}
};

// One bias-corrected Adam update. Throws std::invalid_argument on a shape
// mismatch between model, gradient and state.
void adam_step(Model& model, const GradientBuffer& grads, AdamState& state,
               double learning_rate);

// Reduce-on-plateau for a metric that is maximized.
class PlateauScheduler {
public:
    static constexpr double kImprovementThreshold = 1e-6;
    static constexpr double kMinLearningRate = 1e-8;

    PlateauScheduler(double learning_rate, double decay, int patience);

    // Feeds one epoch's validation metric; returns the learning rate to use next.
    double step(double metric);

    double learning_rate() const { return lr_; }
    double best() const { return best_; }
    int stall() const { return stall_; }

private:
    double lr_;
    double decay_;
    int patience_;
    double best_ = -std::numeric_limits<double>::infinity();
    int stall_ = 0;
};

enum class CheckpointMetric { Accuracy, ExpectedUtility };

std::string_view to_string(CheckpointMetric metric);
double metric_value(const Metrics& m, CheckpointMetric metric);

struct TrainConfig {
    double learning_rate = 1e-2;
    double l2_weight = 1e-3;
    std::size_t batch_size = 32;
    double scheduler_decay = 0.9;
    int scheduler_patience = 5;
    int max_epochs = 200;
    CheckpointMetric checkpoint_metric = CheckpointMetric::Accuracy;
    std::uint64_t seed = 0;

    // Throws std::invalid_argument on a non-positive field or decay outside (0, 1).
    void validate() const;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_metric = 0.0;
    double learning_rate = 0.0;
};

struct TrainResult {
    Model best_model;
    int best_epoch = 0;  // 0 means the initialization was never beaten
    double best_metric = 0.0;
    double initial_metric = 0.0;  // validation metric before the first step
    std::vector<EpochRecord> history;  // epochs 1..max_epochs
};

// Mini-batch Adam with seeded shuffling, reduce-on-plateau scheduling and
// best-validation checkpointing. The initialization is evaluated first and
// takes part in checkpointing as epoch 0.
TrainResult train(Model model, const Dataset& train_set, const Dataset& val_set,
                  const LossSpec& spec, const TrainConfig& config);

// CSV with header epoch,train_loss,val_metric,lr.
void write_history_csv(const TrainResult& result, std::ostream& out);

}  // namespace teamopt
