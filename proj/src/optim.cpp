#include "teamopt/optim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace teamopt {

void adam_step(Model& model, const GradientBuffer& grads, AdamState& state,
               double learning_rate) {
    const std::size_t n = model.parameter_count();
    if (grads.size() != n || state.m.size() != n || state.v.size() != n)
        throw std::invalid_argument("adam_step: shape mismatch between model, gradient and state");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(AdamState::kBeta1, t);
    const double bias2 = 1.0 - std::pow(AdamState::kBeta2, t);
    std::span<double> p = model.mutable_parameters();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        state.m[i] = AdamState::kBeta1 * state.m[i] + (1.0 - AdamState::kBeta1) * g;
        state.v[i] = AdamState::kBeta2 * state.v[i] + (1.0 - AdamState::kBeta2) * g * g;
        const double m_hat = state.m[i] / bias1;
        const double v_hat = state.v[i] / bias2;
        p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
    }
}

PlateauScheduler::PlateauScheduler(double learning_rate, double decay, int patience)
    : lr_(learning_rate), decay_(decay), patience_(patience) {}

double PlateauScheduler::step(double metric) {
    if (metric > best_ + kImprovementThreshold) {
        best_ = metric;
        stall_ = 0;
        return lr_;
    }
    if (++stall_ >= patience_) {
        lr_ = std::max(lr_ * decay_, kMinLearningRate);
        stall_ = 0;
    }
    return lr_;
}

std::string_view to_string(CheckpointMetric metric) {
    return metric == CheckpointMetric::Accuracy ? "accuracy" : "expected_utility";
}

double metric_value(const Metrics& m, CheckpointMetric metric) {
    return metric == CheckpointMetric::Accuracy ? m.accuracy : m.expected_utility;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(l2_weight >= 0.0)) throw std::invalid_argument("l2 weight must be non-negative");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (!(scheduler_decay > 0.0 && scheduler_decay < 1.0))
        throw std::invalid_argument("scheduler decay must lie in (0, 1)");
    if (scheduler_patience < 1) throw std::invalid_argument("scheduler patience must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("max epochs must be >= 1");
}

TrainResult train(Model model, const Dataset& train_set, const Dataset& val_set,
                  const LossSpec& spec, const TrainConfig& config) {
    config.validate();
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("training needs non-empty train and validation sets");
    if (train_set.n_features() != model.n_features() || val_set.n_features() != model.n_features())
        throw std::invalid_argument("model input width does not match the data");

    auto validate_metric = [&](const Model& m) {
        return metric_value(evaluate(m, val_set, spec.policy), config.checkpoint_metric);
    };

    TrainResult result;
    result.initial_metric = validate_metric(model);
    result.best_metric = result.initial_metric;
    result.best_model = model;
    result.best_epoch = 0;

    AdamState adam(model);
    PlateauScheduler scheduler(config.learning_rate, config.scheduler_decay,
                               config.scheduler_patience);
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const double lr = scheduler.learning_rate();
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t len = std::min(config.batch_size, order.size() - start);
            const auto batch = std::span<const std::size_t>(order).subspan(start, len);
            const BatchLoss bl = batch_loss(model, train_set, batch, spec, config.l2_weight);
            if (!std::isfinite(bl.value) || !bl.grads.all_finite())
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                                    ", batch starting at " + std::to_string(start) +
                                    " (learning rate " + std::to_string(lr) + ")");
            loss_sum += bl.value * static_cast<double>(len);
            adam_step(model, bl.grads, adam, lr);
        }
        if (!model.all_finite())
            throw TrainingError("non-finite parameters after epoch " + std::to_string(epoch));

        const double metric = validate_metric(model);
        result.history.push_back(
            {epoch, loss_sum / static_cast<double>(order.size()), metric, lr});
        if (metric > result.best_metric) {
            result.best_metric = metric;
            result.best_model = model;
            result.best_epoch = epoch;
        }
        scheduler.step(metric);
    }
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_history_csv(const TrainResult& result, std::ostream& out) {
    out << "epoch,train_loss,val_metric,lr\n";
    for (const EpochRecord& r : result.history)
        out << r.epoch << ',' << fmt(r.train_loss) << ',' << fmt(r.val_metric) << ','
            << fmt(r.learning_rate) << '\n';
}

}  // namespace teamopt
