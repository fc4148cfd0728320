#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "teamopt/classifiers.hpp"
#include "teamopt/data.hpp"
#include "teamopt/team_model.hpp"

namespace teamopt {

inline constexpr double kProbFloor = 1e-12;

enum class LossKind { LogLoss, ExpectedUtility, TeamLoss };

std::string_view to_string(LossKind kind);
// Accepts "log", "eu", "team" and the long names returned by to_string.
LossKind parse_loss_kind(std::string_view name);

// Per-example loss value and its derivative with respect to h(x)[y].
struct LossValue {
    double value = 0.0;
    double d_value_d_prob_y = 0.0;
};

struct LossSpec {
    LossKind kind = LossKind::LogLoss;
    HumanPolicy policy;                // unused by log-loss
    std::optional<double> team_offset;  // K; defaults to beta

    double offset() const { return team_offset.value_or(policy.params.beta); }
};

// -log h[y], with h[y] floored at kProbFloor.
LossValue log_loss(const Prediction& pred, Label y);

// -psi(x, y). The accept/solve indicator is held constant under
// differentiation, so the solve branch has zero gradient.
LossValue eu_loss(const Prediction& pred, Label y, const HumanPolicy& policy);

// -log(psi + K): log-loss shaped in the accept branch, constant when solving.
LossValue team_loss(const Prediction& pred, Label y, const HumanPolicy& policy, double offset);

LossValue example_loss(const LossSpec& spec, const Prediction& pred, Label y);

// Converts d loss / d h[y] into d loss / d probs[1].
inline double to_prob1_derivative(double d_value_d_prob_y, Label y) {
    return y == 1 ? d_value_d_prob_y : -d_value_d_prob_y;
}

struct BatchLoss {
    double value = 0.0;
    GradientBuffer grads;
};

// Mean per-example loss over `indices` plus l2_weight * ||weights||^2
// (biases excluded). Examples are reduced in index order.
// Throws std::invalid_argument for an empty batch.
BatchLoss batch_loss(const Model& model, const Dataset& data,
                     std::span<const std::size_t> indices, const LossSpec& spec,
                     double l2_weight);

// Same, over the whole dataset.
BatchLoss batch_loss(const Model& model, const Dataset& data, const LossSpec& spec,
                     double l2_weight);

}  // namespace teamopt
