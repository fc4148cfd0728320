#include "teamopt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace teamopt {

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::LogLoss: return "log_loss";
        case LossKind::ExpectedUtility: return "expected_utility_loss";
        case LossKind::TeamLoss: return "team_loss";
    }
    return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "log" || name == "log_loss" || name == "logloss") return LossKind::LogLoss;
    if (name == "eu" || name == "expected_utility_loss") return LossKind::ExpectedUtility;
    if (name == "team" || name == "team_loss") return LossKind::TeamLoss;
    throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

LossValue log_loss(const Prediction& pred, Label y) {
    const double h = std::max(pred.prob_of(y), kProbFloor);
    return {-std::log(h), -1.0 / h};
}

LossValue eu_loss(const Prediction& pred, Label y, const HumanPolicy& policy) {
    const double p_accept = accept_probability(pred, policy);
    return {-expected_utility(pred, y, policy), -p_accept * (1.0 + policy.params.beta)};
}

LossValue team_loss(const Prediction& pred, Label y, const HumanPolicy& policy, double offset) {
    const double psi = expected_utility(pred, y, policy);
    const double shifted = std::max(psi + offset, kProbFloor);
    const double d_psi = accept_probability(pred, policy) * (1.0 + policy.params.beta);
    return {-std::log(shifted), d_psi == 0.0 ? 0.0 : -d_psi / shifted};
}

LossValue example_loss(const LossSpec& spec, const Prediction& pred, Label y) {
    switch (spec.kind) {
        case LossKind::LogLoss: return log_loss(pred, y);
        case LossKind::ExpectedUtility: return eu_loss(pred, y, spec.policy);
        case LossKind::TeamLoss: return team_loss(pred, y, spec.policy, spec.offset());
    }
    throw std::logic_error("unhandled loss kind");
}

BatchLoss batch_loss(const Model& model, const Dataset& data,
                     std::span<const std::size_t> indices, const LossSpec& spec,
                     double l2_weight) {
    if (indices.empty()) throw std::invalid_argument("batch_loss needs a non-empty batch");
    BatchLoss out{0.0, GradientBuffer(model)};
    for (std::size_t i : indices) {
        const auto x = data.row(i);
        const Label y = data.label(i);
        const ForwardPass pass = forward_pass(model, x);
        const LossValue l = example_loss(spec, pass.prediction, y);
        out.value += l.value;
        backward(model, pass, x, to_prob1_derivative(l.d_value_d_prob_y, y), out.grads);
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    out.value *= inv;
    out.grads.scale(inv);

    if (l2_weight != 0.0) {
        out.value += l2_weight * model.weight_norm_squared();
        const auto params = model.parameters();
        for (const ParamBlock& b : model.blocks()) {
            if (!b.is_weight) continue;
            for (std::size_t k = b.offset; k < b.offset + b.size(); ++k)
                out.grads[k] += 2.0 * l2_weight * params[k];
        }
    }
    return out;
}

BatchLoss batch_loss(const Model& model, const Dataset& data, const LossSpec& spec,
                     double l2_weight) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return batch_loss(model, data, all, spec, l2_weight);
}

}  // namespace teamopt
