#include "teamopt/team_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace teamopt {

void UtilityParams::validate() const {
    if (!std::isfinite(beta) || beta < 1.0)
        throw std::invalid_argument("beta must be >= 1, got " + std::to_string(beta));
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("lambda must be >= 0, got " + std::to_string(lambda));
    if (!(human_accuracy >= 0.0 && human_accuracy <= 1.0))
        throw std::invalid_argument("human accuracy must lie in [0, 1], got " +
                                    std::to_string(human_accuracy));
}

double UtilityParams::solve_utility() const {
    return (1.0 + beta) * human_accuracy - beta - lambda;
}

double accept_threshold(const UtilityParams& params) {
    return params.human_accuracy - params.lambda / (1.0 + params.beta);
}

void HumanPolicy::validate() const {
    params.validate();
    if (!(accept_probability > 0.0 && accept_probability <= 1.0))
        throw std::invalid_argument("accept probability must lie in (0, 1], got " +
                                    std::to_string(accept_probability));
}

Prediction Prediction::from_positive(double p1) {
    Prediction pred;
    pred.probs = {1.0 - p1, p1};
    return pred;
}

bool in_accept_region(const Prediction& pred, const HumanPolicy& policy) {
    return pred.confidence() >= policy.threshold();
}

double accept_probability(const Prediction& pred, const HumanPolicy& policy) {
    return in_accept_region(pred, policy) ? policy.accept_probability : 0.0;
}

MetaDecision meta_decision(const Prediction& pred, const HumanPolicy& policy,
                           double uniform_draw) {
    if (!in_accept_region(pred, policy)) return MetaDecision::Solve;
    return uniform_draw < policy.accept_probability ? MetaDecision::Accept
                                                    : MetaDecision::Solve;
}

double payoff(MetaDecision meta, bool final_correct, const UtilityParams& params) {
    const double reward = final_correct ? 1.0 : -params.beta;
    return meta == MetaDecision::Accept ? reward : reward - params.lambda;
}

double expected_utility(const Prediction& pred, Label true_label,
                        const HumanPolicy& policy) {
    const UtilityParams& u = policy.params;
    const double solve = u.solve_utility();
    const double p_accept = accept_probability(pred, policy);
    if (p_accept == 0.0) return solve;
    const double accept = (1.0 + u.beta) * pred.prob_of(true_label) - u.beta;
    if (p_accept == 1.0) return accept;
    return p_accept * accept + (1.0 - p_accept) * solve;
}

namespace {

double expected_solve_payoff(const UtilityParams& u) {
    const double a = u.human_accuracy;
    return a * payoff(MetaDecision::Solve, true, u) +
           (1.0 - a) * payoff(MetaDecision::Solve, false, u);
}

}  // namespace

double empirical_utility(const Prediction& pred, Label true_label,
                         const HumanPolicy& policy, SolveMode mode,
                         std::mt19937_64& rng) {
    const UtilityParams& u = policy.params;
    const bool ai_correct = pred.predicted_label() == true_label;

    if (mode == SolveMode::Expectation) {
        const double p_accept = accept_probability(pred, policy);
        const double solve = expected_solve_payoff(u);
        if (p_accept == 0.0) return solve;
        const double accept = payoff(MetaDecision::Accept, ai_correct, u);
        if (p_accept == 1.0) return accept;
        return p_accept * accept + (1.0 - p_accept) * solve;
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const MetaDecision meta = meta_decision(pred, policy, unit(rng));
    if (meta == MetaDecision::Accept) return payoff(meta, ai_correct, u);
    const bool human_correct = unit(rng) < u.human_accuracy;
    return payoff(meta, human_correct, u);
}

double empirical_utility(const Prediction& pred, Label true_label,
                         const HumanPolicy& policy) {
    std::mt19937_64 unused(0);
    return empirical_utility(pred, true_label, policy, SolveMode::Expectation, unused);
}

}  // namespace teamopt
