#pragma once

#include <array>
#include <random>

namespace teamopt {

using Label = int;

// Domain parameters of the accept-or-solve team.
//
//   beta            penalty for an incorrect final decision (>= 1)
//   lambda          cost of the Solve meta-decision (>= 0)
//   human_accuracy  probability the human is correct when solving (a)
struct UtilityParams {
    double beta = 1.0;
    double lambda = 0.5;
    double human_accuracy = 1.0;

    // Throws std::invalid_argument when a field is out of range.
    void validate() const;

    // Expected utility of the Solve branch: (1+beta)*a - beta - lambda.
    double solve_utility() const;
};

// Minimum confidence at which a rational human accepts: a - lambda/(1+beta).
// May fall outside [0.5, 1]; the policy then always or never accepts.
double accept_threshold(const UtilityParams& params);

// Threshold policy. Above the threshold the human accepts with probability
// accept_probability (1.0 models the rational user).
struct HumanPolicy {
    UtilityParams params;
    double accept_probability = 1.0;

    void validate() const;
    double threshold() const { return accept_threshold(params); }
};

// Classifier output over the two labels. probs[1] is P(label = 1).
struct Prediction {
    std::array<double, 2> probs{0.5, 0.5};

    static Prediction from_positive(double p1);

    // Argmax; a 0.5/0.5 tie resolves to label 0 (first index).
    Label predicted_label() const { return probs[1] > probs[0] ? 1 : 0; }
    double confidence() const { return probs[predicted_label()]; }
    double prob_of(Label y) const { return probs[y == 1 ? 1 : 0]; }
};

enum class MetaDecision { Accept, Solve };

// P(m = Accept | prediction): 0 below the threshold, accept_probability at
// or above it.
double accept_probability(const Prediction& pred, const HumanPolicy& policy);

bool in_accept_region(const Prediction& pred, const HumanPolicy& policy);

MetaDecision meta_decision(const Prediction& pred, const HumanPolicy& policy,
                           double uniform_draw);

double payoff(MetaDecision meta, bool final_correct, const UtilityParams& params);

// Expected team utility psi(x, y) for one example.
double expected_utility(const Prediction& pred, Label true_label,
                        const HumanPolicy& policy);

enum class SolveMode { Expectation, Sampled };

// Discrete payoff realized by the team. In Expectation mode the human's
// correctness (and, for p < 1, the accept coin) is averaged out instead of
// drawn, which makes the result a deterministic function of its inputs.
double empirical_utility(const Prediction& pred, Label true_label,
                         const HumanPolicy& policy, SolveMode mode,
                         std::mt19937_64& rng);

double empirical_utility(const Prediction& pred, Label true_label,
                         const HumanPolicy& policy);

}  // namespace teamopt
