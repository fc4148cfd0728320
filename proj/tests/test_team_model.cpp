#include <doctest.h>

#include <cmath>
#include <random>

#include "teamopt/analysis.hpp"
#include "teamopt/data.hpp"
#include "teamopt/exhaustive.hpp"
#include "teamopt/team_model.hpp"

using namespace teamopt;

namespace {

HumanPolicy policy(double beta, double lambda, double a, double p = 1.0) {
    return HumanPolicy{UtilityParams{beta, lambda, a}, p};
}

}  // namespace

TEST_CASE("accept threshold values") {
    CHECK(accept_threshold({1.0, 0.5, 1.0}) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(accept_threshold({1.0, 0.5, 0.8}) == doctest::Approx(0.55).epsilon(1e-15));
    CHECK(accept_threshold({1.0, 0.0, 1.0}) == 1.0);
    CHECK(std::abs(accept_threshold({5.0, 0.5, 1.0}) - 11.0 / 12.0) < 1e-15);
}

TEST_CASE("accept threshold monotonicity on a grid") {
    for (double beta : {1.0, 2.0, 5.0, 10.0})
        for (double lambda : {0.1, 0.5, 1.0})
            for (double a : {0.2, 0.6, 0.9}) {
                const double c = accept_threshold({beta, lambda, a});
                CHECK(accept_threshold({beta, lambda + 0.05, a}) < c);
                CHECK(accept_threshold({beta, lambda, a + 0.05}) > c);
                CHECK(accept_threshold({beta + 0.5, lambda, a}) > c);
            }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(UtilityParams({0.5, 0.5, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(UtilityParams({1.0, -0.1, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(UtilityParams({1.0, 0.5, 1.1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(policy(1, 0.5, 1, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(policy(1, 0.5, 1, 1.5).validate(), std::invalid_argument);
    CHECK_NOTHROW(policy(1, 0.5, 1, 0.3).validate());
}

TEST_CASE("meta decision follows the threshold with >= at the boundary") {
    const HumanPolicy pol = policy(1, 0.5, 1);
    for (double draw : {0.0, 0.5, 0.999}) {
        CHECK(meta_decision(Prediction::from_positive(0.9), pol, draw) == MetaDecision::Accept);
        CHECK(meta_decision(Prediction::from_positive(0.6), pol, draw) == MetaDecision::Solve);
        CHECK(meta_decision(Prediction::from_positive(0.75), pol, draw) == MetaDecision::Accept);
        CHECK(meta_decision(Prediction::from_positive(0.25), pol, draw) == MetaDecision::Accept);
    }
    const HumanPolicy lazy = policy(1, 0.5, 1, 0.3);
    CHECK(meta_decision(Prediction::from_positive(0.9), lazy, 0.29) == MetaDecision::Accept);
    CHECK(meta_decision(Prediction::from_positive(0.9), lazy, 0.3) == MetaDecision::Solve);
}

TEST_CASE("prediction ties resolve to label 0") {
    const Prediction p = Prediction::from_positive(0.5);
    CHECK(p.predicted_label() == 0);
    CHECK(p.confidence() == 0.5);
}

TEST_CASE("payoff matrix") {
    const UtilityParams u{1.0, 0.5, 1.0};
    CHECK(payoff(MetaDecision::Accept, true, u) == 1.0);
    CHECK(payoff(MetaDecision::Accept, false, u) == -1.0);
    CHECK(payoff(MetaDecision::Solve, true, u) == 0.5);
    CHECK(payoff(MetaDecision::Solve, false, u) == -1.5);
}

TEST_CASE("expected utility examples") {
    const HumanPolicy pol = policy(1, 0.5, 1);
    CHECK(expected_utility(Prediction::from_positive(1.0), 1, pol) == 1.0);
    CHECK(expected_utility(Prediction::from_positive(0.6), 1, pol) == 0.5);
    CHECK(expected_utility(Prediction::from_positive(1.0), 0, pol) == -1.0);
    CHECK(expected_utility(Prediction::from_positive(0.75), 1, pol) == 0.5);
}

TEST_CASE("expected utility is piecewise affine and finite") {
    const HumanPolicy pol = policy(3, 0.7, 0.9);
    const double c = pol.threshold();
    const double solve = pol.params.solve_utility();
    for (int i = 0; i <= 1000; ++i) {
        const double h = i / 1000.0;
        const double psi = expected_utility(Prediction::from_positive(h), 1, pol);
        REQUIRE(std::isfinite(psi));
        if (std::max(h, 1.0 - h) >= c)
            CHECK(psi == doctest::Approx(4.0 * h - 3.0).epsilon(1e-14));
        else
            CHECK(psi == solve);
    }
}

TEST_CASE("boundary identity holds for random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> beta(1.0, 20.0), lambda(0.0, 3.0), a(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const UtilityParams u{beta(rng), lambda(rng), a(rng)};
        const double c = accept_threshold(u);
        CHECK(std::abs((1.0 + u.beta) * c - u.beta - u.solve_utility()) < 1e-12);
    }
}

TEST_CASE("lazy acceptance mixes the two branches") {
    const HumanPolicy pol = policy(1, 0.5, 0.8, 0.4);
    const Prediction pred = Prediction::from_positive(0.9);
    const double accept = 2.0 * 0.9 - 1.0;
    const double solve = pol.params.solve_utility();
    CHECK(expected_utility(pred, 1, pol) == doctest::Approx(0.4 * accept + 0.6 * solve));
    CHECK(expected_utility(Prediction::from_positive(0.52), 1, pol) == solve);
}

TEST_CASE("empirical utility, expectation mode") {
    const HumanPolicy sure = policy(1, 0.5, 1);
    CHECK(empirical_utility(Prediction::from_positive(0.9), 1, sure) == 1.0);
    CHECK(empirical_utility(Prediction::from_positive(0.9), 0, sure) == -1.0);
    CHECK(empirical_utility(Prediction::from_positive(0.6), 1, sure) == 0.5);
    const HumanPolicy fallible = policy(1, 0.5, 0.8);
    CHECK(empirical_utility(Prediction::from_positive(0.52), 1, fallible) ==
          doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("sampled empirical utility agrees with expectation mode") {
    // Monte-Carlo oracle: 1e5 sampled draws per case.
    struct Case {
        HumanPolicy pol;
        double p1;
    };
    const Case cases[] = {{policy(1, 0.5, 0.8), 0.52},
                          {policy(2, 0.3, 0.7), 0.55},
                          {policy(1, 0.5, 0.9, 0.5), 0.95}};
    std::mt19937_64 rng(2024);
    for (const Case& c : cases) {
        const Prediction pred = Prediction::from_positive(c.p1);
        const double exact = empirical_utility(pred, 1, c.pol);
        constexpr int n = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = empirical_utility(pred, 1, c.pol, SolveMode::Sampled, rng);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double sd = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0));
        CHECK(std::abs(mean - exact) <= 3.0 * sd / std::sqrt(double(n)) + 1e-12);
    }
}

TEST_CASE("higher accuracy does not imply higher expected utility") {
    // Two fixed predictors on Scenario1: a soft boundary between the majority
    // blobs versus a sharp boundary pushed past blob A.
    const Dataset data = gen_scenario1(10000, 3);
    const HumanPolicy pol = policy(1, 0.5, 1);
    const Metrics soft = evaluate(linear_candidate(0.0, 0.0, 0.25), data, pol);
    const Metrics sharp = evaluate(linear_candidate(0.0, 1.0, 16.0), data, pol);
    CHECK(soft.accuracy > sharp.accuracy);
    CHECK(soft.expected_utility < sharp.expected_utility);
}
