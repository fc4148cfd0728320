#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "teamopt/classifiers.hpp"
#include "teamopt/data.hpp"
#include "teamopt/team_model.hpp"

namespace teamopt {

struct Metrics {
    double accuracy = 0.0;
    double expected_utility = 0.0;   // mean psi
    double empirical_utility = 0.0;  // mean payoff, expectation-mode solve branch
};

// Throws std::invalid_argument for an empty dataset.
Metrics evaluate(const Model& model, const Dataset& data, const HumanPolicy& policy);

// Binned diagnostics over [0, 1]. Bins are equal width; the last one is
// right-closed.
//
//   reliability       (V1) accuracy per confidence bin, nullopt when empty
//   confidence_hist   (V2) count of predictions per confidence bin
//   accuracy_density  (V3) correct count per h[y] bin, divided by N
//   utility_density   (V4) sum of psi per h[y] bin, divided by N
//
// Sum(V3) is the accuracy and Sum(V4) the expected utility of the same
// model on the same data. The accept/solve masses use exact per-example
// policy membership rather than bin edges.
struct BehaviorCurves {
    std::vector<double> edges;  // n_bins + 1
    std::vector<std::optional<double>> reliability;
    std::vector<std::size_t> confidence_hist;
    std::vector<double> accuracy_density;
    std::vector<double> utility_density;

    std::size_t n = 0;
    double threshold = 0.0;
    double accept_fraction = 0.0;
    double accept_accuracy_mass = 0.0;  // #(accepted and correct) / N
    double accept_utility_mass = 0.0;   // sum of psi over accepted / N
    double solve_accuracy_mass = 0.0;
    double solve_utility_mass = 0.0;

    std::size_t n_bins() const { return confidence_hist.size(); }
};

std::size_t bin_index(double value, std::size_t n_bins);

// Throws std::invalid_argument when n_bins < 2 or data is empty.
BehaviorCurves behavior_curves(const Model& model, const Dataset& data,
                               const HumanPolicy& policy, std::size_t n_bins = 20);

struct BehaviorReport {
    Metrics metrics;
    BehaviorCurves curves;
};

BehaviorReport behavior_report(const Model& model, const Dataset& data,
                               const HumanPolicy& policy, std::size_t n_bins = 20);

// team - baseline, per bin and in aggregate. A V1 delta is nullopt whenever
// either side has an empty bin.
struct BehaviorDiff {
    Metrics metrics;
    std::vector<std::optional<double>> reliability;
    std::vector<double> confidence_hist;
    std::vector<double> accuracy_density;
    std::vector<double> utility_density;
    double accept_fraction = 0.0;
    double accept_accuracy_mass = 0.0;
    double accept_utility_mass = 0.0;
    double solve_accuracy_mass = 0.0;
    double solve_utility_mass = 0.0;
};

// Throws std::invalid_argument when the two reports were binned differently.
BehaviorDiff compare_reports(const BehaviorReport& baseline, const BehaviorReport& team);

// CSV with header bin_lo,bin_hi,v1,v2,v3,v4; empty V1 bins are written as
// an empty cell.
void write_curves_csv(const BehaviorCurves& curves, std::ostream& out);

}  // namespace teamopt
