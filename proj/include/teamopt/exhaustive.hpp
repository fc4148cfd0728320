#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "teamopt/analysis.hpp"
#include "teamopt/classifiers.hpp"
#include "teamopt/data.hpp"
#include "teamopt/optim.hpp"
#include "teamopt/team_model.hpp"

namespace teamopt {

// Enumerated 2-D logistic models w = s * (cos theta, sin theta),
// b = -s * offset. Enumeration order: angle (outer), offset, sharpness (inner).
struct LinearGrid {
    std::size_t angle_steps = 180;
    std::size_t offset_steps = 101;
    double offset_min = -3.0;
    double offset_max = 3.0;
    std::vector<double> sharpness{0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};

    std::size_t size() const { return angle_steps * offset_steps * sharpness.size(); }
    double angle(std::size_t i) const;
    double offset(std::size_t j) const;

    // Throws std::invalid_argument for an empty grid or non-positive sharpness.
    void validate() const;
};

Model linear_candidate(double theta, double offset, double sharpness);

enum class SearchObjective { ExpectedUtility, EmpiricalUtility };

// Mutual information (nats) between a 10-quantile binning of one feature and
// the label.
double binned_mutual_information(const Dataset& data, std::size_t feature,
                                 std::size_t n_bins = 10);

// Two most informative features, ordered by rank (ties go to the lower index).
// Datasets with fewer than 3 features return (0, 1).
std::pair<std::size_t, std::size_t> select_top2_features(const Dataset& data);

struct SearchResult {
    Model model;
    double objective = 0.0;
    std::size_t candidate_index = 0;
    double theta = 0.0;
    double offset = 0.0;
    double sharpness = 0.0;
};

// Argmax of the mean objective over the grid; ties keep the first-enumerated
// candidate. Requires exactly two features. `jobs` threads split the angles.
SearchResult exhaustive_search(const Dataset& data2d, SearchObjective objective,
                               const HumanPolicy& policy, const LinearGrid& grid,
                               int jobs = 1);

// One row of the brute-force comparison against a log-loss linear model.
// All values are measured on the test split.
struct ExhaustiveRow {
    std::uint64_t seed = 0;
    std::pair<std::size_t, std::size_t> features{0, 1};
    Metrics logloss;              // gradient-trained log-loss model
    Metrics eu_search;            // exhaustive search on expected utility
    Metrics emp_search;           // exhaustive search on empirical utility
    double train_emp_of_eu_search = 0.0;
    double train_emp_of_emp_search = 0.0;

    double delta_eu() const { return eu_search.expected_utility - logloss.expected_utility; }          // A
    double delta_emp() const { return eu_search.empirical_utility - logloss.empirical_utility; }      // B
    double delta_star_emp() const { return emp_search.empirical_utility - logloss.empirical_utility; } // C
};

struct ExhaustiveOptions {
    std::size_t n_seeds = 10;
    std::uint64_t base_seed = 0;
    double test_fraction = 0.2;
    double val_fraction = 0.2;
    LinearGrid grid;
    TrainConfig logloss_config;
    int jobs = 1;
};

// Per seed: 80/20 split, standardization on train, top-2 feature selection,
// log-loss linear training, and both exhaustive searches on the train split.
std::vector<ExhaustiveRow> compare_exhaustive(const Dataset& data, const HumanPolicy& policy,
                                              const ExhaustiveOptions& options);

// Header: dataset,EU_logloss,Emp_logloss,dEU_A,dEmp_B,dStarEmp_C (seed means).
void write_exhaustive_csv(const std::string& dataset_name, const std::vector<ExhaustiveRow>& rows,
                          std::ostream& out, bool with_header = true);

}  // namespace teamopt
