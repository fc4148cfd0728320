#include "teamopt/exhaustive.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "teamopt/parallel.hpp"

namespace teamopt {

double LinearGrid::angle(std::size_t i) const {
    return 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(angle_steps);
}

double LinearGrid::offset(std::size_t j) const {
    if (offset_steps == 1) return 0.5 * (offset_min + offset_max);
    return offset_min + (offset_max - offset_min) * static_cast<double>(j) /
                            static_cast<double>(offset_steps - 1);
}

void LinearGrid::validate() const {
    if (angle_steps == 0 || offset_steps == 0 || sharpness.empty())
        throw std::invalid_argument("exhaustive search grid is empty");
    for (double s : sharpness)
        if (!(s > 0.0)) throw std::invalid_argument("sharpness values must be positive");
    if (offset_max < offset_min) throw std::invalid_argument("offset range is inverted");
}

Model linear_candidate(double theta, double offset, double sharpness) {
    const std::array<double, 2> w{sharpness * std::cos(theta), sharpness * std::sin(theta)};
    return Model::linear(w, -sharpness * offset);
}

double binned_mutual_information(const Dataset& data, std::size_t feature, std::size_t n_bins) {
    const std::size_t n = data.size();
    if (n == 0) return 0.0;
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = data.feature(i, feature);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    // Interior quantile edges; equal values always land in the same bin.
    std::vector<double> edges;
    for (std::size_t k = 1; k < n_bins; ++k) edges.push_back(sorted[k * n / n_bins]);

    std::vector<std::array<double, 2>> joint(n_bins, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const auto bin = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), values[i]) - edges.begin());
        joint[bin][data.label(i) == 1 ? 1 : 0] += 1.0;
    }
    const double total = static_cast<double>(n);
    const double py1 = data.positive_fraction();
    const std::array<double, 2> py{1.0 - py1, py1};
    double mi = 0.0;
    for (const auto& cell : joint) {
        const double pb = (cell[0] + cell[1]) / total;
        for (int y = 0; y < 2; ++y) {
            const double pxy = cell[y] / total;
            if (pxy > 0.0) mi += pxy * std::log(pxy / (pb * py[y]));
        }
    }
    return std::max(mi, 0.0);
}

std::pair<std::size_t, std::size_t> select_top2_features(const Dataset& data) {
    if (data.n_features() < 3) return {0, 1};
    std::vector<double> mi(data.n_features());
    for (std::size_t j = 0; j < mi.size(); ++j) mi[j] = binned_mutual_information(data, j);
    std::vector<std::size_t> order(mi.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mi[a] > mi[b]; });
    return {order[0], order[1]};
}

namespace {

struct Candidate {
    double objective = -std::numeric_limits<double>::infinity();
    std::size_t index = 0;
    bool valid = false;
};

// Per-example payoffs that do not depend on the candidate.
struct ObjectiveTerms {
    SearchObjective objective;
    double threshold;
    double accept_probability;
    double beta;
    double solve_value;  // psi or expected payoff of the Solve branch

    ObjectiveTerms(SearchObjective obj, const HumanPolicy& policy)
        : objective(obj),
          threshold(policy.threshold()),
          accept_probability(policy.accept_probability),
          beta(policy.params.beta) {
        const UtilityParams& u = policy.params;
        solve_value = obj == SearchObjective::ExpectedUtility
                          ? u.solve_utility()
                          : u.human_accuracy * payoff(MetaDecision::Solve, true, u) +
                                (1.0 - u.human_accuracy) * payoff(MetaDecision::Solve, false, u);
    }
};

// Mean objective of one candidate. The arithmetic mirrors forward() followed
// by expected_utility()/empirical_utility(), in the same summation order, so
// results are bit-identical to evaluating the candidate model directly.
double candidate_objective(std::span<const double> x0, std::span<const double> x1,
                           std::span<const Label> labels, double w0, double w1, double bias,
                           const ObjectiveTerms& t) {
    double total = 0.0;
    const std::size_t n = labels.size();
    const bool eu = t.objective == SearchObjective::ExpectedUtility;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        acc += w0 * x0[i];
        acc += w1 * x1[i];
        const double z = std::clamp(acc + bias, -kLogitClamp, kLogitClamp);
        const double e = std::exp(-std::abs(z));
        const double hi = 1.0 / (1.0 + e);
        const double lo = e / (1.0 + e);
        const double p1 = z >= 0.0 ? hi : lo;
        const double p0 = z >= 0.0 ? lo : hi;
        const Label predicted = p1 > p0 ? 1 : 0;
        double value = t.solve_value;
        if ((predicted == 1 ? p1 : p0) >= t.threshold) {
            const double accept = eu ? (1.0 + t.beta) * (labels[i] == 1 ? p1 : p0) - t.beta
                                     : (predicted == labels[i] ? 1.0 : -t.beta);
            value = t.accept_probability == 1.0
                        ? accept
                        : t.accept_probability * accept + (1.0 - t.accept_probability) * t.solve_value;
        }
        total += value;
    }
    return total / static_cast<double>(n);
}

}  // namespace

SearchResult exhaustive_search(const Dataset& data2d, SearchObjective objective,
                               const HumanPolicy& policy, const LinearGrid& grid, int jobs) {
    grid.validate();
    if (data2d.n_features() != 2) throw std::invalid_argument("exhaustive search needs exactly 2 features");
    if (data2d.empty()) throw std::invalid_argument("exhaustive search needs data");

    std::vector<double> x0(data2d.size()), x1(data2d.size());
    for (std::size_t i = 0; i < data2d.size(); ++i) {
        x0[i] = data2d.feature(i, 0);
        x1[i] = data2d.feature(i, 1);
    }
    const std::size_t per_angle = grid.offset_steps * grid.sharpness.size();

    const ObjectiveTerms terms(objective, policy);
    std::vector<Candidate> best_per_angle(grid.angle_steps);
    parallel_for(grid.angle_steps, jobs, [&](std::size_t a) {
        const double theta = grid.angle(a);
        Candidate best;
        for (std::size_t o = 0; o < grid.offset_steps; ++o) {
            const double off = grid.offset(o);
            for (std::size_t k = 0; k < grid.sharpness.size(); ++k) {
                const Model m = linear_candidate(theta, off, grid.sharpness[k]);
                const auto p = m.parameters();
                const double value = candidate_objective(x0, x1, data2d.labels(), p[0], p[1], p[2], terms);
                if (!best.valid || value > best.objective) {
                    best = {value, a * per_angle + o * grid.sharpness.size() + k, true};
                }
            }
        }
        best_per_angle[a] = best;
    });

    Candidate best;
    for (const Candidate& c : best_per_angle)
        if (!best.valid || c.objective > best.objective) best = c;

    SearchResult r;
    const std::size_t a = best.index / per_angle;
    const std::size_t o = (best.index % per_angle) / grid.sharpness.size();
    const std::size_t k = best.index % grid.sharpness.size();
    r.theta = grid.angle(a);
    r.offset = grid.offset(o);
    r.sharpness = grid.sharpness[k];
    r.model = linear_candidate(r.theta, r.offset, r.sharpness);
    r.objective = best.objective;
    r.candidate_index = best.index;
    return r;
}

std::vector<ExhaustiveRow> compare_exhaustive(const Dataset& data, const HumanPolicy& policy,
                                              const ExhaustiveOptions& options) {
    policy.validate();
    std::vector<ExhaustiveRow> rows(options.n_seeds);
    const LossSpec logloss{LossKind::LogLoss, policy, std::nullopt};

    for (std::size_t s = 0; s < options.n_seeds; ++s) {
        const std::uint64_t seed = options.base_seed + s;
        const std::array<double, 2> outer{1.0 - options.test_fraction, options.test_fraction};
        const auto parts = split(data, outer, seed);
        const std::array<Dataset, 1> test_only{parts[1]};
        auto standardized = standardize(parts[0], test_only);
        const auto features = select_top2_features(standardized[0]);
        const std::array<std::size_t, 2> cols{features.first, features.second};
        const Dataset train = standardized[0].select_features(cols);
        const Dataset test = standardized[1].select_features(cols);

        const std::array<double, 2> inner{1.0 - options.val_fraction, options.val_fraction};
        const auto fit_parts = split(train, inner, seed ^ 0x9e3779b97f4a7c15ULL);
        TrainConfig cfg = options.logloss_config;
        cfg.checkpoint_metric = CheckpointMetric::Accuracy;
        cfg.seed = seed;
        const TrainResult ll = teamopt::train(init_model(ModelKind::Linear, 2, seed), fit_parts[0],
                                              fit_parts[1], logloss, cfg);

        const SearchResult eu = exhaustive_search(train, SearchObjective::ExpectedUtility, policy,
                                                  options.grid, options.jobs);
        const SearchResult emp = exhaustive_search(train, SearchObjective::EmpiricalUtility, policy,
                                                   options.grid, options.jobs);

        ExhaustiveRow& row = rows[s];
        row.seed = seed;
        row.features = features;
        row.logloss = evaluate(ll.best_model, test, policy);
        row.eu_search = evaluate(eu.model, test, policy);
        row.emp_search = evaluate(emp.model, test, policy);
        row.train_emp_of_eu_search = evaluate(eu.model, train, policy).empirical_utility;
        row.train_emp_of_emp_search = emp.objective;
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_exhaustive_csv(const std::string& dataset_name, const std::vector<ExhaustiveRow>& rows,
                          std::ostream& out, bool with_header) {
    if (with_header) out << "dataset,EU_logloss,Emp_logloss,dEU_A,dEmp_B,dStarEmp_C\n";
    if (rows.empty()) return;
    double eu = 0.0, emp = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (const auto& r : rows) {
        eu += r.logloss.expected_utility;
        emp += r.logloss.empirical_utility;
        a += r.delta_eu();
        b += r.delta_emp();
        c += r.delta_star_emp();
    }
    const double n = static_cast<double>(rows.size());
    out << dataset_name << ',' << fmt(eu / n) << ',' << fmt(emp / n) << ',' << fmt(a / n) << ','
        << fmt(b / n) << ',' << fmt(c / n) << '\n';
}

}  // namespace teamopt
