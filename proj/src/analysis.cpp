#include "teamopt/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace teamopt {

Metrics evaluate(const Model& model, const Dataset& data, const HumanPolicy& policy) {
    if (data.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
    std::size_t correct = 0;
    double eu = 0.0;
    double emp = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Prediction pred = forward(model, data.row(i));
        const Label y = data.label(i);
        if (pred.predicted_label() == y) ++correct;
        eu += expected_utility(pred, y, policy);
        emp += empirical_utility(pred, y, policy);
    }
    const double n = static_cast<double>(data.size());
    return {static_cast<double>(correct) / n, eu / n, emp / n};
}

std::size_t bin_index(double value, std::size_t n_bins) {
    const double scaled = std::floor(value * static_cast<double>(n_bins));
    if (!(scaled > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(scaled), n_bins - 1);
}

BehaviorCurves behavior_curves(const Model& model, const Dataset& data,
                               const HumanPolicy& policy, std::size_t n_bins) {
    if (n_bins < 2) throw std::invalid_argument("behavior curves need at least 2 bins");
    if (data.empty()) throw std::invalid_argument("behavior curves need data");

    BehaviorCurves c;
    c.n = data.size();
    c.threshold = policy.threshold();
    for (std::size_t b = 0; b <= n_bins; ++b)
        c.edges.push_back(static_cast<double>(b) / static_cast<double>(n_bins));
    c.confidence_hist.assign(n_bins, 0);
    c.accuracy_density.assign(n_bins, 0.0);
    c.utility_density.assign(n_bins, 0.0);
    std::vector<std::size_t> correct_by_conf(n_bins, 0);
    std::size_t accepted = 0;

    for (std::size_t i = 0; i < data.size(); ++i) {
        const Prediction pred = forward(model, data.row(i));
        const Label y = data.label(i);
        const bool correct = pred.predicted_label() == y;
        const double psi = expected_utility(pred, y, policy);

        const std::size_t cb = bin_index(pred.confidence(), n_bins);
        ++c.confidence_hist[cb];
        if (correct) ++correct_by_conf[cb];

        const std::size_t yb = bin_index(pred.prob_of(y), n_bins);
        if (correct) c.accuracy_density[yb] += 1.0;
        c.utility_density[yb] += psi;

        if (in_accept_region(pred, policy)) {
            ++accepted;
            if (correct) c.accept_accuracy_mass += 1.0;
            c.accept_utility_mass += psi;
        } else {
            if (correct) c.solve_accuracy_mass += 1.0;
            c.solve_utility_mass += psi;
        }
    }

    const double n = static_cast<double>(data.size());
    for (std::size_t b = 0; b < n_bins; ++b) {
        c.accuracy_density[b] /= n;
        c.utility_density[b] /= n;
        if (c.confidence_hist[b] == 0)
            c.reliability.push_back(std::nullopt);
        else
            c.reliability.push_back(static_cast<double>(correct_by_conf[b]) /
                                    static_cast<double>(c.confidence_hist[b]));
    }
    c.accept_fraction = static_cast<double>(accepted) / n;
    c.accept_accuracy_mass /= n;
    c.accept_utility_mass /= n;
    c.solve_accuracy_mass /= n;
    c.solve_utility_mass /= n;
    return c;
}

BehaviorReport behavior_report(const Model& model, const Dataset& data,
                               const HumanPolicy& policy, std::size_t n_bins) {
    return {evaluate(model, data, policy), behavior_curves(model, data, policy, n_bins)};
}

BehaviorDiff compare_reports(const BehaviorReport& baseline, const BehaviorReport& team) {
    const BehaviorCurves& a = baseline.curves;
    const BehaviorCurves& b = team.curves;
    if (a.edges != b.edges) throw std::invalid_argument("cannot compare curves with different binning");

    BehaviorDiff d;
    d.metrics = {team.metrics.accuracy - baseline.metrics.accuracy,
                 team.metrics.expected_utility - baseline.metrics.expected_utility,
                 team.metrics.empirical_utility - baseline.metrics.empirical_utility};
    for (std::size_t k = 0; k < a.n_bins(); ++k) {
        if (a.reliability[k] && b.reliability[k])
            d.reliability.push_back(*b.reliability[k] - *a.reliability[k]);
        else
            d.reliability.push_back(std::nullopt);
        // V2 as a fraction so datasets of different size remain comparable.
        d.confidence_hist.push_back(static_cast<double>(b.confidence_hist[k]) / static_cast<double>(b.n) -
                                    static_cast<double>(a.confidence_hist[k]) / static_cast<double>(a.n));
        d.accuracy_density.push_back(b.accuracy_density[k] - a.accuracy_density[k]);
        d.utility_density.push_back(b.utility_density[k] - a.utility_density[k]);
    }
    d.accept_fraction = b.accept_fraction - a.accept_fraction;
    d.accept_accuracy_mass = b.accept_accuracy_mass - a.accept_accuracy_mass;
    d.accept_utility_mass = b.accept_utility_mass - a.accept_utility_mass;
    d.solve_accuracy_mass = b.solve_accuracy_mass - a.solve_accuracy_mass;
    d.solve_utility_mass = b.solve_utility_mass - a.solve_utility_mass;
    return d;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_curves_csv(const BehaviorCurves& curves, std::ostream& out) {
    out << "bin_lo,bin_hi,v1,v2,v3,v4\n";
    for (std::size_t k = 0; k < curves.n_bins(); ++k) {
        out << fmt(curves.edges[k]) << ',' << fmt(curves.edges[k + 1]) << ',';
        if (curves.reliability[k]) out << fmt(*curves.reliability[k]);
        out << ',' << curves.confidence_hist[k] << ',' << fmt(curves.accuracy_density[k]) << ','
            << fmt(curves.utility_density[k]) << '\n';
    }
}

}  // namespace teamopt
