#include "teamopt/serialization.hpp"

#include <array>
#include <fstream>
#include <stdexcept>
#include <string>

namespace teamopt {

using nlohmann::json;

namespace {

const std::array<const char*, 2> kLinearBlocks{"weights", "bias"};
const std::array<const char*, 6> kMlpBlocks{"layer1_weights", "layer1_bias", "layer2_weights",
                                            "layer2_bias",    "output_weights", "output_bias"};

const char* block_name(ModelKind kind, std::size_t i) {
    return kind == ModelKind::Linear ? kLinearBlocks.at(i) : kMlpBlocks.at(i);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json model_to_json(const Model& model, const std::optional<Standardization>& stats) {
    json j;
    j["kind"] = std::string(to_string(model.kind()));
    j["n_features"] = model.n_features();
    for (std::size_t i = 0; i < model.blocks().size(); ++i) {
        const auto block = model.block(i);
        j[block_name(model.kind(), i)] = std::vector<double>(block.begin(), block.end());
    }
    if (stats) j["standardization"] = {{"mean", stats->mean}, {"stddev", stats->stddev}};
    return j;
}

Model model_from_json(const json& j) {
    try {
        const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
        const auto n = j.at("n_features").get<std::size_t>();
        Model m = kind == ModelKind::Linear ? Model::linear(n) : Model::mlp(n);
        for (std::size_t i = 0; i < m.blocks().size(); ++i) {
            const auto values = j.at(block_name(kind, i)).get<std::vector<double>>();
            auto block = m.mutable_block(i);
            if (values.size() != block.size())
                throw std::invalid_argument(std::string("model block '") + block_name(kind, i) +
                                            "' has " + std::to_string(values.size()) +
                                            " values, expected " + std::to_string(block.size()));
            std::copy(values.begin(), values.end(), block.begin());
        }
        if (!m.all_finite()) throw std::invalid_argument("model contains non-finite parameters");
        return m;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed model document: ") + e.what());
    }
}

std::optional<Standardization> standardization_from_json(const json& j) {
    if (!j.contains("standardization")) return std::nullopt;
    const json& s = j.at("standardization");
    Standardization out{s.at("mean").get<std::vector<double>>(),
                        s.at("stddev").get<std::vector<double>>()};
    if (out.mean.size() != out.stddev.size())
        throw std::invalid_argument("standardization mean/stddev length mismatch");
    return out;
}

json to_json(const Metrics& m) {
    return {{"accuracy", m.accuracy},
            {"expected_utility", m.expected_utility},
            {"empirical_utility", m.empirical_utility}};
}

json to_json(const UtilityParams& p) {
    return {{"beta", p.beta},
            {"lambda", p.lambda},
            {"a", p.human_accuracy},
            {"threshold", accept_threshold(p)}};
}

json to_json(const TrainConfig& c) {
    return {{"learning_rate", c.learning_rate},
            {"l2_weight", c.l2_weight},
            {"batch_size", c.batch_size},
            {"scheduler_decay", c.scheduler_decay},
            {"scheduler_patience", c.scheduler_patience},
            {"max_epochs", c.max_epochs},
            {"checkpoint_metric", std::string(to_string(c.checkpoint_metric))},
            {"seed", c.seed}};
}

json to_json(const BehaviorCurves& c) {
    json rel = json::array();
    for (const auto& v : c.reliability) rel.push_back(optional_number(v));
    return {{"edges", c.edges},
            {"v1_reliability", rel},
            {"v2_confidence_hist", c.confidence_hist},
            {"v3_accuracy_density", c.accuracy_density},
            {"v4_utility_density", c.utility_density},
            {"n", c.n},
            {"threshold", c.threshold},
            {"accept_fraction", c.accept_fraction},
            {"accept_accuracy_mass", c.accept_accuracy_mass},
            {"accept_utility_mass", c.accept_utility_mass},
            {"solve_accuracy_mass", c.solve_accuracy_mass},
            {"solve_utility_mass", c.solve_utility_mass}};
}

json to_json(const BehaviorDiff& d) {
    json rel = json::array();
    for (const auto& v : d.reliability) rel.push_back(optional_number(v));
    return {{"metrics", to_json(d.metrics)},
            {"v1_reliability", rel},
            {"v2_confidence_fraction", d.confidence_hist},
            {"v3_accuracy_density", d.accuracy_density},
            {"v4_utility_density", d.utility_density},
            {"accept_fraction", d.accept_fraction},
            {"accept_accuracy_mass", d.accept_accuracy_mass},
            {"accept_utility_mass", d.accept_utility_mass},
            {"solve_accuracy_mass", d.solve_accuracy_mass},
            {"solve_utility_mass", d.solve_utility_mass}};
}

json to_json(const ExperimentReport& r) {
    json seeds = json::array();
    for (const SeedOutcome& s : r.seeds) {
        seeds.push_back({{"seed", s.seed},
                         {"baseline", to_json(s.baseline)},
                         {"team", to_json(s.team)},
                         {"delta", to_json(s.delta)},
                         {"warm_start_val_eu", s.warm_start_val_eu},
                         {"team_val_eu", s.team_val_eu},
                         {"team_best_epoch", s.team_best_epoch}});
    }
    return {{"model", std::string(to_string(r.model_kind))},
            {"params", to_json(r.params)},
            {"accept_probability", r.accept_probability},
            {"team_loss", std::string(to_string(r.team_loss))},
            {"baseline_config", to_json(r.baseline_config)},
            {"team_config", to_json(r.team_config)},
            {"seeds", seeds},
            {"mean", {{"baseline", to_json(r.mean_baseline)},
                      {"team", to_json(r.mean_team)},
                      {"delta", to_json(r.mean_delta)}}}};
}

json to_json(const ExhaustiveRow& r) {
    return {{"seed", r.seed},
            {"features", {r.features.first, r.features.second}},
            {"logloss", to_json(r.logloss)},
            {"eu_search", to_json(r.eu_search)},
            {"emp_search", to_json(r.emp_search)},
            {"train_emp_of_eu_search", r.train_emp_of_eu_search},
            {"train_emp_of_emp_search", r.train_emp_of_emp_search},
            {"delta_eu_A", r.delta_eu()},
            {"delta_emp_B", r.delta_emp()},
            {"delta_star_emp_C", r.delta_star_emp()}};
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace teamopt
