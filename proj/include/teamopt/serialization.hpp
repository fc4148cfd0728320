#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "teamopt/analysis.hpp"
#include "teamopt/classifiers.hpp"
#include "teamopt/data.hpp"
#include "teamopt/exhaustive.hpp"
#include "teamopt/optim.hpp"
#include "teamopt/pipeline.hpp"

namespace teamopt {

// Model files are flat objects:
//   {"kind": "linear"|"mlp", "n_features": n, <block name>: [row-major values], ...}
// plus an optional "standardization": {"mean": [...], "stddev": [...]} describing
// the input transform the model expects. Doubles are written in shortest
// round-trip form, so save/load is bit-exact.
nlohmann::json model_to_json(const Model& model,
                             const std::optional<Standardization>& stats = std::nullopt);
// Throws std::invalid_argument on a malformed document.
Model model_from_json(const nlohmann::json& j);
std::optional<Standardization> standardization_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const UtilityParams& p);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const BehaviorCurves& c);
nlohmann::json to_json(const BehaviorDiff& d);
nlohmann::json to_json(const ExperimentReport& r);
nlohmann::json to_json(const ExhaustiveRow& r);

// Writes `j.dump(2)` followed by a newline.
void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace teamopt
