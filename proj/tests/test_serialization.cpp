#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "teamopt/serialization.hpp"

using namespace teamopt;

TEST_CASE("model json round trip is bit-exact") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Model mlp = oracle::random_mlp(3, seed);
        CHECK(model_from_json(model_to_json(mlp)) == mlp);
        const Model lin = oracle::random_linear(4, seed);
        const nlohmann::json j = nlohmann::json::parse(model_to_json(lin).dump());
        CHECK(model_from_json(j) == lin);
    }
}

TEST_CASE("model json carries standardization") {
    const Model m = oracle::random_linear(2, 1);
    const Standardization stats{{0.1, -2.0}, {1.5, 0.0}};
    const nlohmann::json j = model_to_json(m, stats);
    CHECK(standardization_from_json(j) == stats);
    CHECK_FALSE(standardization_from_json(model_to_json(m)).has_value());

    const auto path = std::filesystem::temp_directory_path() / "teamopt_model.json";
    write_json(j, path);
    CHECK(read_json(path) == j);
}

TEST_CASE("malformed model documents are rejected") {
    nlohmann::json j = model_to_json(oracle::random_linear(2, 1));
    j["weights"] = {1.0};
    CHECK_THROWS_AS(model_from_json(j), std::invalid_argument);
    j.erase("weights");
    CHECK_THROWS_AS(model_from_json(j), std::invalid_argument);
    CHECK_THROWS_AS(model_from_json({{"kind", "tree"}, {"n_features", 2}}), std::invalid_argument);
}

TEST_CASE("metric json") {
    const nlohmann::json j = to_json(Metrics{0.9, 0.5, 0.25});
    CHECK(j.at("accuracy") == 0.9);
    CHECK(j.at("expected_utility") == 0.5);
    CHECK(j.at("empirical_utility") == 0.25);
    CHECK(to_json(UtilityParams{1.0, 0.5, 1.0}).at("threshold") == 0.75);
}
