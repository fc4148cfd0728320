#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamopt/team_model.hpp"

namespace teamopt {

// Raised by CSV ingestion; the message names the offending row/column.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;  // 0 marks a zero-variance feature (passed through)

    friend bool operator==(const Standardization&, const Standardization&) = default;
};

// Row-major feature matrix with binary labels.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::size_t n_features, std::vector<std::string> feature_names = {});

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    std::size_t n_features() const { return n_features_; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features_).subspan(i * n_features_, n_features_);
    }
    Label label(std::size_t i) const { return labels_[i]; }
    std::span<const Label> labels() const { return labels_; }
    std::span<const double> features() const { return features_; }
    double feature(std::size_t i, std::size_t j) const { return features_[i * n_features_ + j]; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    // Statistics this dataset was standardized with, if any.
    const std::optional<Standardization>& standardization() const { return stats_; }
    void set_standardization(Standardization stats) { stats_ = std::move(stats); }

    // Throws std::invalid_argument for a wrong row length, a label outside
    // {0, 1}, or a non-finite value.
    void add(std::span<const double> x, Label y);
    void reserve(std::size_t n) {
        features_.reserve(n * n_features_);
        labels_.reserve(n);
    }

    double positive_fraction() const;
    Dataset subset(std::span<const std::size_t> indices) const;
    Dataset select_features(std::span<const std::size_t> columns) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t n_features_ = 0;
    std::vector<double> features_;
    std::vector<Label> labels_;
    std::vector<std::string> feature_names_;
    std::optional<Standardization> stats_;
};

// Axis-aligned uniform square of points sharing one label.
struct BlobSpec {
    std::array<double, 2> center{0.0, 0.0};
    double half_width = 0.6;
    std::size_t count = 1;
    Label label = 0;
};

Dataset gen_blobs(std::span<const BlobSpec> blobs, std::uint64_t seed);

// Blob layout for n points (the counts sum to n).
std::vector<BlobSpec> scenario1_layout(std::size_t n);

// Two-class blob world with a boundary-adjacent positive blob A and a small
// negative blob B embedded on the positive side. Requires n >= 100.
Dataset gen_scenario1(std::size_t n, std::uint64_t seed);

inline constexpr double kDefaultMoonsNoise = 0.2;

// Interleaving half circles; n must be even and >= 100.
Dataset gen_moons(std::size_t n, double noise_std, std::uint64_t seed);

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column = "label");
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_column = "label");

// Seeded permutation split. Sizes are the differences of the rounded
// cumulative fractions, so they always sum to data.size().
std::vector<Dataset> split(const Dataset& data, std::span<const double> fractions,
                           std::uint64_t seed);

Standardization fit_standardization(const Dataset& train);
Dataset apply_standardization(const Dataset& data, const Standardization& stats);

// Standardizes train and every other split with statistics fitted on train only.
std::vector<Dataset> standardize(const Dataset& train, std::span<const Dataset> others);

// Indices 0..n-1 partitioned into k seeded folds.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

}  // namespace teamopt
