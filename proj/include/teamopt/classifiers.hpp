#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "teamopt/team_model.hpp"

namespace teamopt {

enum class ModelKind { Linear, Mlp };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

inline constexpr std::size_t kHidden1 = 50;
inline constexpr std::size_t kHidden2 = 10;
inline constexpr double kLogitClamp = 500.0;

// Contiguous view of one weight matrix (or vector) inside the flat parameter
// array. Matrices are row-major with `rows` output units and `cols` inputs.
struct ParamBlock {
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool is_weight = true;  // biases are excluded from L2

    std::size_t size() const { return rows * cols; }
};

// Probabilistic binary classifier: logistic regression or a 50-10 ReLU MLP
// with a single sigmoid output unit. All parameters live in one flat vector,
// laid out as the sequence of blocks returned by blocks().
//
// Linear: [weights(n), bias(1)]
// Mlp:    [W1(50 x n), b1(50), W2(10 x 50), b2(10), w3(1 x 10), b3(1)]
class Model {
public:
    Model() = default;

    static Model linear(std::size_t n_features);
    static Model linear(std::span<const double> weights, double bias);
    static Model mlp(std::size_t n_features);

    ModelKind kind() const { return kind_; }
    std::size_t n_features() const { return n_features_; }
    std::size_t parameter_count() const { return params_.size(); }
    const std::vector<ParamBlock>& blocks() const { return blocks_; }

    std::span<const double> parameters() const { return params_; }
    // Mutable access bumps the revision so stale forward caches are detected.
    std::span<double> mutable_parameters() {
        ++revision_;
        return params_;
    }
    std::uint64_t revision() const { return revision_; }

    std::span<const double> block(std::size_t i) const;
    std::span<double> mutable_block(std::size_t i);

    // Sum of squared weights (biases excluded).
    double weight_norm_squared() const;

    bool all_finite() const;

    friend bool operator==(const Model& a, const Model& b) {
        return a.kind_ == b.kind_ && a.n_features_ == b.n_features_ &&
               a.params_ == b.params_;
    }

private:
    Model(ModelKind kind, std::size_t n_features);

    ModelKind kind_ = ModelKind::Linear;
    std::size_t n_features_ = 0;
    std::vector<ParamBlock> blocks_;
    std::vector<double> params_;
    std::uint64_t revision_ = 0;
};

// Linear: zeros. Mlp: Glorot-uniform weights, zero biases.
// Throws std::invalid_argument when n_features < 1.
Model init_model(ModelKind kind, std::size_t n_features, std::uint64_t seed);

// d loss / d parameter, congruent with the owning model's flat parameters.
class GradientBuffer {
public:
    GradientBuffer() = default;
    explicit GradientBuffer(const Model& model) : values_(model.parameter_count(), 0.0) {}
    explicit GradientBuffer(std::size_t size) : values_(size, 0.0) {}

    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    void clear();
    void scale(double factor);
    GradientBuffer& operator+=(const GradientBuffer& other);
    bool congruent_with(const Model& model) const {
        return values_.size() == model.parameter_count();
    }
    bool all_finite() const;

private:
    std::vector<double> values_;
};

double sigmoid(double z);

// Intermediate activations of one forward pass, required by backward().
struct ForwardPass {
    Prediction prediction;
    double logit = 0.0;
    std::vector<double> hidden1;  // post-ReLU
    std::vector<double> hidden2;  // post-ReLU
    const Model* model = nullptr;
    std::uint64_t revision = 0;
};

// Throws std::invalid_argument on a dimension mismatch or non-finite feature.
ForwardPass forward_pass(const Model& model, std::span<const double> features);
Prediction forward(const Model& model, std::span<const double> features);

// Accumulates d loss / d theta into `grads` given d loss / d probs[1].
// Throws std::logic_error if `pass` was not produced by `model` at its current
// revision.
void backward(const Model& model, const ForwardPass& pass,
              std::span<const double> features, double d_loss_d_prob1,
              GradientBuffer& grads);

// Convenience: runs the forward pass and returns a fresh gradient.
GradientBuffer backward(const Model& model, std::span<const double> features,
                        double d_loss_d_prob1);

}  // namespace teamopt
