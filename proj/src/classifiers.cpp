#include "teamopt/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace teamopt {

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::Linear ? "linear" : "mlp";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "linear") return ModelKind::Linear;
    if (name == "mlp") return ModelKind::Mlp;
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

Model::Model(ModelKind kind, std::size_t n_features) : kind_(kind), n_features_(n_features) {
    if (n_features < 1) throw std::invalid_argument("model needs at least one feature");
    std::size_t offset = 0;
    auto add = [&](std::size_t rows, std::size_t cols, bool is_weight) {
        blocks_.push_back({offset, rows, cols, is_weight});
        offset += rows * cols;
    };
    if (kind == ModelKind::Linear) {
        add(1, n_features, true);
        add(1, 1, false);
    } else {
        add(kHidden1, n_features, true);
        add(kHidden1, 1, false);
        add(kHidden2, kHidden1, true);
        add(kHidden2, 1, false);
        add(1, kHidden2, true);
        add(1, 1, false);
    }
    params_.assign(offset, 0.0);
}

Model Model::linear(std::size_t n_features) { return Model(ModelKind::Linear, n_features); }

Model Model::linear(std::span<const double> weights, double bias) {
    Model m(ModelKind::Linear, weights.size());
    std::copy(weights.begin(), weights.end(), m.params_.begin());
    m.params_.back() = bias;
    return m;
}

Model Model::mlp(std::size_t n_features) { return Model(ModelKind::Mlp, n_features); }

std::span<const double> Model::block(std::size_t i) const {
    const ParamBlock& b = blocks_.at(i);
    return std::span<const double>(params_).subspan(b.offset, b.size());
}

std::span<double> Model::mutable_block(std::size_t i) {
    const ParamBlock& b = blocks_.at(i);
    return mutable_parameters().subspan(b.offset, b.size());
}

double Model::weight_norm_squared() const {
    double total = 0.0;
    for (const ParamBlock& b : blocks_) {
        if (!b.is_weight) continue;
        for (std::size_t i = 0; i < b.size(); ++i) total += params_[b.offset + i] * params_[b.offset + i];
    }
    return total;
}

bool Model::all_finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

Model init_model(ModelKind kind, std::size_t n_features, std::uint64_t seed) {
    if (n_features < 1) throw std::invalid_argument("n_features must be >= 1");
    if (kind == ModelKind::Linear) return Model::linear(n_features);

    Model m = Model::mlp(n_features);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < m.blocks().size(); ++i) {
        const ParamBlock b = m.blocks()[i];
        if (!b.is_weight) continue;
        const double limit = std::sqrt(6.0 / static_cast<double>(b.cols + b.rows));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : m.mutable_block(i)) w = dist(rng);
    }
    return m;
}

void GradientBuffer::clear() { std::fill(values_.begin(), values_.end(), 0.0); }

void GradientBuffer::scale(double factor) {
    for (double& v : values_) v *= factor;
}

GradientBuffer& GradientBuffer::operator+=(const GradientBuffer& other) {
    if (other.size() != size()) throw std::invalid_argument("gradient shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

bool GradientBuffer::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

void check_features(const Model& model, std::span<const double> x) {
    if (x.size() != model.n_features())
        throw std::invalid_argument("feature length " + std::to_string(x.size()) +
                                    " does not match model input " +
                                    std::to_string(model.n_features()));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]))
            throw std::invalid_argument("non-finite feature at index " + std::to_string(i));
}

// out = relu(W * in + b)
void dense_relu(std::span<const double> w, std::span<const double> b,
                std::span<const double> in, std::vector<double>& out) {
    const std::size_t rows = b.size();
    const std::size_t cols = in.size();
    out.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = b[r];
        const double* row = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * in[c];
        out[r] = acc > 0.0 ? acc : 0.0;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

ForwardPass forward_pass(const Model& model, std::span<const double> features) {
    check_features(model, features);
    ForwardPass pass;
    pass.model = &model;
    pass.revision = model.revision();

    double z = 0.0;
    if (model.kind() == ModelKind::Linear) {
        z = dot(model.block(0), features) + model.block(1)[0];
    } else {
        dense_relu(model.block(0), model.block(1), features, pass.hidden1);
        dense_relu(model.block(2), model.block(3), pass.hidden1, pass.hidden2);
        z = dot(model.block(4), pass.hidden2) + model.block(5)[0];
    }
    pass.logit = z;
    const double clamped = std::clamp(z, -kLogitClamp, kLogitClamp);
    pass.prediction.probs = {sigmoid(-clamped), sigmoid(clamped)};
    return pass;
}

Prediction forward(const Model& model, std::span<const double> features) {
    return forward_pass(model, features).prediction;
}

void backward(const Model& model, const ForwardPass& pass,
              std::span<const double> features, double d_loss_d_prob1,
              GradientBuffer& grads) {
    if (pass.model != &model || pass.revision != model.revision())
        throw std::logic_error("backward called with a stale or foreign forward pass");
    if (!grads.congruent_with(model)) throw std::invalid_argument("gradient buffer shape mismatch");
    if (d_loss_d_prob1 == 0.0) return;

    const double p1 = pass.prediction.probs[1];
    // dp1/dz = p1 * (1 - p1) = sigmoid(z) * sigmoid(-z)
    const double dz = d_loss_d_prob1 * p1 * pass.prediction.probs[0];
    const auto& blocks = model.blocks();
    std::span<double> g = grads.values();

    if (model.kind() == ModelKind::Linear) {
        const std::size_t w = blocks[0].offset;
        for (std::size_t i = 0; i < features.size(); ++i) g[w + i] += dz * features[i];
        g[blocks[1].offset] += dz;
        return;
    }

    // Output layer.
    const std::span<const double> w3 = model.block(4);
    for (std::size_t j = 0; j < kHidden2; ++j) g[blocks[4].offset + j] += dz * pass.hidden2[j];
    g[blocks[5].offset] += dz;

    // Hidden layer 2.
    std::vector<double> d2(kHidden2, 0.0);
    for (std::size_t j = 0; j < kHidden2; ++j)
        d2[j] = pass.hidden2[j] > 0.0 ? dz * w3[j] : 0.0;
    const std::span<const double> w2 = model.block(2);
    std::vector<double> d1(kHidden1, 0.0);
    for (std::size_t j = 0; j < kHidden2; ++j) {
        if (d2[j] == 0.0) continue;
        double* grow = g.data() + blocks[2].offset + j * kHidden1;
        const double* wrow = w2.data() + j * kHidden1;
        for (std::size_t k = 0; k < kHidden1; ++k) {
            grow[k] += d2[j] * pass.hidden1[k];
            d1[k] += d2[j] * wrow[k];
        }
        g[blocks[3].offset + j] += d2[j];
    }

    // Hidden layer 1.
    const std::size_t n = model.n_features();
    for (std::size_t k = 0; k < kHidden1; ++k) {
        if (pass.hidden1[k] <= 0.0 || d1[k] == 0.0) continue;
        double* grow = g.data() + blocks[0].offset + k * n;
        for (std::size_t i = 0; i < n; ++i) grow[i] += d1[k] * features[i];
        g[blocks[1].offset + k] += d1[k];
    }
}

GradientBuffer backward(const Model& model, std::span<const double> features,
                        double d_loss_d_prob1) {
    GradientBuffer grads(model);
    const ForwardPass pass = forward_pass(model, features);
    backward(model, pass, features, d_loss_d_prob1, grads);
    return grads;
}

}  // namespace teamopt
