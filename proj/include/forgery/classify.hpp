#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "forgery/error.hpp"
#include "forgery/features.hpp"
#include "forgery/random.hpp"

namespace forgery {

/// 0 = authentic, 1 = tampered.
struct LabeledSample {
    std::vector<double> features;
    int label = 0;
};

struct TrainConfig {
    int epochs = 100;
    double learning_rate = 0.01;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    bool shuffle = true;
    int hidden_dim = 64;

    void validate() const {
        if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
        if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be > 0");
        if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
        if (hidden_dim < 1) throw Error(ErrorCode::InvalidArgument, "hidden_dim must be >= 1");
    }
};

struct Prediction {
    int label = 0;
    double score = 0.0;  // SVM margin or MLP probability
};

struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    double lambda = 0.0;

    std::size_t dim() const noexcept { return weights.size(); }
    friend bool operator==(const LinearSvmModel&, const LinearSvmModel&) = default;
};

/// One hidden relu layer, sigmoid output. hidden_weights is hidden_dim x input_dim, row-major.
struct MlpModel {
    int input_dim = 0;
    int hidden_dim = 0;
    std::vector<double> hidden_weights;
    std::vector<double> hidden_bias;
    std::vector<double> output_weights;
    double output_bias = 0.0;
    double lambda = 0.0;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(input_dim); }
    friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline int signed_label(int label) { return 2 * label - 1; }

inline void check_samples(std::span<const LabeledSample> train) {
    if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "training set is empty");
    const std::size_t dim = train.front().features.size();
    for (const auto& s : train)
        if (s.features.size() != dim) throw Error(ErrorCode::DimMismatch, "training samples differ in dimension");
}

inline std::vector<std::size_t> identity_order(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
}

// log(1 + e^z) without overflow
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear SVM
// ---------------------------------------------------------------------------

inline double svm_margin(const LinearSvmModel& model, std::span<const double> x) {
    if (x.size() != model.dim()) throw Error(ErrorCode::DimMismatch, "feature length differs from SVM dimension");
    return detail::dot(model.weights, x) + model.bias;
}

/// max(0, 1 - y(w.x + b)) + (lambda/2)|w|^2 with y = 2*label - 1.
inline double hinge_loss(const LinearSvmModel& model, const LabeledSample& s) {
    const double y = detail::signed_label(s.label);
    const double hinge = std::max(0.0, 1.0 - y * svm_margin(model, s.features));
    return hinge + 0.5 * model.lambda * detail::dot(model.weights, model.weights);
}

/// Ties at margin 0 go to class 1.
inline Prediction svm_predict(const LinearSvmModel& model, std::span<const double> x) {
    const double margin = svm_margin(model, x);
    return {margin >= 0.0 ? 1 : 0, margin};
}

/// Primal per-sample subgradient descent on hinge + L2, starting from zero.
inline LinearSvmModel svm_train(std::span<const LabeledSample> train, const TrainConfig& cfg) {
    cfg.validate();
    detail::check_samples(train);
    const std::size_t dim = train.front().features.size();
    LinearSvmModel model{std::vector<double>(dim, 0.0), 0.0, cfg.lambda};
    Rng rng(cfg.seed);
    auto order = detail::identity_order(train.size());
    const double lr = cfg.learning_rate;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) rng.shuffle(order);
        for (std::size_t idx : order) {
            const auto& s = train[idx];
            const double y = detail::signed_label(s.label);
            const bool active = y * svm_margin(model, s.features) < 1.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double grad = cfg.lambda * model.weights[i] - (active ? y * s.features[i] : 0.0);
                model.weights[i] -= lr * grad;
            }
            if (active) model.bias += lr * y;
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from the seeded generator, biases 0.
inline MlpModel mlp_init(int input_dim, int hidden_dim, Rng& rng) {
    if (input_dim < 1 || hidden_dim < 1) throw Error(ErrorCode::InvalidArgument, "MLP dimensions must be >= 1");
    MlpModel m;
    m.input_dim = input_dim;
    m.hidden_dim = hidden_dim;
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    m.hidden_weights.resize(static_cast<std::size_t>(input_dim) * hidden_dim);
    for (auto& w : m.hidden_weights) w = rng.uniform(-in_bound, in_bound);
    m.hidden_bias.assign(static_cast<std::size_t>(hidden_dim), 0.0);
    m.output_weights.resize(static_cast<std::size_t>(hidden_dim));
    for (auto& w : m.output_weights) w = rng.uniform(-out_bound, out_bound);
    return m;
}

namespace detail {

struct MlpActivations {
    std::vector<double> hidden;  // post-relu
    double logit = 0.0;
};

inline MlpActivations mlp_activations(const MlpModel& m, std::span<const double> x) {
    if (x.size() != m.dim()) throw Error(ErrorCode::DimMismatch, "feature length differs from MLP input dimension");
    MlpActivations a;
    a.hidden.resize(static_cast<std::size_t>(m.hidden_dim));
    const std::size_t in = m.dim();
    for (int j = 0; j < m.hidden_dim; ++j) {
        std::span<const double> row(m.hidden_weights.data() + j * in, in);
        a.hidden[j] = std::max(0.0, dot(row, x) + m.hidden_bias[j]);
    }
    a.logit = dot(m.output_weights, a.hidden) + m.output_bias;
    return a;
}

}  // namespace detail

/// p = sigmoid(w2 . relu(W1 x + b1) + b2)
inline double mlp_forward(const MlpModel& model, std::span<const double> x) {
    return detail::sigmoid(detail::mlp_activations(model, x).logit);
}

inline Prediction mlp_predict(const MlpModel& model, std::span<const double> x) {
    const double p = mlp_forward(model, x);
    return {p >= 0.5 ? 1 : 0, p};
}

/// Binary cross-entropy plus (lambda/2) times the squared norm of both weight matrices.
inline double mlp_loss(const MlpModel& model, const LabeledSample& s) {
    const double z = detail::mlp_activations(model, s.features).logit;
    double loss = detail::softplus(z) - s.label * z;
    if (model.lambda > 0.0)
        loss += 0.5 * model.lambda *
                (detail::dot(model.hidden_weights, model.hidden_weights) + detail::dot(model.output_weights, model.output_weights));
    return loss;
}

/// Gradient of mlp_loss laid out like an MlpModel (the non-parameter fields are copied through).
inline MlpModel mlp_gradient(const MlpModel& model, const LabeledSample& s) {
    const auto act = detail::mlp_activations(model, s.features);
    const double dz = detail::sigmoid(act.logit) - s.label;
    const std::size_t in = model.dim();
    MlpModel g = model;
    g.output_bias = dz;
    for (int j = 0; j < model.hidden_dim; ++j) {
        g.output_weights[j] = dz * act.hidden[j] + model.lambda * model.output_weights[j];
        const double dh = act.hidden[j] > 0.0 ? dz * model.output_weights[j] : 0.0;
        g.hidden_bias[j] = dh;
        for (std::size_t i = 0; i < in; ++i)
            g.hidden_weights[j * in + i] = dh * s.features[i] + model.lambda * model.hidden_weights[j * in + i];
    }
    return g;
}

inline double mlp_mean_loss(const MlpModel& model, std::span<const LabeledSample> data) {
    double total = 0.0;
    for (const auto& s : data) total += mlp_loss(model, s);
    return total / static_cast<double>(data.size());
}

/// Per-sample SGD on binary cross-entropy with manual backprop.
inline MlpModel mlp_train(std::span<const LabeledSample> train, const TrainConfig& cfg) {
    cfg.validate();
    detail::check_samples(train);
    Rng rng(cfg.seed);
    MlpModel m = mlp_init(static_cast<int>(train.front().features.size()), cfg.hidden_dim, rng);
    m.lambda = cfg.lambda;
    auto order = detail::identity_order(train.size());
    const double lr = cfg.learning_rate;
    const std::size_t in = m.dim();
    std::vector<double> hidden(static_cast<std::size_t>(m.hidden_dim));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) rng.shuffle(order);
        for (std::size_t idx : order) {
            const auto& s = train[idx];
            const auto act = detail::mlp_activations(m, s.features);
            const double dz = detail::sigmoid(act.logit) - s.label;
            for (int j = 0; j < m.hidden_dim; ++j) {
                // hidden gradient uses the pre-update output weight
                const double dh = act.hidden[j] > 0.0 ? dz * m.output_weights[j] : 0.0;
                m.output_weights[j] -= lr * (dz * act.hidden[j] + cfg.lambda * m.output_weights[j]);
                if (dh != 0.0 || cfg.lambda > 0.0) {
                    double* row = m.hidden_weights.data() + j * in;
                    for (std::size_t i = 0; i < in; ++i) row[i] -= lr * (dh * s.features[i] + cfg.lambda * row[i]);
                    m.hidden_bias[j] -= lr * dh;
                }
            }
            m.output_bias -= lr * dz;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient checks
// ---------------------------------------------------------------------------

namespace detail {

inline double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1e-12, std::abs(analytic) + std::abs(numeric));
}

}  // namespace detail

/// Max relative error between the SVM subgradient and central differences of hinge_loss.
/// The evaluation point must be further than eps from the hinge kink.
inline double gradient_check(const LinearSvmModel& model, const LabeledSample& s, double eps) {
    if (!(eps > 0.0 && eps <= 1e-2)) throw Error(ErrorCode::InvalidArgument, "eps must be in (0, 1e-2]");
    const double y = detail::signed_label(s.label);
    const double margin = y * svm_margin(model, s.features);
    double reach = 1.0;
    for (double v : s.features) reach = std::max(reach, std::abs(v));
    if (std::abs(margin - 1.0) <= eps * reach)
        throw Error(ErrorCode::KinkProximity, "evaluation point lies within eps of the hinge kink");

    const bool active = margin < 1.0;
    double worst = 0.0;
    LinearSvmModel probe = model;
    for (std::size_t i = 0; i <= model.dim(); ++i) {
        double& param = i < model.dim() ? probe.weights[i] : probe.bias;
        const double analytic = i < model.dim() ? model.lambda * model.weights[i] - (active ? y * s.features[i] : 0.0)
                                                : (active ? -y : 0.0);
        const double saved = param;
        param = saved + eps;
        const double up = hinge_loss(probe, s);
        param = saved - eps;
        const double down = hinge_loss(probe, s);
        param = saved;
        worst = std::max(worst, detail::relative_error(analytic, (up - down) / (2.0 * eps)));
    }
    return worst;
}

/// Max relative error between backprop gradients and central differences of mlp_loss.
inline double gradient_check(const MlpModel& model, const LabeledSample& s, double eps) {
    if (!(eps > 0.0 && eps <= 1e-2)) throw Error(ErrorCode::InvalidArgument, "eps must be in (0, 1e-2]");
    const MlpModel grad = mlp_gradient(model, s);
    MlpModel probe = model;
    double worst = 0.0;

    auto check = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + eps;
        const double up = mlp_loss(probe, s);
        param = saved - eps;
        const double down = mlp_loss(probe, s);
        param = saved;
        worst = std::max(worst, detail::relative_error(analytic, (up - down) / (2.0 * eps)));
    };
    for (std::size_t i = 0; i < probe.hidden_weights.size(); ++i) check(probe.hidden_weights[i], grad.hidden_weights[i]);
    for (std::size_t i = 0; i < probe.hidden_bias.size(); ++i) check(probe.hidden_bias[i], grad.hidden_bias[i]);
    for (std::size_t i = 0; i < probe.output_weights.size(); ++i) check(probe.output_weights[i], grad.output_weights[i]);
    check(probe.output_bias, grad.output_bias);
    return worst;
}

}  // namespace forgery
