#pragma once

#include <concepts>
#include <limits>
#include <variant>

#include "robusta/dataset.hpp"
#include "robusta/net.hpp"

namespace robusta {

// Anything the robustness calculus can score.
template <typename F>
concept ClassifierModel = requires(const F& f, const Vector& x) {
    { f.predict(x) } -> std::convertible_to<int>;
    { f.num_classes() } -> std::convertible_to<int>;
};

// Additionally exposes simplex discriminants and input gradients, which the
// gradient-based attacks need.
template <typename F>
concept DifferentiableClassifier = ClassifierModel<F> && requires(const F& f, const Vector& x,
                                                                  const Vector& cot, int y) {
    { f.probs(x) } -> std::convertible_to<Vector>;
    { f.input_grad_ce(x, y) } -> std::convertible_to<Vector>;
    { f.input_grad_probs(x, cot) } -> std::convertible_to<Vector>;
};

// ---- Dense-network classifier: softmax over the net's K output logits ----

struct NetClassifier {
    DenseNet net;  // final activation should be Identity; softmax applied here

    int num_classes() const { return static_cast<int>(net.output_dim()); }
    std::size_t input_dim() const { return net.input_dim(); }

    Vector logits(const Vector& x) const { return net.forward(x); }

    Vector probs(const Vector& x) const { return softmax(net.forward(x)); }

    int predict(const Vector& x) const { return argmax_lowest(probs(x)); }

    // d(-log f_hat(x)[y]) / dx
    Vector input_grad_ce(const Vector& x, int y) const {
        DenseNet::Trace tr;
        Vector p = softmax(net.forward(x, &tr));
        return net.backward(tr, ce_softmax_logit_cotangent(p, y));
    }

    // d(cot . f_hat(x)) / dx for an arbitrary cotangent on the simplex output
    Vector input_grad_probs(const Vector& x, const Vector& cot) const {
        DenseNet::Trace tr;
        Vector p = softmax(net.forward(x, &tr));
        return net.backward(tr, softmax_pullback(p, cot));
    }
};

struct BatchLossResult {
    Grads grads;
    double loss = 0.0;
};

// Mean cross-entropy over a batch plus mean parameter gradients.
inline BatchLossResult ce_loss_grad_params(const NetClassifier& model,
                                           const std::vector<Vector>& xs,
                                           const std::vector<int>& ys) {
    if (xs.empty()) throw ArgumentError("loss_grad_params: empty batch");
    if (xs.size() != ys.size()) throw ArgumentError("loss_grad_params: batch length mismatch");
    BatchLossResult res;
    res.grads = model.net.zero_grads();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        DenseNet::Trace tr;
        Vector p = softmax(model.net.forward(xs[i], &tr));
        res.loss += ce_loss(p, ys[i]);
        model.net.backward(tr, ce_softmax_logit_cotangent(p, ys[i]), &res.grads);
    }
    double inv = 1.0 / static_cast<double>(xs.size());
    res.loss *= inv;
    res.grads.scale(inv);
    return res;
}

// ---- Linear classifier: logits = W x + b, analytic margin oracle ----

struct LinearClassifier {
    Matrix weights;  // K x m
    Vector biases;   // K

    int num_classes() const { return static_cast<int>(weights.rows); }
    std::size_t input_dim() const { return weights.cols; }

    Vector logits(const Vector& x) const {
        Vector z = weights.mul(x);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += biases[i];
        return z;
    }

    Vector probs(const Vector& x) const { return softmax(logits(x)); }

    int predict(const Vector& x) const { return argmax_lowest(logits(x)); }

    Vector input_grad_ce(const Vector& x, int y) const {
        return weights.mul_transpose(ce_softmax_logit_cotangent(probs(x), y));
    }

    Vector input_grad_probs(const Vector& x, const Vector& cot) const {
        return weights.mul_transpose(softmax_pullback(probs(x), cot));
    }
};

// Convenience: 2-class classifier for the hyperplane w.x + c = 0, predicting
// class 0 where w.x + c > 0.
inline LinearClassifier hyperplane_classifier(const Vector& w, double c) {
    LinearClassifier lin;
    lin.weights = Matrix(2, w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        lin.weights(0, j) = w[j];
        lin.weights(1, j) = -w[j];
    }
    lin.biases = {c, -c};
    return lin;
}

// Exact L2 distance from x to the nearest decision hyperplane of the
// predicted class: min over j != predict(x) of (z_i - z_j) / |w_i - w_j|.
// Pairs with identical weight rows but different biases never cross and are
// skipped; +infinity means no reachable boundary.
inline double linear_margin(const LinearClassifier& lin, const Vector& x) {
    Vector z = lin.logits(x);
    int i = argmax_lowest(z);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < lin.num_classes(); ++j) {
        if (j == i) continue;
        double wnorm2 = 0.0;
        for (std::size_t k = 0; k < lin.input_dim(); ++k) {
            double dw = lin.weights(static_cast<std::size_t>(i), k) -
                        lin.weights(static_cast<std::size_t>(j), k);
            wnorm2 += dw * dw;
        }
        double db = lin.biases[static_cast<std::size_t>(i)] - lin.biases[static_cast<std::size_t>(j)];
        if (wnorm2 == 0.0) {
            if (db == 0.0)
                throw DegenerateClassifierError("linear_margin: identical class rows " +
                                                std::to_string(i) + " and " + std::to_string(j));
            continue;  // parallel with constant gap: no boundary between i and j
        }
        double dist = std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]) /
                      std::sqrt(wnorm2);
        best = std::min(best, dist);
    }
    return best;
}

// ---- Constant classifier (the P1 reference point) ----

struct ConstantClassifier {
    int label = 0;
    int classes = 2;

    int num_classes() const { return classes; }
    int predict(const Vector&) const { return label; }

    Vector probs(const Vector&) const {
        Vector p(static_cast<std::size_t>(classes), 0.0);
        p[static_cast<std::size_t>(label)] = 1.0;
        return p;
    }

    Vector input_grad_ce(const Vector& x, int) const { return Vector(x.size(), 0.0); }
    Vector input_grad_probs(const Vector& x, const Vector&) const { return Vector(x.size(), 0.0); }
};

// ---- Type-erased classifier for the CLI / config layer ----

class AnyClassifier {
  public:
    AnyClassifier() : impl_(ConstantClassifier{}) {}
    AnyClassifier(NetClassifier m) : impl_(std::move(m)) {}
    AnyClassifier(LinearClassifier m) : impl_(std::move(m)) {}
    AnyClassifier(ConstantClassifier m) : impl_(std::move(m)) {}

    int predict(const Vector& x) const {
        return std::visit([&](const auto& f) { return f.predict(x); }, impl_);
    }
    int num_classes() const {
        return std::visit([&](const auto& f) { return f.num_classes(); }, impl_);
    }
    Vector probs(const Vector& x) const {
        return std::visit([&](const auto& f) { return f.probs(x); }, impl_);
    }
    Vector input_grad_ce(const Vector& x, int y) const {
        return std::visit([&](const auto& f) { return f.input_grad_ce(x, y); }, impl_);
    }
    Vector input_grad_probs(const Vector& x, const Vector& cot) const {
        return std::visit([&](const auto& f) { return f.input_grad_probs(x, cot); }, impl_);
    }

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&impl_);
    }

    const std::variant<ConstantClassifier, LinearClassifier, NetClassifier>& raw() const {
        return impl_;
    }

  private:
    std::variant<ConstantClassifier, LinearClassifier, NetClassifier> impl_;
};

template <ClassifierModel F>
inline double dataset_accuracy(const F& f, const LabeledDataset& data) {
    if (data.empty()) throw ArgumentError("accuracy of empty dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (f.predict(data.points[i]) == data.labels[i]) acc += data.weight(i);
    return acc;
}

}  // namespace robusta
