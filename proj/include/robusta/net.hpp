#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "robusta/common.hpp"
#include "robusta/rng.hpp"

namespace robusta {

// Per-layer output nonlinearity. Rectifiers take subgradient slope 0 at
// exactly 0 (LeakyRelu takes its negative slope there) so gradients are
// deterministic.
enum class Activation { Identity, Relu, LeakyRelu, Sigmoid };

constexpr double kLeakyReluSlope = 0.1;

inline std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::LeakyRelu: return "leaky_relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    throw ArgumentError("unknown activation");
}

inline Activation activation_from_name(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::Relu;
    if (s == "leaky_relu") return Activation::LeakyRelu;
    if (s == "sigmoid") return Activation::Sigmoid;
    throw ArgumentError("unknown activation name: " + s);
}

inline double apply_activation(Activation a, double z) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::LeakyRelu: return z > 0.0 ? z : kLeakyReluSlope * z;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    throw ArgumentError("unknown activation");
}

// Derivative in terms of pre-activation z and activation value s.
inline double activation_derivative(Activation a, double z, double s) {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::LeakyRelu: return z > 0.0 ? 1.0 : kLeakyReluSlope;
        case Activation::Sigmoid: return s * (1.0 - s);
    }
    throw ArgumentError("unknown activation");
}

// Parameter gradients, same shapes as DenseNet weights/biases.
struct Grads {
    std::vector<Matrix> w;
    std::vector<Vector> b;

    void zero() {
        for (auto& m : w) std::fill(m.a.begin(), m.a.end(), 0.0);
        for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
    }

    void scale(double s) {
        for (auto& m : w)
            for (double& x : m.a) x *= s;
        for (auto& v : b)
            for (double& x : v) x *= s;
    }

    void add(const Grads& o) {
        for (std::size_t l = 0; l < w.size(); ++l) {
            for (std::size_t i = 0; i < w[l].a.size(); ++i) w[l].a[i] += o.w[l].a[i];
            for (std::size_t i = 0; i < b[l].size(); ++i) b[l][i] += o.b[l][i];
        }
    }

    bool finite() const {
        for (const auto& m : w)
            for (double x : m.a)
                if (!std::isfinite(x)) return false;
        for (const auto& v : b)
            for (double x : v)
                if (!std::isfinite(x)) return false;
        return true;
    }
};

// Fully connected network. Layer l maps sizes[l] -> sizes[l+1] with weight
// matrix w[l] (out x in), bias b[l], then acts[l] applied elementwise.
struct DenseNet {
    std::vector<std::size_t> sizes;
    std::vector<Activation> acts;
    std::vector<Matrix> w;
    std::vector<Vector> b;

    std::size_t num_layers() const { return w.size(); }
    std::size_t input_dim() const { return sizes.front(); }
    std::size_t output_dim() const { return sizes.back(); }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < w.size(); ++l) n += w[l].size() + b[l].size();
        return n;
    }

    static DenseNet zeros(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations) {
        if (layer_sizes.size() < 2) throw ArgumentError("net needs at least input and output sizes");
        if (activations.size() != layer_sizes.size() - 1)
            throw ArgumentError("need one activation per layer");
        for (std::size_t s : layer_sizes)
            if (s == 0) throw ArgumentError("layer size must be positive");
        DenseNet net;
        net.sizes = std::move(layer_sizes);
        net.acts = std::move(activations);
        for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
            net.w.emplace_back(net.sizes[l + 1], net.sizes[l]);
            net.b.emplace_back(net.sizes[l + 1], 0.0);
        }
        return net;
    }

    // He-style init for rectifiers, Glorot-style otherwise.
    static DenseNet init(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations,
                         SplitRng rng) {
        DenseNet net = zeros(std::move(layer_sizes), std::move(activations));
        for (std::size_t l = 0; l < net.w.size(); ++l) {
            std::size_t fan_in = net.sizes[l];
            std::size_t fan_out = net.sizes[l + 1];
            bool rectified = net.acts[l] == Activation::Relu || net.acts[l] == Activation::LeakyRelu;
            double scale = rectified ? std::sqrt(2.0 / static_cast<double>(fan_in))
                                     : std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
            SplitRng layer_rng = rng.fork(l);
            for (double& x : net.w[l].a) x = scale * layer_rng.normal();
            // biases start at zero
        }
        return net;
    }

    Grads zero_grads() const {
        Grads g;
        for (std::size_t l = 0; l < w.size(); ++l) {
            g.w.emplace_back(w[l].rows, w[l].cols);
            g.b.emplace_back(b[l].size(), 0.0);
        }
        return g;
    }

    // Forward values needed by backward: acts[0] is the input, acts[l+1] the
    // output of layer l; pre[l] the pre-activation of layer l.
    struct Trace {
        std::vector<Vector> pre;
        std::vector<Vector> out;  // out[0] = input
    };

    Vector forward(const Vector& x, Trace* trace = nullptr) const {
        if (x.size() != input_dim())
            throw ArgumentError("net forward: input has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(input_dim()));
        if (trace) {
            trace->pre.assign(num_layers(), {});
            trace->out.assign(num_layers() + 1, {});
            trace->out[0] = x;
        }
        Vector h = x;
        for (std::size_t l = 0; l < num_layers(); ++l) {
            Vector z = w[l].mul(h);
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += b[l][i];
            if (trace) trace->pre[l] = z;
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = apply_activation(acts[l], z[i]);
            if (trace) trace->out[l + 1] = z;
            h = std::move(z);
        }
        return h;
    }

    // Backpropagate cotangent dL/d(output). Accumulates parameter gradients
    // into *grads when given; returns dL/d(input).
    Vector backward(const Trace& trace, Vector cot, Grads* grads = nullptr) const {
        if (cot.size() != output_dim()) throw ArgumentError("net backward: cotangent shape mismatch");
        for (std::size_t li = num_layers(); li-- > 0;) {
            const Vector& z = trace.pre[li];
            const Vector& s = trace.out[li + 1];
            for (std::size_t i = 0; i < cot.size(); ++i)
                cot[i] *= activation_derivative(acts[li], z[i], s[i]);
            if (grads) {
                const Vector& in = trace.out[li];
                Matrix& gw = grads->w[li];
                for (std::size_t i = 0; i < gw.rows; ++i) {
                    double c = cot[i];
                    if (c == 0.0) continue;
                    double* row = gw.a.data() + i * gw.cols;
                    for (std::size_t j = 0; j < gw.cols; ++j) row[j] += c * in[j];
                }
                for (std::size_t i = 0; i < cot.size(); ++i) grads->b[li][i] += cot[i];
            }
            cot = w[li].mul_transpose(cot);
        }
        return cot;
    }
};

// ---- Softmax head and cross-entropy ----

constexpr double kLogClamp = 1e-12;

// Max-subtracted softmax; output is a simplex vector.
inline Vector softmax(const Vector& logits) {
    if (logits.empty()) throw ArgumentError("softmax of empty logits");
    double mx = *std::max_element(logits.begin(), logits.end());
    Vector p(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
}

inline double ce_loss(const Vector& probs, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
        throw ArgumentError("ce_loss: label out of range");
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], kLogClamp));
}

// General cross-entropy CE(p, q) = -sum_k p_k log max(q_k, clamp).
inline double cross_entropy(const Vector& p, const Vector& q) {
    if (p.size() != q.size()) throw ArgumentError("cross_entropy: shape mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s -= p[k] * std::log(std::max(q[k], kLogClamp));
    return s;
}

// d(-log softmax(z)[y]) / dz = p - onehot(y).
inline Vector ce_softmax_logit_cotangent(const Vector& probs, int label) {
    Vector c = probs;
    c[static_cast<std::size_t>(label)] -= 1.0;
    return c;
}

// Given dL/dp for p = softmax(z), return dL/dz: dz_k = p_k (dp_k - sum_j dp_j p_j).
inline Vector softmax_pullback(const Vector& probs, const Vector& dprobs) {
    if (probs.size() != dprobs.size()) throw ArgumentError("softmax_pullback: shape mismatch");
    double inner = dot(probs, dprobs);
    Vector dz(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) dz[k] = probs[k] * (dprobs[k] - inner);
    return dz;
}

}  // namespace robusta
