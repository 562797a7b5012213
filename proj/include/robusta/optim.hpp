#pragma once

#include <cmath>

#include "robusta/net.hpp"

namespace robusta {

inline void sgd_step(DenseNet& net, const Grads& g, double lr) {
    if (!(lr > 0.0)) throw ArgumentError("sgd_step: lr must be positive");
    if (!g.finite()) throw NumericError("sgd_step: non-finite gradient");
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        for (std::size_t k = 0; k < net.w[l].a.size(); ++k) net.w[l].a[k] -= lr * g.w[l].a[k];
        for (std::size_t k = 0; k < net.b[l].size(); ++k) net.b[l][k] -= lr * g.b[l][k];
    }
}

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Grads m;
    Grads v;
    long t = 0;

    static AdamState zeros(const DenseNet& net) {
        AdamState s;
        s.m = net.zero_grads();
        s.v = net.zero_grads();
        return s;
    }
};

inline void adam_step(DenseNet& net, AdamState& st, const Grads& g, const AdamConfig& cfg = {}) {
    if (!(cfg.lr > 0.0)) throw ArgumentError("adam_step: lr must be positive");
    if (!g.finite()) throw NumericError("adam_step: non-finite gradient");
    st.t += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
    auto update = [&](double& p, double& m, double& v, double grad) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
        p -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
    };
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        for (std::size_t k = 0; k < net.w[l].a.size(); ++k)
            update(net.w[l].a[k], st.m.w[l].a[k], st.v.w[l].a[k], g.w[l].a[k]);
        for (std::size_t k = 0; k < net.b[l].size(); ++k)
            update(net.b[l][k], st.m.b[l][k], st.v.b[l][k], g.b[l][k]);
    }
}

}  // namespace robusta
