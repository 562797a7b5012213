#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "robusta/dataset.hpp"
#include "robusta/rng.hpp"

namespace robusta {

// A transition kernel Q(.|x): given a center and a private rng, produce one
// perturbed point inside the unit hypercube.
struct PerturbationKernel {
    std::function<Vector(const Vector&, SplitRng&)> sampler;
    nlohmann::json descriptor;

    Vector operator()(const Vector& x, SplitRng& rng) const { return sampler(x, rng); }
};

inline PerturbationKernel degenerate_kernel() {
    PerturbationKernel k;
    k.descriptor = {{"kind", "degenerate"}};
    k.sampler = [](const Vector& x, SplitRng&) { return clipped01(x); };
    return k;
}

inline const char* metric_name(Metric m) { return m == Metric::L2 ? "l2" : "linf"; }

inline Metric metric_from_name(const std::string& s) {
    if (s == "l2") return Metric::L2;
    if (s == "linf") return Metric::Linf;
    throw ConfigError("unknown metric: " + s);
}

// Uniform distribution on the epsilon-ball around x, clipped to [0,1]^m.
// L2 draws a random direction and a radius proportional to u^(1/m); Linf is
// per-coordinate uniform.
inline PerturbationKernel uniform_ball_kernel(double epsilon, Metric metric = Metric::L2) {
    if (!(epsilon > 0.0)) throw ArgumentError("uniform_ball_kernel: epsilon must be positive");
    PerturbationKernel k;
    k.descriptor = {{"kind", "uniform_ball"}, {"epsilon", epsilon}, {"metric", metric_name(metric)}};
    if (metric == Metric::Linf) {
        k.sampler = [epsilon](const Vector& x, SplitRng& rng) {
            Vector y(x.size());
            for (std::size_t j = 0; j < x.size(); ++j)
                y[j] = x[j] + rng.uniform(-epsilon, epsilon);
            clip01(y);
            return y;
        };
    } else {
        k.sampler = [epsilon](const Vector& x, SplitRng& rng) {
            std::size_t m = x.size();
            Vector dir(m);
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    dir[j] = rng.normal();
                    norm2 += dir[j] * dir[j];
                }
            } while (norm2 == 0.0);
            double r = epsilon * std::pow(rng.uniform01(), 1.0 / static_cast<double>(m));
            double scale = r / std::sqrt(norm2);
            Vector y(m);
            for (std::size_t j = 0; j < m; ++j) y[j] = x[j] + scale * dir[j];
            clip01(y);
            return y;
        };
    }
    return k;
}

// n independent draws, keyed per draw so any subset can be regenerated in any
// order: draw i uses SplitRng(seed).fork(i).
inline std::vector<Vector> sample(const PerturbationKernel& kernel, const Vector& x,
                                  std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("sample: n must be >= 1");
    std::vector<Vector> out;
    out.reserve(n);
    SplitRng root(seed);
    for (std::size_t i = 0; i < n; ++i) {
        SplitRng draw = root.fork(i);
        out.push_back(kernel(x, draw));
    }
    return out;
}

inline constexpr std::size_t kDefaultMaxTries = 1000;

// Conditions the base kernel on keeping the label: rejection sampling against
// labeler(x') == labeler(x).
inline PerturbationKernel label_aware(PerturbationKernel base, Labeler labeler,
                                      std::size_t max_tries = kDefaultMaxTries) {
    if (max_tries < 1) throw ArgumentError("label_aware: max_tries must be >= 1");
    PerturbationKernel k;
    k.descriptor = {{"kind", "label_aware"}, {"max_tries", max_tries}, {"base", base.descriptor}};
    k.sampler = [base = std::move(base), labeler = std::move(labeler),
                 max_tries](const Vector& x, SplitRng& rng) {
        int want = labeler(x);
        for (std::size_t t = 0; t < max_tries; ++t) {
            Vector y = base(x, rng);
            if (labeler(y) == want) return y;
        }
        throw ConditioningInfeasibleError(max_tries, 1.0 / static_cast<double>(max_tries));
    };
    return k;
}

// Empirical on-manifold kernel: draw among dataset points within distance
// epsilon of x, weights respected.
inline PerturbationKernel on_manifold_kernel(double epsilon, const LabeledDataset& dataset,
                                             Metric metric = Metric::L2) {
    if (!(epsilon > 0.0)) throw ArgumentError("on_manifold_kernel: epsilon must be positive");
    if (dataset.empty()) throw ArgumentError("on_manifold_kernel: empty dataset");
    auto data = std::make_shared<LabeledDataset>(dataset);
    PerturbationKernel k;
    k.descriptor = {{"kind", "on_manifold"},
                    {"epsilon", epsilon},
                    {"metric", metric_name(metric)},
                    {"dataset_size", dataset.size()}};
    k.sampler = [epsilon, data, metric](const Vector& x, SplitRng& rng) {
        std::vector<std::size_t> idx;
        Vector w;
        for (std::size_t i = 0; i < data->size(); ++i) {
            if (distance(data->points[i], x, metric) <= epsilon) {
                idx.push_back(i);
                w.push_back(data->weight(i));
            }
        }
        if (idx.empty())
            throw EmptyNeighborhoodError("on_manifold_kernel: no dataset point within epsilon of x");
        std::size_t pick = rng.weighted_index(w);
        return clipped01(data->points[idx[pick]]);
    };
    return k;
}

// ---- Kernel families (parameterized sets with a density over the parameter) ----

struct KernelFamily {
    double lo = 0.0;
    double hi = 1.0;  // parameter domain [lo, hi]
    std::function<PerturbationKernel(double)> kernel_at;
    std::function<double(double)> q;  // density over the domain
    nlohmann::json descriptor;
};

// Q_{[0,d]}: uniform density over ball radii in [0, d].
inline KernelFamily family_uniform_epsilon(double d, Metric metric = Metric::L2) {
    if (!(d > 0.0)) throw ArgumentError("family_uniform_epsilon: d must be positive");
    KernelFamily fam;
    fam.lo = 0.0;
    fam.hi = d;
    fam.descriptor = {{"kind", "uniform_epsilon"}, {"d", d}, {"metric", metric_name(metric)}};
    fam.kernel_at = [metric](double eps) {
        if (eps <= 0.0) return degenerate_kernel();
        return uniform_ball_kernel(eps, metric);
    };
    fam.q = [d](double eps) { return (eps >= 0.0 && eps <= d) ? 1.0 / d : 0.0; };
    return fam;
}

struct EpsilonEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Smallest eps such that the kernel is (P, eps)-label preserving, estimated as
// one minus the Monte-Carlo label-agreement rate.
inline EpsilonEstimate label_preserving_epsilon(const PerturbationKernel& kernel,
                                                const LabeledDataset& dataset,
                                                const Labeler& labeler, std::size_t n_outer,
                                                std::size_t n_inner, std::uint64_t seed) {
    if (n_outer < 1 || n_inner < 1)
        throw ArgumentError("label_preserving_epsilon: counts must be >= 1");
    if (dataset.empty()) throw ArgumentError("label_preserving_epsilon: empty dataset");
    SplitRng root(seed);
    SplitRng pick_rng = root.fork(0);
    double keep_sum = 0.0;
    double keep_sq = 0.0;
    for (std::size_t i = 0; i < n_outer; ++i) {
        std::size_t pi = dataset.weights.empty() ? pick_rng.index(dataset.size())
                                                 : pick_rng.weighted_index(dataset.weights);
        const Vector& x = dataset.points[pi];
        int want = labeler(x);
        SplitRng point_rng = root.fork(i + 1);
        double kept = 0.0;
        for (std::size_t j = 0; j < n_inner; ++j) {
            SplitRng draw = point_rng.fork(j);
            if (labeler(kernel(x, draw)) == want) kept += 1.0;
        }
        kept /= static_cast<double>(n_inner);
        keep_sum += kept;
        keep_sq += kept * kept;
    }
    double n = static_cast<double>(n_outer);
    double mean_keep = keep_sum / n;
    double var = n > 1 ? std::max(0.0, (keep_sq - n * mean_keep * mean_keep) / (n - 1.0)) : 0.0;
    EpsilonEstimate est;
    est.value = 1.0 - mean_keep;
    est.stderr_ = std::sqrt(var / n);
    est.n = n_outer * n_inner;
    return est;
}

}  // namespace robusta
