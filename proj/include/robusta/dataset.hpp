#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "robusta/common.hpp"

namespace robusta {

inline void validate_point(const Vector& p) {
    if (p.empty()) throw ArgumentError("point must have at least one coordinate");
    for (double x : p) {
        if (!std::isfinite(x)) throw ArgumentError("point coordinate is not finite");
        if (x < 0.0 || x > 1.0) throw ArgumentError("point coordinate outside [0,1]");
    }
}

// Points in the unit hypercube with integer labels and optional density
// weights (the empirical measure p).
struct LabeledDataset {
    std::vector<Vector> points;
    std::vector<int> labels;
    std::vector<double> weights;  // empty = uniform 1/n
    int num_classes = 0;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    std::size_t dim() const { return points.empty() ? 0 : points[0].size(); }

    double weight(std::size_t i) const {
        return weights.empty() ? 1.0 / static_cast<double>(size()) : weights[i];
    }

    void validate() const {
        if (points.size() != labels.size())
            throw ArgumentError("dataset: points/labels length mismatch");
        if (!weights.empty() && weights.size() != points.size())
            throw ArgumentError("dataset: points/weights length mismatch");
        if (num_classes < 1) throw ArgumentError("dataset: num_classes must be >= 1");
        std::size_t m = points.empty() ? 0 : points[0].size();
        for (const auto& p : points) {
            if (p.size() != m) throw ArgumentError("dataset: inconsistent point dimension");
            validate_point(p);
        }
        for (int y : labels)
            if (y < 0 || y >= num_classes)
                throw ArgumentError("dataset: label out of range [0, K)");
        if (!weights.empty()) {
            double total = 0.0;
            for (double w : weights) {
                if (!(w >= 0.0)) throw ArgumentError("dataset: negative weight");
                total += w;
            }
            if (std::abs(total - 1.0) > 1e-9)
                throw ArgumentError("dataset: weights must sum to 1 within 1e-9");
        }
    }

    double diameter() const { return hypercube_diameter(dim()); }
};

// True labeling function Y(x), total on the hypercube.
struct Labeler {
    std::function<int(const Vector&)> fn;
    int num_classes = 2;

    int operator()(const Vector& x) const { return fn(x); }
};

inline Labeler constant_labeler(int label, int num_classes = 2) {
    return Labeler{[label](const Vector&) { return label; }, num_classes};
}

}  // namespace robusta
