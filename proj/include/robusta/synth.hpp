#pragma once

#include <array>
#include <memory>
#include <numbers>
#include <string>

#include "robusta/dataset.hpp"
#include "robusta/rng.hpp"

namespace robusta {

struct SynthResult {
    LabeledDataset data;
    Labeler labeler;
};

namespace detail {

// Fixed affine map taking the raw two-moons box [-1.5,2.5]x[-1,1.5] into
// [0.05,0.95]^2, so the labeler below is independent of the sampled data.
inline Vector moons_to_square(double rx, double ry) {
    double u = 0.05 + 0.9 * (rx + 1.5) / 4.0;
    double v = 0.05 + 0.9 * (ry + 1.0) / 2.5;
    return {std::clamp(u, 0.05, 0.95), std::clamp(v, 0.05, 0.95)};
}

inline std::array<std::vector<Vector>, 2> moon_arcs(std::size_t segments = 256) {
    std::array<std::vector<Vector>, 2> arcs;
    for (std::size_t k = 0; k <= segments; ++k) {
        double t = std::numbers::pi * static_cast<double>(k) / static_cast<double>(segments);
        arcs[0].push_back(moons_to_square(std::cos(t), std::sin(t)));
        arcs[1].push_back(moons_to_square(1.0 - std::cos(t), 0.5 - std::sin(t)));
    }
    return arcs;
}

inline double point_set_distance(const Vector& x, const std::vector<Vector>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& p : pts) best = std::min(best, distance(x, p));
    return best;
}

}  // namespace detail

inline SynthResult two_moons(std::size_t n, double noise, std::uint64_t seed) {
    if (n < 2) throw ArgumentError("two_moons: n must be >= 2");
    SplitRng rng(seed);
    SynthResult res;
    res.data.num_classes = 2;
    for (std::size_t i = 0; i < n; ++i) {
        int cls = static_cast<int>(i % 2);
        double t = rng.uniform01() * std::numbers::pi;
        double rx = cls == 0 ? std::cos(t) : 1.0 - std::cos(t);
        double ry = cls == 0 ? std::sin(t) : 0.5 - std::sin(t);
        rx += noise * rng.normal();
        ry += noise * rng.normal();
        res.data.points.push_back(detail::moons_to_square(rx, ry));
        res.data.labels.push_back(cls);
    }
    auto arcs = std::make_shared<std::array<std::vector<Vector>, 2>>(detail::moon_arcs());
    res.labeler.num_classes = 2;
    res.labeler.fn = [arcs](const Vector& x) {
        return detail::point_set_distance(x, (*arcs)[0]) <=
                       detail::point_set_distance(x, (*arcs)[1])
                   ? 0
                   : 1;
    };
    return res;
}

inline SynthResult gaussian_blobs(std::size_t n, double noise, std::uint64_t seed) {
    if (n < 2) throw ArgumentError("gaussian_blobs: n must be >= 2");
    static const std::vector<Vector> centers = {{0.25, 0.25}, {0.75, 0.25}, {0.5, 0.75}};
    SplitRng rng(seed);
    SynthResult res;
    res.data.num_classes = 3;
    for (std::size_t i = 0; i < n; ++i) {
        int cls = static_cast<int>(i % 3);
        Vector p = centers[static_cast<std::size_t>(cls)];
        for (double& c : p) c = std::clamp(c + noise * rng.normal(), 0.05, 0.95);
        res.data.points.push_back(std::move(p));
        res.data.labels.push_back(cls);
    }
    res.labeler.num_classes = 3;
    res.labeler.fn = [](const Vector& x) {
        int best = 0;
        double bd = distance(x, centers[0]);
        for (int k = 1; k < 3; ++k) {
            double d = distance(x, centers[static_cast<std::size_t>(k)]);
            if (d < bd) {
                bd = d;
                best = k;
            }
        }
        return best;
    };
    return res;
}

// Labels come from the hyperplane sum(x) = dim/2 before jitter is applied, so
// at noise=0 a linear classifier separates the data perfectly.
inline SynthResult linear_separable(std::size_t n, double noise, std::uint64_t seed,
                                    std::size_t dim = 2) {
    if (n < 2) throw ArgumentError("linear_separable: n must be >= 2");
    if (dim < 1) throw ArgumentError("linear_separable: dim must be >= 1");
    double threshold = 0.5 * static_cast<double>(dim);
    SplitRng rng(seed);
    SynthResult res;
    res.data.num_classes = 2;
    for (std::size_t i = 0; i < n; ++i) {
        Vector p(dim);
        for (double& c : p) c = rng.uniform(0.05, 0.95);
        double s = 0.0;
        for (double c : p) s += c;
        res.data.labels.push_back(s >= threshold ? 1 : 0);
        for (double& c : p) c = std::clamp(c + noise * rng.normal(), 0.05, 0.95);
        res.data.points.push_back(std::move(p));
    }
    res.labeler.num_classes = 2;
    res.labeler.fn = [threshold](const Vector& x) {
        double s = 0.0;
        for (double c : x) s += c;
        return s >= threshold ? 1 : 0;
    };
    return res;
}

// ---- 8x8 shape images (the transfer harness substrate) ----

inline constexpr std::size_t kShapeSide = 8;
inline constexpr double kShapeBg = 0.1;
inline constexpr double kShapeFg = 0.9;

namespace detail {

struct ShapeVariant {
    int label;
    Vector pixels;
};

inline Vector shape_canvas() {
    return Vector(kShapeSide * kShapeSide, kShapeBg);
}

inline void set_pixel(Vector& img, std::size_t r, std::size_t c) {
    img[r * kShapeSide + c] = kShapeFg;
}

// classes: 0 horizontal bar, 1 vertical bar, 2 center blob, 3 diagonal
inline const std::vector<ShapeVariant>& shape_variants() {
    static const std::vector<ShapeVariant> variants = [] {
        std::vector<ShapeVariant> vs;
        for (std::size_t r = 1; r <= 6; ++r) {
            Vector img = shape_canvas();
            for (std::size_t c = 0; c < kShapeSide; ++c) set_pixel(img, r, c);
            vs.push_back({0, std::move(img)});
        }
        for (std::size_t c = 1; c <= 6; ++c) {
            Vector img = shape_canvas();
            for (std::size_t r = 0; r < kShapeSide; ++r) set_pixel(img, r, c);
            vs.push_back({1, std::move(img)});
        }
        Vector blob = shape_canvas();
        for (std::size_t r = 2; r <= 5; ++r)
            for (std::size_t c = 2; c <= 5; ++c) set_pixel(blob, r, c);
        vs.push_back({2, std::move(blob)});
        Vector diag = shape_canvas();
        for (std::size_t r = 0; r < kShapeSide; ++r) set_pixel(diag, r, r);
        vs.push_back({3, std::move(diag)});
        return vs;
    }();
    return variants;
}

}  // namespace detail

inline SynthResult shape_images(std::size_t n, double noise, std::uint64_t seed) {
    if (n < 2) throw ArgumentError("shape_images: n must be >= 2");
    const auto& variants = detail::shape_variants();
    std::vector<std::vector<std::size_t>> by_class(4);
    for (std::size_t v = 0; v < variants.size(); ++v)
        by_class[static_cast<std::size_t>(variants[v].label)].push_back(v);
    SplitRng rng(seed);
    SynthResult res;
    res.data.num_classes = 4;
    for (std::size_t i = 0; i < n; ++i) {
        int cls = static_cast<int>(i % 4);
        const auto& pool = by_class[static_cast<std::size_t>(cls)];
        Vector img = variants[pool[rng.index(pool.size())]].pixels;
        for (double& px : img) px = std::clamp(px + noise * rng.normal(), 0.05, 0.95);
        res.data.points.push_back(std::move(img));
        res.data.labels.push_back(cls);
    }
    res.labeler.num_classes = 4;
    res.labeler.fn = [](const Vector& x) {
        const auto& vs = detail::shape_variants();
        int best = vs[0].label;
        double bd = distance(x, vs[0].pixels);
        for (std::size_t v = 1; v < vs.size(); ++v) {
            double d = distance(x, vs[v].pixels);
            if (d < bd) {
                bd = d;
                best = vs[v].label;
            }
        }
        return best;
    };
    return res;
}

inline SynthResult synth_dataset(const std::string& kind, std::size_t n, double noise,
                                 std::uint64_t seed, std::size_t dim = 2) {
    if (kind == "two_moons") return two_moons(n, noise, seed);
    if (kind == "gaussian_blobs") return gaussian_blobs(n, noise, seed);
    if (kind == "linear_separable") return linear_separable(n, noise, seed, dim);
    if (kind == "shape_images") return shape_images(n, noise, seed);
    throw ConfigError("unknown synthetic dataset kind: " + kind);
}

}  // namespace robusta
