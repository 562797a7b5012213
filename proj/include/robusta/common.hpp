#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace robusta {

using Vector = std::vector<double>;

// ---- Errors ----

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArgumentError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    explicit ParseError(const std::string& msg) : Error(msg), offset(0) {}
    std::size_t offset;
};

struct DegenerateClassifierError : Error {
    using Error::Error;
};

// Rejection sampling ran out of tries; carries how many attempts were made and
// the acceptance rate observed before giving up.
struct ConditioningInfeasibleError : Error {
    ConditioningInfeasibleError(std::size_t tries, double acceptance)
        : Error("label-aware conditioning infeasible: no accepted sample in " +
                std::to_string(tries) + " tries (acceptance estimate " +
                std::to_string(acceptance) + ")"),
          tries(tries),
          acceptance_estimate(acceptance) {}
    std::size_t tries;
    double acceptance_estimate;
};

struct EmptyNeighborhoodError : Error {
    using Error::Error;
};

struct NotAdversarialError : Error {
    using Error::Error;
};

struct DivergenceError : Error {
    DivergenceError(const std::string& what, std::size_t epoch, std::size_t batch)
        : Error(what + " (epoch " + std::to_string(epoch) + ", batch " +
                std::to_string(batch) + ")"),
          epoch(epoch),
          batch(batch) {}
    std::size_t epoch;
    std::size_t batch;
};

// ---- Matrix (row-major, dense) ----

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    std::size_t size() const { return a.size(); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    // y = A x
    Vector mul(const Vector& x) const {
        if (x.size() != cols) throw ArgumentError("matrix-vector shape mismatch");
        Vector y(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* row = a.data() + i * cols;
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
            y[i] = s;
        }
        return y;
    }

    // y = A^T x
    Vector mul_transpose(const Vector& x) const {
        if (x.size() != rows) throw ArgumentError("matrix^T-vector shape mismatch");
        Vector y(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* row = a.data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) y[j] += row[j] * x[i];
        }
        return y;
    }
};

// ---- Metrics & small vector helpers ----

enum class Metric { L2, Linf };

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(const Vector& v) { return std::sqrt(dot(v, v)); }

inline double linf_norm(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double distance(const Vector& a, const Vector& b, Metric metric = Metric::L2) {
    if (a.size() != b.size()) throw ArgumentError("distance: dimension mismatch");
    double s = 0.0;
    if (metric == Metric::L2) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[i] - b[i];
            s += d * d;
        }
        return std::sqrt(s);
    }
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

inline Vector sub(const Vector& a, const Vector& b) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vector add(const Vector& a, const Vector& b) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vector scaled(const Vector& a, double s) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

inline bool all_finite(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Input space is the unit hypercube; every produced point gets clipped back into it.
inline void clip01(Vector& v) {
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
}

inline Vector clipped01(Vector v) {
    clip01(v);
    return v;
}

inline bool in_hypercube(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
}

// Hypercube diameter d = sqrt(m).
inline double hypercube_diameter(std::size_t dim) {
    return std::sqrt(static_cast<double>(dim));
}

inline int argmax_lowest(const Vector& v) {
    if (v.empty()) throw ArgumentError("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return static_cast<int>(best);
}

// ---- Parallel scheduling ----
//
// Per-point work throughout the library is pure and independently seeded, so a
// chunked thread split produces results identical to sequential execution.

inline unsigned env_thread_cap() {
    if (const char* s = std::getenv("ROBUSTA_THREADS")) {
        long v = std::strtol(s, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

template <typename F>
void parallel_for(std::size_t n, F&& body, unsigned threads = 0) {
    if (threads == 0) threads = env_thread_cap();
    threads = std::min<unsigned>(threads, std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace robusta
