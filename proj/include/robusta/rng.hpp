#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "robusta/common.hpp"

namespace robusta {

// Counter-based splittable generator (SplitMix64 finalizer over a keyed
// counter). A generator is identified by a key; `fork(stream)` derives an
// independent generator, so work keyed by (seed, point index, draw index) is
// order-independent and safe to schedule in parallel.
class SplitRng {
  public:
    explicit SplitRng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

    SplitRng(std::uint64_t seed, std::uint64_t stream) : SplitRng(seed) {
        *this = fork(stream);
    }

    SplitRng fork(std::uint64_t stream) const {
        SplitRng child(0);
        child.key_ = mix(key_ ^ mix(stream + kFork));
        child.counter_ = 0;
        return child;
    }

    std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

    // Uniform in [0,1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; consumes two uniforms, no cached spare.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        // avoid log(0)
        u1 = std::max(u1, 0x1.0p-53);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Index uniform in {0, ..., n-1}.
    std::size_t index(std::size_t n) {
        if (n == 0) throw ArgumentError("SplitRng::index: n must be positive");
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

    // Weighted index draw; weights need not be normalized but must be >= 0.
    std::size_t weighted_index(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) throw ArgumentError("weighted_index: nonpositive total weight");
        double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // UniformRandomBitGenerator interface.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return next_u64(); }

  private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kFork = 0xd1b54a32d192ed03ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace robusta
