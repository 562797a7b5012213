#pragma once

#include <memory>
#include <optional>
#include <string>

#include "robusta/classifiers.hpp"
#include "robusta/kernels.hpp"

namespace robusta {

// ---- H and G choices ----

enum class HChoice { Indicator, Identity };

inline double apply_h(HChoice h, double rho) {
    if (h == HChoice::Indicator) return rho == 1.0 ? 1.0 : 0.0;
    return rho;
}

inline const char* h_name(HChoice h) {
    return h == HChoice::Indicator ? "indicator" : "identity";
}

inline HChoice h_from_name(const std::string& s) {
    if (s == "indicator") return HChoice::Indicator;
    if (s == "identity") return HChoice::Identity;
    throw ConfigError("unknown H choice: " + s);
}

// G is either the constant 1 on the hypercube or the empirical density of a
// dataset (scores then average over the dataset's points).
struct GChoice {
    enum class Tag { ConstantOne, EmpiricalDensity };
    Tag tag = Tag::ConstantOne;
    std::shared_ptr<const LabeledDataset> dataset;

    static GChoice constant_one() { return {}; }

    static GChoice empirical(LabeledDataset data) {
        data.validate();
        if (data.empty()) throw ArgumentError("GChoice::empirical: empty dataset");
        GChoice g;
        g.tag = Tag::EmpiricalDensity;
        g.dataset = std::make_shared<const LabeledDataset>(std::move(data));
        return g;
    }
};

// Mass of the empirical measure at exactly x (atoms only); 1 for constant G.
inline double g_value(const GChoice& g, const Vector& x) {
    if (g.tag == GChoice::Tag::ConstantOne) return 1.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < g.dataset->size(); ++i)
        if (g.dataset->points[i] == x) mass += g.dataset->weight(i);
    return mass;
}

// ---- Margin oracles ----

struct MarginOracle {
    std::string kind;
    std::function<double(const Vector&)> margin;

    double operator()(const Vector& x) const { return margin(x); }
};

inline MarginOracle analytic_margin_oracle(LinearClassifier lin) {
    MarginOracle o;
    o.kind = "analytic_linear";
    o.margin = [lin = std::move(lin)](const Vector& x) { return linear_margin(lin, x); };
    return o;
}

// 1 iff no label change among n draws from Q(.|x). Upper-biased estimate of
// the indicator H(rho) for non-ball kernels.
template <ClassifierModel F>
double indicator_by_sampling(const F& f, const PerturbationKernel& Q, const Vector& x,
                             std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("indicator_by_sampling: n must be >= 1");
    int base = f.predict(x);
    SplitRng root(seed);
    for (std::size_t i = 0; i < n; ++i) {
        SplitRng draw = root.fork(i);
        if (f.predict(Q(x, draw)) != base) return 0.0;
    }
    return 1.0;
}

// Margin by bisection on the ball radius: the largest r such that n samples
// in B_r(x) produce no label change. Upper-biased, deterministic given seed.
template <ClassifierModel F>
MarginOracle dense_sampling_margin_oracle(const F& f, double d, Metric metric = Metric::L2,
                                          std::size_t n_inner = 10000, std::uint64_t seed = 0,
                                          std::size_t iters = 40) {
    if (!(d > 0.0)) throw ArgumentError("dense_sampling_margin_oracle: d must be positive");
    MarginOracle o;
    o.kind = "dense_sampling";
    o.margin = [&f, d, metric, n_inner, seed, iters](const Vector& x) {
        SplitRng root(seed);
        double lo = 0.0, hi = d;
        if (indicator_by_sampling(f, uniform_ball_kernel(d, metric), x, n_inner,
                                  root.fork(0).next_u64()) == 1.0)
            return d;
        for (std::size_t it = 1; it <= iters; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= 0.0) break;
            double ind = indicator_by_sampling(f, uniform_ball_kernel(mid, metric), x, n_inner,
                                               root.fork(it).next_u64());
            (ind == 1.0 ? lo : hi) = mid;
        }
        return lo;
    };
    return o;
}

// ---- Basic robustness rho and pointwise robustness function ----

struct RhoEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Monte-Carlo estimate of rho_Q^f(x) = Q({x' : f(x') = f(x)} | x).
template <ClassifierModel F>
RhoEstimate rho(const F& f, const PerturbationKernel& Q, const Vector& x, std::size_t n,
                std::uint64_t seed) {
    if (n < 1) throw ArgumentError("rho: n must be >= 1");
    int base = f.predict(x);
    std::size_t agree = 0;
    SplitRng root(seed);
    for (std::size_t i = 0; i < n; ++i) {
        SplitRng draw = root.fork(i);
        if (f.predict(Q(x, draw)) == base) ++agree;
    }
    RhoEstimate est;
    est.value = static_cast<double>(agree) / static_cast<double>(n);
    est.stderr_ = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n));
    est.n = n;
    return est;
}

// Sampling plan shared by the score estimators. The margin oracle, when set,
// turns indicator-H on ball kernels into an exact margin comparison.
struct RobustnessSpec {
    std::size_t n_inner = 1000;
    std::size_t n_outer = 1000;
    std::size_t dim = 2;  // hypercube dimension for uniform-G sampling
    std::uint64_t seed = 0;
    std::optional<MarginOracle> margin_oracle;

    void validate() const {
        if (n_inner < 1 || n_outer < 1)
            throw ArgumentError("RobustnessSpec: counts must be >= 1");
        if (dim < 1) throw ArgumentError("RobustnessSpec: dim must be >= 1");
    }
};

inline std::optional<double> ball_epsilon(const PerturbationKernel& Q) {
    if (Q.descriptor.contains("kind") && Q.descriptor["kind"] == "uniform_ball")
        return Q.descriptor["epsilon"].get<double>();
    return std::nullopt;
}

namespace detail {

// H(rho) at one point, routed through the margin sharpening when possible.
template <ClassifierModel F>
double h_term(const F& f, const PerturbationKernel& Q, HChoice h, const Vector& x,
              const RobustnessSpec& spec, std::uint64_t seed, double* se) {
    if (se) *se = 0.0;
    if (h == HChoice::Indicator) {
        if (spec.margin_oracle) {
            if (auto eps = ball_epsilon(Q))
                return (*spec.margin_oracle)(x) >= *eps ? 1.0 : 0.0;
        }
        return indicator_by_sampling(f, Q, x, spec.n_inner, seed);
    }
    RhoEstimate est = rho(f, Q, x, spec.n_inner, seed);
    if (se) *se = est.stderr_;
    return est.value;
}

}  // namespace detail

// Pointwise robustness function H(rho_Q^f(x)) * G(x).
template <ClassifierModel F>
double robustness_function(const F& f, const PerturbationKernel& Q, HChoice h, const GChoice& g,
                           const Vector& x, const RobustnessSpec& spec) {
    spec.validate();
    return detail::h_term(f, Q, h, x, spec, SplitRng(spec.seed).next_u64(), nullptr) *
           g_value(g, x);
}

// ---- Scores ----

struct ScoreResult {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// R_{Q,H,G}. G = empirical density: weighted average of H(rho) over dataset
// points. G = 1: Monte-Carlo average over uniform hypercube points (volume 1).
template <ClassifierModel F>
ScoreResult score_Q(const F& f, const PerturbationKernel& Q, HChoice h, const GChoice& g,
                    const RobustnessSpec& spec) {
    spec.validate();
    SplitRng root(spec.seed);
    ScoreResult res;
    if (g.tag == GChoice::Tag::EmpiricalDensity) {
        const LabeledDataset& data = *g.dataset;
        double var = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double se = 0.0;
            double t = detail::h_term(f, Q, h, data.points[i], spec, root.fork(i).next_u64(), &se);
            double w = data.weight(i);
            res.value += w * t;
            var += w * w * se * se;
        }
        res.stderr_ = std::sqrt(var);
        res.n = data.size();
        return res;
    }
    SplitRng point_rng = root.fork(0);
    double sum = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < spec.n_outer; ++j) {
        Vector x(spec.dim);
        for (double& c : x) c = point_rng.uniform01();
        double t = detail::h_term(f, Q, h, x, spec, root.fork(j + 1).next_u64(), nullptr);
        sum += t;
        sq += t * t;
    }
    double n = static_cast<double>(spec.n_outer);
    res.value = sum / n;
    double var = n > 1 ? std::max(0.0, (sq - n * res.value * res.value) / (n - 1.0)) : 0.0;
    res.stderr_ = std::sqrt(var / n);
    res.n = spec.n_outer;
    return res;
}

// The largest value score_Q can attain for the given G: the same accumulation
// with every H term replaced by 1. Bit-comparable with score_Q output.
inline ScoreResult max_attainable_score(const GChoice& g, const RobustnessSpec& spec) {
    spec.validate();
    ScoreResult res;
    if (g.tag == GChoice::Tag::EmpiricalDensity) {
        const LabeledDataset& data = *g.dataset;
        for (std::size_t i = 0; i < data.size(); ++i) res.value += data.weight(i) * 1.0;
        res.n = data.size();
        return res;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < spec.n_outer; ++j) sum += 1.0;
    res.value = sum / static_cast<double>(spec.n_outer);
    res.n = spec.n_outer;
    return res;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2) throw ArgumentError("uniform_grid: need at least 2 points");
    if (!(hi > lo)) throw ArgumentError("uniform_grid: hi must exceed lo");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

// R_{family,H,G}: trapezoid quadrature of score_Q(kernel_at(eps)) * q(eps)
// over the grid.
template <ClassifierModel F>
ScoreResult score_family(const F& f, const KernelFamily& family, HChoice h, const GChoice& g,
                         const std::vector<double>& eps_grid, const RobustnessSpec& spec) {
    spec.validate();
    if (eps_grid.size() < 2) throw ArgumentError("score_family: grid needs at least 2 points");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (i > 0 && !(eps_grid[i] > eps_grid[i - 1]))
            throw ArgumentError("score_family: grid must be strictly increasing");
        if (eps_grid[i] < family.lo - 1e-12 || eps_grid[i] > family.hi + 1e-12)
            throw ArgumentError("score_family: grid point outside family domain");
    }
    SplitRng root(spec.seed);
    std::vector<double> vals(eps_grid.size()), ses(eps_grid.size());
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        RobustnessSpec sub = spec;
        sub.seed = root.fork(i).next_u64();
        ScoreResult s = score_Q(f, family.kernel_at(eps_grid[i]), h, g, sub);
        double q = family.q(eps_grid[i]);
        vals[i] = s.value * q;
        ses[i] = s.stderr_ * q;
    }
    ScoreResult res;
    double var = 0.0;
    for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i) {
        double w = 0.5 * (eps_grid[i + 1] - eps_grid[i]);
        res.value += w * (vals[i] + vals[i + 1]);
        var += w * w * (ses[i] * ses[i] + ses[i + 1] * ses[i + 1]);
    }
    res.stderr_ = std::sqrt(var);
    res.n = eps_grid.size() * spec.n_outer;
    return res;
}

// ---- Margin curves (Example 3) and the average margin ----

struct MarginCurvePoint {
    double epsilon = 0.0;
    double R = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

struct MarginCurve {
    std::vector<MarginCurvePoint> points;
    std::size_t failures = 0;           // oracle errors, excluded from R
    std::vector<std::size_t> failed_ids;
};

// Margins for every dataset point, clipped to the hypercube diameter; oracle
// failures are recorded, never silently dropped.
inline std::vector<double> collect_margins(const LabeledDataset& data, const MarginOracle& oracle,
                                           double d, MarginCurve* failures_into = nullptr) {
    std::vector<double> margins;
    margins.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        try {
            margins.push_back(std::min(oracle(data.points[i]), d));
        } catch (const Error&) {
            margins.push_back(std::numeric_limits<double>::quiet_NaN());
            if (failures_into) {
                failures_into->failures += 1;
                failures_into->failed_ids.push_back(i);
            }
        }
    }
    return margins;
}

inline MarginCurve margin_curve(const LabeledDataset& data, const std::vector<double>& eps_grid,
                                const MarginOracle& oracle) {
    if (data.empty()) throw ArgumentError("margin_curve: empty dataset");
    if (eps_grid.empty()) throw ArgumentError("margin_curve: empty grid");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i - 1]))
            throw ArgumentError("margin_curve: grid must be strictly increasing");
    double d = hypercube_diameter(data.dim());
    MarginCurve curve;
    std::vector<double> margins = collect_margins(data, oracle, d, &curve);
    double total_w = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!std::isnan(margins[i])) total_w += data.weight(i);
    if (total_w <= 0.0) throw NumericError("margin_curve: every margin evaluation failed");
    std::size_t ok = data.size() - curve.failures;
    for (double eps : eps_grid) {
        double mass = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (!std::isnan(margins[i]) && margins[i] >= eps) mass += data.weight(i);
        MarginCurvePoint pt;
        pt.epsilon = eps;
        pt.R = mass / total_w;
        pt.stderr_ = std::sqrt(std::max(0.0, pt.R * (1.0 - pt.R) / static_cast<double>(ok)));
        pt.n = ok;
        curve.points.push_back(pt);
    }
    return curve;
}

inline double auc_margin_curve(const MarginCurve& curve) {
    if (curve.points.empty()) throw ArgumentError("auc_margin_curve: empty curve");
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        double de = curve.points[i + 1].epsilon - curve.points[i].epsilon;
        if (!(de > 0.0)) throw ArgumentError("auc_margin_curve: epsilons must increase");
        area += 0.5 * de * (curve.points[i].R + curve.points[i + 1].R);
    }
    return area;
}

// Mean clipped margin over the dataset (the Eq. 9 route to the family score).
inline double average_margin(const LabeledDataset& data, const MarginOracle& oracle) {
    if (data.empty()) throw ArgumentError("average_margin: empty dataset");
    double d = hypercube_diameter(data.dim());
    std::vector<double> margins = collect_margins(data, oracle, d);
    double mean = 0.0, total_w = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (std::isnan(margins[i])) continue;
        mean += data.weight(i) * margins[i];
        total_w += data.weight(i);
    }
    if (total_w <= 0.0) throw NumericError("average_margin: every margin evaluation failed");
    return mean / total_w;
}

// Same, against the uniform density on the hypercube.
inline double average_margin_uniform(const MarginOracle& oracle, std::size_t dim, std::size_t n,
                                     std::uint64_t seed) {
    if (n < 1) throw ArgumentError("average_margin_uniform: n must be >= 1");
    double d = hypercube_diameter(dim);
    SplitRng rng(seed);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(dim);
        for (double& c : x) c = rng.uniform01();
        mean += std::min(oracle(x), d);
    }
    return mean / static_cast<double>(n);
}

// ---- Proposition 1 ----

inline double prop1_bound(double alpha, double epsilon, double delta) {
    for (double v : {alpha, epsilon, delta})
        if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("prop1_bound: inputs must be in [0,1]");
    return alpha - epsilon - delta;
}

struct Prop1Report {
    double alpha = 0.0, alpha_se = 0.0;
    double eps_hat = 0.0, eps_se = 0.0;
    double delta_hat = 0.0, delta_se = 0.0;
    double accuracy_qp = 0.0, accuracy_qp_se = 0.0;
    double bound = 0.0;
    double combined_se = 0.0;
    bool holds_with_slack = false;
};

// Checks accuracy under Q∘P >= alpha - eps - delta with 3 sigma slack, all
// four quantities estimated from the same dataset / labeler.
template <ClassifierModel F>
Prop1Report prop1_verify(const F& f, const PerturbationKernel& Q, const LabeledDataset& data,
                         const Labeler& labeler, const RobustnessSpec& spec) {
    spec.validate();
    if (data.empty()) throw ArgumentError("prop1_verify: empty dataset");
    Prop1Report rep;
    SplitRng root(spec.seed);

    for (std::size_t i = 0; i < data.size(); ++i)
        if (f.predict(data.points[i]) == labeler(data.points[i])) rep.alpha += data.weight(i);
    rep.alpha_se =
        std::sqrt(std::max(0.0, rep.alpha * (1.0 - rep.alpha) / static_cast<double>(data.size())));

    EpsilonEstimate eps = label_preserving_epsilon(Q, data, labeler, spec.n_outer, spec.n_inner,
                                                   root.fork(1).next_u64());
    rep.eps_hat = eps.value;
    rep.eps_se = eps.stderr_;

    RobustnessSpec sub = spec;
    sub.seed = root.fork(2).next_u64();
    ScoreResult r = score_Q(f, Q, HChoice::Identity, GChoice::empirical(data), sub);
    rep.delta_hat = 1.0 - r.value;
    rep.delta_se = r.stderr_;

    SplitRng acc_rng = root.fork(3);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < spec.n_outer; ++i) {
        std::size_t pi = data.weights.empty() ? acc_rng.index(data.size())
                                              : acc_rng.weighted_index(data.weights);
        SplitRng draw = acc_rng.fork(i);
        Vector xp = Q(data.points[pi], draw);
        if (f.predict(xp) == labeler(xp)) ++hits;
    }
    rep.accuracy_qp = static_cast<double>(hits) / static_cast<double>(spec.n_outer);
    rep.accuracy_qp_se = std::sqrt(
        std::max(0.0, rep.accuracy_qp * (1.0 - rep.accuracy_qp) / static_cast<double>(spec.n_outer)));

    rep.bound = rep.alpha - rep.eps_hat - rep.delta_hat;
    rep.combined_se = std::sqrt(rep.alpha_se * rep.alpha_se + rep.eps_se * rep.eps_se +
                                rep.delta_se * rep.delta_se + rep.accuracy_qp_se * rep.accuracy_qp_se);
    rep.holds_with_slack = rep.accuracy_qp >= rep.bound - 3.0 * rep.combined_se;
    return rep;
}

}  // namespace robusta
