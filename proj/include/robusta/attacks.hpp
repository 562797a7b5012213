#pragma once

#include <string>

#include "robusta/robustness.hpp"

namespace robusta {

struct PgdConfig {
    double eps = 0.3;
    double step_size = 0.05;
    int steps = 40;
};

struct BgConfig {
    int max_iters = 50;
    double init_step = 0.1;
    double backtrack_factor = 0.5;
};

struct AttackConfig {
    double fgsm_eps = 0.1;
    PgdConfig pgd;
    BgConfig bg;
    double binary_search_tol = 1e-6;
    Metric metric = Metric::L2;

    void validate(std::size_t dim) const {
        if (!(fgsm_eps > 0.0)) throw ConfigError("attack: fgsm_eps must be positive");
        if (!(pgd.eps > 0.0) || !(pgd.step_size > 0.0) || pgd.steps < 1)
            throw ConfigError("attack: pgd parameters must be positive");
        if (bg.max_iters < 1 || !(bg.init_step > 0.0))
            throw ConfigError("attack: bg parameters must be positive");
        if (!(bg.backtrack_factor > 0.0 && bg.backtrack_factor < 1.0))
            throw ConfigError("attack: bg backtrack_factor must be in (0,1)");
        if (!(binary_search_tol > 0.0) ||
            binary_search_tol > 1e-3 * hypercube_diameter(dim))
            throw ConfigError("attack: binary_search_tol must be in (0, 1e-3*d]");
    }
};

enum class AttackSource { None, FGSM, PGD, BG };

inline const char* attack_source_name(AttackSource s) {
    switch (s) {
        case AttackSource::FGSM: return "FGSM";
        case AttackSource::PGD: return "PGD";
        case AttackSource::BG: return "BG";
        default: return "none";
    }
}

struct MarginRecord {
    Vector x;
    Vector x_star;
    AttackSource source = AttackSource::None;
    double distance = 0.0;
    bool flipped = false;
    bool multi_crossing = false;
};

inline double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// x' = clip(x + eps * sign(dCE(f(x), y_pred)/dx))
template <DifferentiableClassifier F>
Vector fgsm(const F& model, const Vector& x, int y_pred, double eps) {
    if (!(eps > 0.0)) throw ArgumentError("fgsm: eps must be positive");
    Vector g = model.input_grad_ce(x, y_pred);
    if (!all_finite(g)) throw NumericError("fgsm: non-finite gradient");
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + eps * sign0(g[i]);
    clip01(y);
    return y;
}

namespace detail {

inline void project_ball(Vector& z, const Vector& center, double eps, Metric metric) {
    if (metric == Metric::Linf) {
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] = std::clamp(z[i], center[i] - eps, center[i] + eps);
        return;
    }
    Vector d = sub(z, center);
    double norm = l2_norm(d);
    if (norm > eps) {
        double s = eps / norm;
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = center[i] + s * d[i];
    }
}

}  // namespace detail

// Projected gradient ascent of the CE loss inside B_eps(x); starts at x, no
// random init. With steps=1, step_size=eps and Linf this reduces to fgsm.
template <DifferentiableClassifier F>
Vector pgd(const F& model, const Vector& x, int y_pred, const PgdConfig& cfg,
           Metric metric = Metric::Linf) {
    if (cfg.steps < 1) throw ArgumentError("pgd: steps must be >= 1");
    if (cfg.eps < 0.0) throw ArgumentError("pgd: eps must be >= 0");
    if (cfg.eps == 0.0) return clipped01(x);
    Vector z = x;
    for (int t = 0; t < cfg.steps; ++t) {
        Vector g = model.input_grad_ce(z, y_pred);
        if (!all_finite(g)) throw NumericError("pgd: non-finite gradient");
        if (metric == Metric::Linf) {
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += cfg.step_size * sign0(g[i]);
        } else {
            double norm = l2_norm(g);
            if (norm > 0.0)
                for (std::size_t i = 0; i < z.size(); ++i)
                    z[i] += cfg.step_size * g[i] / norm;
        }
        detail::project_ball(z, x, cfg.eps, metric);
        clip01(z);
    }
    return z;
}

// Boundary-gradient stand-in: descends the top-2 discriminant gap
// p_i - p_runner_up with backtracking line search until the label flips.
template <DifferentiableClassifier F>
Vector boundary_gradient(const F& model, const Vector& x, const BgConfig& cfg) {
    if (cfg.max_iters < 1) throw ArgumentError("boundary_gradient: max_iters must be >= 1");
    int base = model.predict(x);
    Vector z = clipped01(x);
    for (int it = 0; it < cfg.max_iters; ++it) {
        Vector p = model.probs(z);
        if (argmax_lowest(p) != base) return z;
        int j = -1;
        for (int k = 0; k < static_cast<int>(p.size()); ++k) {
            if (k == base) continue;
            if (j < 0 || p[static_cast<std::size_t>(k)] > p[static_cast<std::size_t>(j)]) j = k;
        }
        if (j < 0) return z;  // single-class model
        double gap = p[static_cast<std::size_t>(base)] - p[static_cast<std::size_t>(j)];
        Vector cot(p.size(), 0.0);
        cot[static_cast<std::size_t>(base)] = 1.0;
        cot[static_cast<std::size_t>(j)] = -1.0;
        Vector g = model.input_grad_probs(z, cot);
        if (!all_finite(g)) throw NumericError("boundary_gradient: non-finite gradient");
        double norm = l2_norm(g);
        if (norm == 0.0) return z;  // flat gap, nothing to descend
        double step = cfg.init_step;
        bool moved = false;
        while (step > 1e-14) {
            Vector cand(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) cand[i] = z[i] - step * g[i] / norm;
            clip01(cand);
            Vector pc = model.probs(cand);
            int lc = argmax_lowest(pc);
            double gc = pc[static_cast<std::size_t>(base)] - pc[static_cast<std::size_t>(j)];
            if (lc != base || gc < gap) {
                z = std::move(cand);
                moved = true;
                break;
            }
            step *= cfg.backtrack_factor;
        }
        if (!moved) return z;
    }
    return z;
}

// Bisects the segment x -> x_adv down to |t_hi - t_lo| * |x_adv - x| <= tol
// and returns the adversarial-side endpoint. If a probe finds an earlier
// crossing the search restarts below it and *multi_crossing is set.
template <ClassifierModel F>
Vector binary_search_refine(const F& model, const Vector& x, const Vector& x_adv, double tol,
                            bool* multi_crossing = nullptr, Metric metric = Metric::L2) {
    if (!(tol > 0.0)) throw ArgumentError("binary_search_refine: tol must be positive");
    int base = model.predict(x);
    if (model.predict(x_adv) == base)
        throw NotAdversarialError("binary_search_refine: endpoint has the same label as x");
    if (multi_crossing) *multi_crossing = false;
    double len = distance(x, x_adv, metric);
    Vector dir = sub(x_adv, x);
    auto at = [&](double t) {
        Vector z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + t * dir[i];
        return z;
    };
    double lo = 0.0, hi = 1.0;
    if (len > 0.0) {
        for (int pass = 0; pass < 8; ++pass) {
            while ((hi - lo) * len > tol) {
                double mid = 0.5 * (lo + hi);
                if (model.predict(at(mid)) != base)
                    hi = mid;
                else
                    lo = mid;
            }
            // probe for a crossing the bracket skipped
            bool earlier = false;
            constexpr int kProbes = 16;
            for (int k = 1; k < kProbes; ++k) {
                double t = lo * static_cast<double>(k) / static_cast<double>(kProbes);
                if (t <= 0.0) continue;
                if (model.predict(at(t)) != base) {
                    if (multi_crossing) *multi_crossing = true;
                    hi = t;
                    lo = 0.0;
                    earlier = true;
                    break;
                }
            }
            if (!earlier) break;
        }
    }
    return at(hi);
}

// Runs the three attacks, refines every flip, keeps the closest. A full miss
// is encoded as flipped=false at the clipped-margin distance d.
template <DifferentiableClassifier F>
MarginRecord ensemble_adversarial(const F& model, const Vector& x, const AttackConfig& cfg) {
    cfg.validate(x.size());
    int base = model.predict(x);
    MarginRecord rec;
    rec.x = x;
    rec.x_star = x;
    rec.flipped = false;
    rec.distance = hypercube_diameter(x.size());

    auto consider = [&](Vector cand, AttackSource src) {
        if (model.predict(cand) == base) return;
        bool multi = false;
        Vector refined = binary_search_refine(model, x, cand, cfg.binary_search_tol, &multi,
                                              cfg.metric);
        double dist = distance(x, refined, cfg.metric);
        if (!rec.flipped || dist < rec.distance) {
            rec.x_star = std::move(refined);
            rec.source = src;
            rec.distance = dist;
            rec.flipped = true;
            rec.multi_crossing = multi;
        }
    };

    consider(fgsm(model, x, base, cfg.fgsm_eps), AttackSource::FGSM);
    consider(pgd(model, x, base, cfg.pgd, cfg.metric), AttackSource::PGD);
    consider(boundary_gradient(model, x, cfg.bg), AttackSource::BG);
    return rec;
}

template <DifferentiableClassifier F>
MarginOracle ensemble_margin_oracle(const F& model, AttackConfig cfg) {
    MarginOracle o;
    o.kind = "attack_ensemble";
    o.margin = [&model, cfg = std::move(cfg)](const Vector& x) {
        return ensemble_adversarial(model, x, cfg).distance;
    };
    return o;
}

}  // namespace robusta
