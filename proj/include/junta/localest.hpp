#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "junta/flatpoly.hpp"
#include "junta/sharpnoise.hpp"

namespace junta {

struct LocalEstParams {
    int L = 1;
    double tau = 0.5;
    double c = 1.0;
    int r = 1;
    FlatPolynomial flat;

    // Explicit radius; fails unless the flat polynomial reaches tau.
    static LocalEstParams with_radius(int L, int r, double tau) {
        if (L < 1) throw DomainError("smoothness level must be positive");
        if (!(tau > 0.0)) throw DomainError("tau must be positive");
        LocalEstParams p;
        p.L = L;
        p.tau = tau;
        p.r = r;
        p.flat = build_flat_poly(r, L);
        if (p.flat.achieved_error > tau)
            throw DomainError("flat polynomial error " + std::to_string(p.flat.achieved_error) + " exceeds tau " +
                              std::to_string(tau) + "; raise r");
        return p;
    }

    // r = c * ceil(sqrt(L log L log(1/tau))), capped at L.
    static LocalEstParams make(int L, double tau, double c = 1.0) {
        if (L < 1) throw DomainError("smoothness level must be positive");
        if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0,1)");
        const double base = std::ceil(std::sqrt(L * std::log2(std::max(L, 2)) * std::log2(1.0 / tau)));
        const int r = std::clamp(static_cast<int>(std::ceil(c * base)), 1, L);
        auto p = with_radius(L, r, tau);
        p.c = c;
        return p;
    }

    // Coefficient of f(x^{xor D}) in local_g, as a function of t = |D|, when
    // the ball lives in an m-coordinate subcube:
    //   w(t) = [t=0] - (-1)^t sum_{s=max(t,1)}^{min(r,m)} alpha_s 2^{-s} C(m-t, s-t)
    std::vector<double> subcube_weights(int m) const {
        const int top = std::min(r, m);
        std::vector<double> w(static_cast<std::size_t>(top) + 1, 0.0);
        for (int t = 0; t <= top; ++t) {
            double s = 0.0;
            for (int j = std::max(t, 1); j <= top; ++j)
                s += flat.binom_coeffs[j - 1] * std::ldexp(1.0, -j) * binomial(m - t, j - t);
            w[t] = (t == 0 ? 1.0 : 0.0) - ((t & 1) ? -s : s);
        }
        return w;
    }
};

// ---------------------------------------------------------------------------
// Hamming balls. Points are listed by increasing distance from the center,
// and within one distance by increasing bitmask of the flipped coordinates.

inline std::vector<Point> ball_offsets(CoordSet domain, int r) {
    std::vector<Point> out;
    for (int t = 0; t <= std::min(r, domain.size()); ++t)
        for (CoordSet D : subsets_of_size(domain, t)) out.push_back(D.bits);
    return out;
}

inline std::size_t ball_size(int m, int r) {
    double s = 0.0;
    for (int t = 0; t <= std::min(r, m); ++t) s += binomial(m, t);
    return static_cast<std::size_t>(s);
}

struct BallValues {
    Point x = 0;
    int r = 0;
    CoordSet domain;
    std::vector<Point> offsets;
    std::vector<double> values;

    void reindex() {
        index_.clear();
        for (std::size_t i = 0; i < offsets.size(); ++i) index_.emplace(offsets[i], i);
    }

    double at_offset(Point D) const {
        auto it = index_.find(D);
        if (it == index_.end()) throw DomainError("point outside the ball");
        return values[it->second];
    }

private:
    std::unordered_map<Point, std::size_t> index_;
};

template <class F>
BallValues ball_values(F&& f, Point x, int r, CoordSet domain) {
    BallValues b;
    b.x = x;
    b.r = r;
    b.domain = domain;
    b.offsets = ball_offsets(domain, r);
    b.values.reserve(b.offsets.size());
    for (Point D : b.offsets) b.values.push_back(f(x ^ D));
    b.reindex();
    return b;
}

inline BallValues ball_values(const BooleanFunction& f, Point x, int r, CoordSet domain) {
    return ball_values([&f](Point y) { return f(y); }, x, r, domain);
}

// f(x) - sum_{1<=|S|<=r} alpha_|S| (d f / d x_S)(x) chi_S(x), with each
// derivative term computed as 2^{-|S|} sum_{T subset S} (-1)^|T| f(x^{xor T}).
inline double local_g(const BallValues& ball, const LocalEstParams& p) {
    if (ball.r != p.r) throw DomainError("ball radius differs from the estimator radius");
    double g = ball.at_offset(0);
    for (int s = 1; s <= std::min(p.r, ball.domain.size()); ++s) {
        const double a = p.flat.binom_coeffs[s - 1] * std::ldexp(1.0, -s);
        for (CoordSet S : subsets_of_size(ball.domain, s)) {
            double d = 0.0;
            for (Point T = S.bits;; T = (T - 1) & S.bits) {
                d += ((std::popcount(T) & 1) ? -1.0 : 1.0) * ball.at_offset(T);
                if (T == 0) break;
            }
            g -= a * d;
        }
    }
    return g;
}

inline double local_estimate(const BallValues& ball, const LocalEstParams& p) { return std::abs(local_g(ball, p)); }

// Est of a fixed function: E_x |local_g| of f restricted to x_U, over the ball
// around x in the complement of U. Exhaustive over all x.
inline double exact_est(const BooleanFunction& f, CoordSet U, const LocalEstParams& p) {
    const CoordSet Ubar = U.complement(f.arity());
    double s = 0.0;
    for (Point x = 0; x < f.size(); ++x) s += local_estimate(ball_values(f, x, p.r, Ubar), p);
    return s / static_cast<double>(f.size());
}

// ---------------------------------------------------------------------------
// Sample bundles. A bundle for x holds, for every ball point y (flips inside
// the complement of C only, radius r), every noise index i in [0, kappa Delta]
// and every replica, one draw from N_{rho^i}^{complement C}(y). Entries are
// regenerated from a per-bundle seed, one rng stream per ball point.

struct SampleBundle {
    Point x = 0;
    CoordSet C;
    int n = 0;
    int r = 0;
    double rho = 1.0;
    int degree = 0;  // kappa * Delta
    int replicas = 1;
    std::uint64_t seed = 0;
    std::vector<Point> offsets;

    CoordSet free_coords() const { return C.complement(n); }
    std::size_t entry_count() const { return offsets.size() * (degree + 1) * replicas; }

    // Calls visit(ball_index, i, replica, point) in storage order.
    template <class Visit>
    void for_each_entry(Visit&& visit) const {
        const CoordSet V = free_coords();
        std::vector<NoiseSampler> noise;
        for (int i = 0; i <= degree; ++i) noise.emplace_back(std::pow(rho, i), V);
        for (std::size_t b = 0; b < offsets.size(); ++b) {
            Rng rng = make_rng(seed, b);
            const Point y = x ^ offsets[b];
            for (int i = 0; i <= degree; ++i)
                for (int k = 0; k < replicas; ++k) visit(b, i, k, noise[i](y, rng));
        }
    }

    std::vector<Point> entries() const {
        std::vector<Point> out;
        out.reserve(entry_count());
        for_each_entry([&](std::size_t, int, int, Point z) { out.push_back(z); });
        return out;
    }
};

inline SampleBundle draw_bundle(Point x, CoordSet C, int n, const LocalEstParams& p, const NoiseMixture& mix,
                                int replicas, Rng& rng) {
    if (replicas < 1) throw DomainError("a bundle needs at least one replica");
    SampleBundle b;
    b.x = x;
    b.C = C;
    b.n = n;
    b.r = p.r;
    b.rho = mix.rho;
    b.degree = static_cast<int>(mix.alphas.size()) - 1;
    b.replicas = replicas;
    b.seed = rng();
    b.offsets = ball_offsets(C.complement(n), p.r);
    return b;
}

struct BundleEvalOptions {
    Regime regime = Regime::desk;
    // Paper regime only: accuracy of each per-entry value estimate.
    double eps_prime = 0.0;
    double delta_prime = 0.0;
};

// eps' = delta' = eps / (10 (kappa Delta + 1) |ball| sum|alpha|)
inline BundleEvalOptions paper_eval_options(double eps, const NoiseMixture& mix, std::size_t ball) {
    const double e = eps / (10.0 * static_cast<double>(mix.alphas.size()) * static_cast<double>(ball) * mix.abs_sum());
    return {Regime::paper, e, std::min(e, 0.5)};
}

// Query phase: for every bundle and ball point y, the value
//   S_y = sum_i alpha_i * mean over replicas of (estimate of h at B(y, i, rep)),
// which estimates (SharpNoise^{complement C} h)(y). Zero-weight noise indices are
// not queried.
struct EvaluatedBundles {
    CoordSet C;
    int n = 0;
    int r = 0;
    std::vector<Point> xs;
    std::vector<Point> offsets;
    std::vector<std::vector<double>> values;  // [bundle][ball index]
};

inline EvaluatedBundles evaluate_bundles(const ValueOracle& h, const std::vector<SampleBundle>& bundles,
                                         const NoiseMixture& mix, Rng& rng, BundleEvalOptions opt = {}) {
    EvaluatedBundles ev;
    if (bundles.empty()) return ev;
    const SampleBundle& b0 = bundles.front();
    ev.C = b0.C;
    ev.n = b0.n;
    ev.r = b0.r;
    ev.offsets = b0.offsets;
    for (const SampleBundle& b : bundles) {
        if (b.C != ev.C || b.r != ev.r || b.n != ev.n || b.degree + 1 != static_cast<int>(mix.alphas.size()))
            throw DomainError("bundles drawn with different parameters");
        std::vector<double> sums(b.offsets.size(), 0.0);
        const double inv = 1.0 / b.replicas;
        b.for_each_entry([&](std::size_t y, int i, int, Point z) {
            const double a = mix.alphas[i];
            if (a == 0.0) return;
            const double v = opt.regime == Regime::paper ? estimate_value(h, z, opt.eps_prime, opt.delta_prime, rng)
                                                         : h.query(z, rng);
            sums[y] += a * inv * v;
        });
        ev.xs.push_back(b.x);
        ev.values.push_back(std::move(sums));
    }
    return ev;
}

// Ball of bundle j restricted to flips inside the complement of U, carrying the
// evaluated S_y values.
inline BallValues bundle_ball(const EvaluatedBundles& ev, std::size_t j, CoordSet U) {
    BallValues b;
    b.x = ev.xs[j];
    b.r = ev.r;
    b.domain = U.complement(ev.n);
    for (std::size_t i = 0; i < ev.offsets.size(); ++i) {
        if (!CoordSet(ev.offsets[i]).subset_of(b.domain)) continue;
        b.offsets.push_back(ev.offsets[i]);
        b.values.push_back(ev.values[j][i]);
    }
    b.reindex();
    return b;
}

// Est'_{C,U}: mean over bundles of |sum_y w(|y xor x|) S_y| with y ranging over
// the ball in the complement of U. Uses no queries.
inline double estimate_junta_corr(const EvaluatedBundles& ev, CoordSet U, const LocalEstParams& p) {
    if (!ev.C.subset_of(U)) throw DomainError("C must be a subset of U");
    if (ev.r != p.r) throw DomainError("bundle radius differs from the estimator radius");
    if (ev.xs.empty()) throw DomainError("no bundles");
    const CoordSet Ubar = U.complement(ev.n);
    const auto w = p.subcube_weights(Ubar.size());
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t i = 0; i < ev.offsets.size(); ++i)
        if (CoordSet(ev.offsets[i]).subset_of(Ubar)) terms.emplace_back(i, w[std::popcount(ev.offsets[i])]);
    double total = 0.0;
    for (const auto& vals : ev.values) {
        double s = 0.0;
        for (const auto& [i, wt] : terms) s += wt * vals[i];
        total += std::abs(s);
    }
    return total / static_cast<double>(ev.values.size());
}

// Draw N uniform points with bundles, then evaluate them.
struct BundleSet {
    std::vector<SampleBundle> bundles;
    EvaluatedBundles evaluated;
};

inline BundleSet draw_and_evaluate(const ValueOracle& h, CoordSet C, const LocalEstParams& p, const NoiseMixture& mix,
                                   int N, int replicas, Rng& rng, BundleEvalOptions opt = {}) {
    BundleSet s;
    const int n = h.arity();
    for (int j = 0; j < N; ++j) {
        const Point x = uniform_point(n, rng);
        s.bundles.push_back(draw_bundle(x, C, n, p, mix, replicas, rng));
    }
    s.evaluated = evaluate_bundles(h, s.bundles, mix, rng, opt);
    return s;
}

}  // namespace junta
