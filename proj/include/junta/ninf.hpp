#pragma once

#include <cmath>
#include <ostream>
#include <utility>
#include <vector>

#include "junta/oracle.hpp"

namespace junta {

// NormInf_U[f] = sum_{S superset U} f^(S)^2 / C(|S|, |U|)
inline double norm_inf_exact(const FourierSpectrum& s, CoordSet U) {
    double acc = 0.0;
    const int u = U.size();
    for (std::size_t S = 0; S < s.coeffs.size(); ++S) {
        if ((S & U.bits) != U.bits) continue;
        acc += s.coeffs[S] * s.coeffs[S] / binomial(std::popcount(S), u);
    }
    return acc;
}

// g = sum_{S superset U} f^(S) chi_{S \ U}, built by repeated halved
// differences g_{S+u}(x) = (g_S(x) - g_S(x^{xor u})) / 2, then g = g_U chi_U.
inline BooleanFunction derivative_fn(const BooleanFunction& f, CoordSet U) {
    std::vector<double> v = f.values();
    std::vector<double> next(v.size());
    for (int u : U.elements()) {
        if (u >= f.arity()) throw DomainError("coordinate outside the domain");
        const Point b = Point{1} << u;
        for (Point x = 0; x < v.size(); ++x) next[x] = 0.5 * (v[x] - v[x ^ b]);
        v.swap(next);
    }
    for (Point x = 0; x < v.size(); ++x) v[x] *= chi(U.bits, x);
    return BooleanFunction(f.arity(), std::move(v), f.bound());
}

// chi_U(x) * sum_{T subset U} 2^{-|U|} (-1)^{|T|} A(x^{xor T}): 2^|U| calls per
// query, same bound.
class DerivativeOracle final : public ForwardingOracle {
public:
    DerivativeOracle(OraclePtr inner, CoordSet U) : ForwardingOracle(inner, inner->bound()), U_(U) {
        if (U.size() > 20) throw CapacityError("derivative set too large");
    }

    double query(Point x, Rng& rng) const override {
        double s = 0.0;
        for (Point T = U_.bits;; T = (T - 1) & U_.bits) {
            s += ((std::popcount(T) & 1) ? -1.0 : 1.0) * inner_->query(x ^ T, rng);
            if (T == 0) break;
        }
        return std::clamp(chi(U_.bits, x) * std::ldexp(s, -U_.size()), -bound(), bound());
    }
    bool deterministic() const override { return inner_->deterministic(); }
    std::uint64_t fanout() const override { return (std::uint64_t{1} << U_.size()) * inner_->fanout(); }
    BooleanFunction represented() const override { return derivative_fn(inner_->represented(), U_); }

private:
    CoordSet U_;
};

inline OraclePtr derivative_fn(OraclePtr o, CoordSet U) { return std::make_shared<const DerivativeOracle>(std::move(o), U); }

struct NinfEstimateParams {
    double B = 1.0;
    double eps = 0.05;
    double delta = 0.1;
    int u = 0;  // |U|
    Regime regime = Regime::desk;
    std::uint64_t M = 1;

    static NinfEstimateParams make(double B, double eps, double delta, int u, Regime regime = Regime::desk) {
        if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0,1]");
        if (!(delta > 0.0 && delta < 0.25)) throw DomainError("delta must lie in (0,1/4)");
        if (!(B > 0.0)) throw DomainError("bound must be positive");
        if (u < 0 || u > 6) throw CapacityError("|U| is capped at 6");
        NinfEstimateParams p{B, eps, delta, u, regime, 1};
        const double uf = static_cast<double>(factorial(u));
        double m;
        if (regime == Regime::paper)
            m = 1000.0 * std::pow(uf, 4) * std::pow(B, 4) * std::log(1.0 / delta) / (eps * eps);
        else
            // Hoeffding for per-trial values in [-B^2, B^2]
            m = 2.0 * std::pow(B, 4) * std::log(2.0 / delta) / (eps * eps);
        if (m > 1e15) throw CapacityError("trial count out of range");
        p.M = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(m)));
        return p;
    }
};

// Minimum of u uniforms on [0,1]; 1 when u = 0.
inline double min_of_uniforms(int u, Rng& rng) {
    double y = 1.0;
    for (int i = 0; i < u; ++i) y = std::min(y, uniform01(rng));
    return y;
}

// Each trial draws y = min of |U| uniforms and estimates E_x[(T_{sqrt y} g)^2]
// for the derivative g; E_y of that equals NormInf_U[f]. The desk regime uses
// the product of two independent noisy answers at one uniform x; Regime::paper
// runs the Z/D estimator per trial.
inline double estimate_ninf(OraclePtr o, CoordSet U, const NinfEstimateParams& p, Rng& rng) {
    if (U.size() != p.u) throw DomainError("parameter set built for a different |U|");
    const int n = o->arity();
    auto g = derivative_fn(std::move(o), U);
    const double B2 = p.B * p.B;
    const std::uint64_t seed = rng();
    double acc;
    if (p.regime == Regime::desk) {
        acc = chunked_sum(p.M, seed, [&](Rng& r, std::uint64_t lo, std::uint64_t hi) {
            double s = 0.0;
            for (std::uint64_t t = lo; t < hi; ++t) {
                const double rho = std::sqrt(min_of_uniforms(p.u, r));
                NoiseSampler noise(rho, CoordSet::full(n));
                const Point x = uniform_point(n, r);
                const double a = g->query(noise(x, r), r);
                const double b = g->query(noise(x, r), r);
                s += a * b;
            }
            return s;
        });
    } else {
        const double uf2 = std::pow(static_cast<double>(factorial(p.u)), 2);
        const double e = std::min(0.25, p.eps / (4.0 * uf2));
        const double d = std::min(0.25, p.eps / (100.0 * B2 * uf2));
        acc = chunked_sum(p.M, seed, [&](Rng& r, std::uint64_t lo, std::uint64_t hi) {
            double s = 0.0;
            for (std::uint64_t t = lo; t < hi; ++t) {
                const double rho = std::sqrt(min_of_uniforms(p.u, r));
                auto noisy = noisy_oracle(g, rho, CoordSet::full(n));
                s += estimate_l2(*noisy, e, d, r, Regime::paper);
            }
            return s;
        });
    }
    return std::clamp(acc / static_cast<double>(p.M), 0.0, B2);
}

// Gauss-Legendre nodes and weights on [0,1].
inline std::vector<std::pair<double, double>> gauss_legendre01(int n) {
    std::vector<std::pair<double, double>> out;
    for (int i = 1; i <= n; ++i) {
        double z = std::cos(M_PI * (i - 0.25) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        out.emplace_back(0.5 * (1.0 - z), 1.0 / ((1.0 - z * z) * dp * dp));
    }
    return out;
}

// lhs = E_y E_x[(T_{sqrt y} g)^2] with y the minimum of |U| uniforms, integrated
// by quadrature against the density |U| (1-y)^{|U|-1}; rhs = NormInf_U[f].
inline std::pair<double, double> integral_identity_check(const FourierSpectrum& s, CoordSet U) {
    const int u = U.size();
    std::vector<double> level(static_cast<std::size_t>(s.n) + 1, 0.0);  // weight by |S \ U|
    for (std::size_t S = 0; S < s.coeffs.size(); ++S)
        if ((S & U.bits) == U.bits) level[std::popcount(S) - u] += s.coeffs[S] * s.coeffs[S];
    double lhs = 0.0;
    if (u == 0) {
        for (double w : level) lhs += w;
    } else {
        for (auto [y, wt] : gauss_legendre01(32)) {
            double inner = 0.0, pw = 1.0;
            for (double w : level) {
                inner += w * pw;
                pw *= y;
            }
            lhs += wt * u * std::pow(1.0 - y, u - 1) * inner;
        }
    }
    return {lhs, norm_inf_exact(s, U)};
}

// ---------------------------------------------------------------------------
// Level sampling

struct LevelTable {
    std::vector<CoordSet> sets;
    std::vector<double> lambda;  // estimates, possibly negative before clamping

    double clamped_total() const {
        double t = 0.0;
        for (double l : lambda) t += std::max(0.0, l);
        return t;
    }

    CoordSet sample(Rng& rng) const {
        const double total = clamped_total();
        if (!(total > 0.0)) throw EmptyDistributionError("all normalized influence estimates are zero");
        double u = uniform01(rng) * total;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const double l = std::max(0.0, lambda[i]);
            if (u < l) return sets[i];
            u -= l;
        }
        for (std::size_t i = sets.size(); i-- > 0;)
            if (lambda[i] > 0.0) return sets[i];
        return sets.back();
    }

    void write_csv(std::ostream& os) const {
        os << "U,lambda\n";
        for (std::size_t i = 0; i < sets.size(); ++i) os << sets[i].bits << ',' << lambda[i] << '\n';
    }
};

inline LevelTable level_table(OraclePtr o, int gamma, const NinfEstimateParams& p, Rng& rng) {
    const int n = o->arity();
    if (gamma < 0 || gamma > n) throw DomainError("level outside [0, n]");
    if (binomial(n, gamma) > 5000) throw CapacityError("too many level sets to enumerate");
    LevelTable t;
    t.sets = subsets_of_size(CoordSet::full(n), gamma);
    t.lambda.assign(t.sets.size(), 0.0);
    const std::uint64_t seed = rng();
    parallel_for(t.sets.size(), [&](std::size_t i) {
        Rng r = make_rng(seed, i);
        t.lambda[i] = estimate_ninf(o, t.sets[i], p, r);
    });
    return t;
}

// The same table filled with exact values from a spectrum.
inline LevelTable level_table_exact(const FourierSpectrum& s, int gamma) {
    if (gamma < 0 || gamma > s.n) throw DomainError("level outside [0, n]");
    LevelTable t;
    t.sets = subsets_of_size(CoordSet::full(s.n), gamma);
    for (CoordSet U : t.sets) t.lambda.push_back(norm_inf_exact(s, U));
    return t;
}

struct LevelSample {
    CoordSet set;
    LevelTable table;
};

inline LevelSample sample_level_set(OraclePtr o, int gamma, double accuracy, Rng& rng, double delta = 0.01,
                                    Regime regime = Regime::desk) {
    auto p = NinfEstimateParams::make(std::max(o->bound(), 1e-12), accuracy, delta, gamma, regime);
    LevelSample s;
    s.table = level_table(std::move(o), gamma, p, rng);
    s.set = s.table.sample(rng);
    return s;
}

}  // namespace junta
