#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "junta/boolfn.hpp"
#include "junta/flatpoly.hpp"
#include "junta/oracle.hpp"

namespace junta {

struct SharpNoiseParams {
    int ell = 1;
    int kappa = 5;
    int delta_exp = 1;
    double rho = 0.5;
    CoordSet V;

    static SharpNoiseParams make(int ell, int kappa, int delta_exp, CoordSet V) {
        if (ell < 1) throw DomainError("SharpNoise level must be positive");
        if (kappa < 5) throw DomainError("SharpNoise needs kappa >= 5");
        if (delta_exp < 1) throw DomainError("SharpNoise exponent must be positive");
        SharpNoiseParams p;
        p.ell = ell;
        p.kappa = kappa;
        p.delta_exp = delta_exp;
        p.rho = 1.0 - 1.0 / (2.0 * ell);
        p.V = V;
        return p;
    }

    int degree() const { return kappa * delta_exp; }
};

// lambda(c) = (1 - (1 - rho^c)^kappa)^Delta, evaluated in the log domain.
inline double lambda(int c, const SharpNoiseParams& p) {
    if (c < 0) throw DomainError("negative intersection size");
    if (c == 0) return 1.0;
    const double a = std::pow(p.rho, c);
    const double u = std::exp(p.kappa * std::log1p(-a));
    return std::exp(p.delta_exp * std::log1p(-u));
}

inline FourierSpectrum apply_exact(const FourierSpectrum& s, const SharpNoiseParams& p) {
    std::vector<double> lam(static_cast<std::size_t>(s.n) + 1);
    for (int c = 0; c <= s.n; ++c) lam[c] = lambda(c, p);
    FourierSpectrum out = s;
    for (std::size_t S = 0; S < out.coeffs.size(); ++S)
        out.coeffs[S] *= lam[std::popcount(static_cast<std::uint32_t>(S) & p.V.bits)];
    return out;
}

inline BooleanFunction apply_exact(const BooleanFunction& f, const SharpNoiseParams& p) {
    return inverse_wht(apply_exact(wht(f), p));
}

struct NoiseMixture {
    std::vector<double> alphas;  // alpha_0..alpha_{kappa Delta}
    double rho = 1.0;

    double abs_sum() const {
        double s = 0.0;
        for (double a : alphas) s += std::abs(a);
        return s;
    }
    // sum_i alpha_i (rho^c)^i; the alternating coefficients cancel heavily
    double attenuation(int c) const { return compensated_horner(alphas, std::pow(rho, c)); }
};

enum class IntegerMode { automatic, fixed64, big };

namespace detail {

inline bool mixture_fixed(int kappa, int delta, std::vector<std::int64_t>& out) {
    std::vector<std::int64_t> q(kappa + 1, 0);
    for (int j = 1; j <= kappa; ++j) {
        const double b = binomial(kappa, j);
        if (b > 9.0e18) return false;
        q[j] = (j & 1 ? 1 : -1) * static_cast<std::int64_t>(b);
    }
    std::vector<std::int64_t> acc{1};
    for (int d = 0; d < delta; ++d) {
        std::vector<std::int64_t> next(acc.size() + kappa, 0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (acc[i] == 0) continue;
            for (int j = 1; j <= kappa; ++j) {
                std::int64_t prod;
                if (__builtin_mul_overflow(acc[i], q[j], &prod)) return false;
                if (__builtin_add_overflow(next[i + j], prod, &next[i + j])) return false;
            }
        }
        acc.swap(next);
    }
    out = acc;
    return true;
}

inline std::vector<double> mixture_big(int kappa, int delta) {
    using boost::multiprecision::cpp_int;
    std::vector<cpp_int> q(kappa + 1, 0);
    cpp_int b = 1;
    for (int j = 1; j <= kappa; ++j) {
        b = b * (kappa - j + 1) / j;
        q[j] = (j & 1) ? b : cpp_int(-b);
    }
    std::vector<cpp_int> acc{1};
    for (int d = 0; d < delta; ++d) {
        std::vector<cpp_int> next(acc.size() + kappa, 0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (acc[i] == 0) continue;
            for (int j = 1; j <= kappa; ++j) next[i + j] += acc[i] * q[j];
        }
        acc.swap(next);
    }
    std::vector<double> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].convert_to<double>();
    return out;
}

}  // namespace detail

// Power-basis coefficients of (1 - (1 - x)^kappa)^Delta computed in exact
// integers, then cast.
inline std::vector<double> mixture_polynomial(int kappa, int delta_exp, IntegerMode mode = IntegerMode::automatic) {
    if (kappa < 1 || delta_exp < 1) throw DomainError("mixture needs kappa, Delta >= 1");
    if (mode != IntegerMode::big) {
        std::vector<std::int64_t> fixed;
        const bool ok = kappa * delta_exp <= 64 && detail::mixture_fixed(kappa, delta_exp, fixed);
        if (ok) return std::vector<double>(fixed.begin(), fixed.end());
        if (mode == IntegerMode::fixed64)
            throw CapacityError("mixture coefficients exceed 64-bit integers; use the big-integer path");
    }
    return detail::mixture_big(kappa, delta_exp);
}

inline NoiseMixture mixture_coeffs(const SharpNoiseParams& p, IntegerMode mode = IntegerMode::automatic) {
    return NoiseMixture{mixture_polynomial(p.kappa, p.delta_exp, mode), p.rho};
}

// sum_i alpha_i * (one query of the inner oracle at a rho^i-noisy point over V)
class SharpNoiseOracle final : public ForwardingOracle {
public:
    SharpNoiseOracle(OraclePtr inner, const SharpNoiseParams& p, bool residual)
        : ForwardingOracle(inner, (std::ldexp(1.0, 2 * p.degree()) + (residual ? 1.0 : 0.0)) * inner->bound()),
          params_(p),
          mix_(mixture_coeffs(p)),
          residual_(residual) {
        for (std::size_t i = 0; i < mix_.alphas.size(); ++i) noise_.emplace_back(std::pow(p.rho, i), p.V);
    }

    double query(Point x, Rng& rng) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < noise_.size(); ++i) s += mix_.alphas[i] * inner_->query(noise_[i](x, rng), rng);
        if (residual_) s = inner_->query(x, rng) - s;
        return s;
    }
    std::uint64_t fanout() const override { return (noise_.size() + (residual_ ? 1 : 0)) * inner_->fanout(); }
    BooleanFunction represented() const override {
        const BooleanFunction g = inner_->represented();
        const BooleanFunction s = apply_exact(g, params_);
        return residual_ ? g - s : s;
    }
    const NoiseMixture& mixture() const { return mix_; }

private:
    SharpNoiseParams params_;
    NoiseMixture mix_;
    std::vector<NoiseSampler> noise_;
    bool residual_;
};

inline std::shared_ptr<const SharpNoiseOracle> sharpnoise_oracle(OraclePtr o, const SharpNoiseParams& p) {
    return std::make_shared<const SharpNoiseOracle>(std::move(o), p, false);
}

// h = g - SharpNoise^V g
inline std::shared_ptr<const SharpNoiseOracle> h_oracle(OraclePtr o, const SharpNoiseParams& p) {
    return std::make_shared<const SharpNoiseOracle>(std::move(o), p, true);
}

}  // namespace junta
