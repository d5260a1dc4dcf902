#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "junta/core.hpp"

namespace junta {

class BooleanFunction {
public:
    BooleanFunction() = default;

    BooleanFunction(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
        check_arity(n);
        if (values_.size() != (std::size_t{1} << n)) throw DomainError("truth table has wrong length");
        bound_ = 0.0;
        sign_valued_ = true;
        for (double v : values_) {
            bound_ = std::max(bound_, std::abs(v));
            if (v != 1.0 && v != -1.0) sign_valued_ = false;
        }
    }

    BooleanFunction(int n, std::vector<double> values, double bound) : BooleanFunction(n, std::move(values)) {
        if (bound < bound_) throw DomainError("declared bound smaller than max |value|");
        bound_ = bound;
    }

    template <class F>
    static BooleanFunction from(int n, F&& fn) {
        check_arity(n);
        std::vector<double> v(std::size_t{1} << n);
        for (std::size_t x = 0; x < v.size(); ++x) v[x] = fn(static_cast<Point>(x));
        return BooleanFunction(n, std::move(v));
    }

    static BooleanFunction constant(int n, double c) {
        return from(n, [c](Point) { return c; });
    }
    static BooleanFunction character(int n, CoordSet S) {
        return from(n, [S](Point x) { return chi(S.bits, x); });
    }
    static BooleanFunction majority3(int n = 3) {
        return from(n, [](Point x) { return std::popcount(x & 7u) >= 2 ? -1.0 : 1.0; });
    }
    static BooleanFunction random_sign(int n, Rng& rng) {
        return from(n, [&](Point) { return (rng() & 1) ? -1.0 : 1.0; });
    }
    static BooleanFunction random_bounded(int n, Rng& rng) {
        return from(n, [&](Point) { return 2.0 * uniform01(rng) - 1.0; });
    }

    static void check_arity(int n) {
        if (n > kMaxArity) throw CapacityError("arity exceeds 24");
        if (n < 0) throw DomainError("negative arity");
    }

    int arity() const { return n_; }
    std::size_t size() const { return values_.size(); }
    double bound() const { return bound_; }
    bool sign_valued() const { return sign_valued_; }
    const std::vector<double>& values() const { return values_; }
    double operator()(Point x) const { return values_[x]; }

    double mean() const {
        return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
    }
    double mean_square() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return s / static_cast<double>(values_.size());
    }

private:
    int n_ = 0;
    std::vector<double> values_{0.0};
    double bound_ = 0.0;
    bool sign_valued_ = false;
};

struct FourierSpectrum {
    int n = 0;
    std::vector<double> coeffs;

    double operator[](std::uint32_t S) const { return coeffs[S]; }
    double& operator[](std::uint32_t S) { return coeffs[S]; }

    double total_weight() const {
        double s = 0.0;
        for (double c : coeffs) s += c * c;
        return s;
    }
    std::vector<double> level_weights() const {
        std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
        for (std::size_t S = 0; S < coeffs.size(); ++S) w[std::popcount(S)] += coeffs[S] * coeffs[S];
        return w;
    }
};

// Unnormalized in-place Walsh-Hadamard butterfly.
inline void fwht_inplace(std::vector<double>& a) {
    const std::size_t N = a.size();
    for (std::size_t h = 1; h < N; h <<= 1) {
        for (std::size_t i = 0; i < N; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double u = a[j], v = a[j + h];
                a[j] = u + v;
                a[j + h] = u - v;
            }
        }
    }
}

inline FourierSpectrum wht(const BooleanFunction& f) {
    FourierSpectrum s{f.arity(), f.values()};
    fwht_inplace(s.coeffs);
    const double scale = std::ldexp(1.0, -f.arity());
    for (double& c : s.coeffs) c *= scale;
    return s;
}

inline BooleanFunction inverse_wht(const FourierSpectrum& s) {
    std::vector<double> v = s.coeffs;
    fwht_inplace(v);
    return BooleanFunction(s.n, std::move(v));
}

// f_ave^V: average over the coordinates in V, one coordinate at a time.
inline BooleanFunction average_over(const BooleanFunction& f, CoordSet V) {
    std::vector<double> v = f.values();
    for (int i : V.elements()) {
        if (i >= f.arity()) throw DomainError("coordinate outside the domain");
        const Point b = Point{1} << i;
        for (Point x = 0; x < v.size(); ++x) {
            if (x & b) continue;
            const double m = 0.5 * (v[x] + v[x | b]);
            v[x] = m;
            v[x | b] = m;
        }
    }
    return BooleanFunction(f.arity(), std::move(v));
}

// T_rho^V f, applied coordinatewise: multiplies f^(S) by rho^{|S cap V|}.
inline BooleanFunction noise_operator(const BooleanFunction& f, double rho, CoordSet V) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("noise rate outside [0,1]");
    std::vector<double> v = f.values();
    const double a = 0.5 * (1.0 + rho), c = 0.5 * (1.0 - rho);
    for (int i : V.elements()) {
        if (i >= f.arity()) throw DomainError("coordinate outside the domain");
        const Point b = Point{1} << i;
        for (Point x = 0; x < v.size(); ++x) {
            if (x & b) continue;
            const double p = v[x], q = v[x | b];
            v[x] = a * p + c * q;
            v[x | b] = a * q + c * p;
        }
    }
    return BooleanFunction(f.arity(), std::move(v));
}

inline BooleanFunction operator-(const BooleanFunction& f, const BooleanFunction& g) {
    if (f.arity() != g.arity()) throw DomainError("arity mismatch");
    std::vector<double> v(f.size());
    for (std::size_t x = 0; x < v.size(); ++x) v[x] = f(static_cast<Point>(x)) - g(static_cast<Point>(x));
    return BooleanFunction(f.arity(), std::move(v));
}

// Draws S with probability coeffs[S]^2 / sum coeffs^2 by inverse CDF.
class SpectralSampler {
public:
    explicit SpectralSampler(const FourierSpectrum& s) : cdf_(s.coeffs.size()) {
        double acc = 0.0;
        for (std::size_t S = 0; S < s.coeffs.size(); ++S) {
            acc += s.coeffs[S] * s.coeffs[S];
            cdf_[S] = acc;
        }
        if (!(acc > 0.0)) throw EmptyDistributionError("spectrum has zero total weight");
    }

    CoordSet operator()(Rng& rng) const {
        const double u = uniform01(rng) * cdf_.back();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        std::size_t S = static_cast<std::size_t>(it - cdf_.begin());
        return CoordSet(static_cast<std::uint32_t>(S));
    }

private:
    std::vector<double> cdf_;
};

inline CoordSet spectral_sample(const FourierSpectrum& s, Rng& rng) { return SpectralSampler(s)(rng); }

// corr(f, J_T) = E_x |f_ave^{complement T}(x)|; the averaged function only
// depends on x_T, so the expectation runs over the 2^|T| subcube.
inline double junta_corr_exact(const BooleanFunction& f, CoordSet T) {
    const int n = f.arity();
    const CoordSet Tbar = T.complement(n);
    const BooleanFunction a = average_over(f, Tbar);
    double s = 0.0;
    std::size_t count = 0;
    const std::uint32_t t = T.bits;
    for (std::uint32_t x = t;; x = (x - 1) & t) {
        s += std::abs(a(x));
        ++count;
        if (x == 0) break;
    }
    return s / static_cast<double>(count);
}

inline double weight_at_or_above(const FourierSpectrum& s, int L) {
    if (L < 0 || L > s.n) throw DomainError("level outside [0,n]");
    double w = 0.0;
    for (std::size_t S = 0; S < s.coeffs.size(); ++S)
        if (std::popcount(S) >= L) w += s.coeffs[S] * s.coeffs[S];
    return w;
}

struct RestrictedFunction {
    BooleanFunction g;
    std::vector<int> coords;  // coordinate j of g is coordinate coords[j] of f
};

// f_{U -> y}. The i-th entry of y (in {+1,-1}) assigns the i-th smallest
// coordinate of U.
inline RestrictedFunction restrict(const BooleanFunction& f, CoordSet U, const std::vector<int>& y) {
    const int n = f.arity();
    const auto u = U.elements();
    if (y.size() != u.size()) throw DomainError("assignment does not cover U");
    Point fixed = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] >= n) throw DomainError("coordinate outside the domain");
        if (y[i] == -1)
            fixed |= Point{1} << u[i];
        else if (y[i] != 1)
            throw DomainError("assignment values must be +1 or -1");
    }
    RestrictedFunction r;
    r.coords = U.complement(n).elements();
    const int m = static_cast<int>(r.coords.size());
    r.g = BooleanFunction::from(m, [&](Point z) {
        Point x = fixed;
        for (int j = 0; j < m; ++j)
            if ((z >> j) & 1u) x |= Point{1} << r.coords[j];
        return f(x);
    });
    return r;
}

}  // namespace junta
