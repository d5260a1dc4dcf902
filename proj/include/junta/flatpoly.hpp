#pragma once

#include <cmath>
#include <vector>

#include "junta/core.hpp"
#include "junta/simplex.hpp"

namespace junta {

// T_k(x) by the three-term recurrence.
inline double chebyshev_eval(int k, double x) {
    if (k < 0) throw DomainError("Chebyshev degree must be nonnegative");
    if (k == 0) return 1.0;
    double a = 1.0, b = x;
    for (int i = 1; i < k; ++i) {
        const double c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    return b;
}

// Horner with error-free transformations; a[i] multiplies x^i.
inline double compensated_horner(const std::vector<double>& a, double x) {
    if (a.empty()) return 0.0;
    double s = a.back(), c = 0.0;
    for (std::size_t k = a.size() - 1; k-- > 0;) {
        const double p = s * x;
        const double pe = std::fma(s, x, -p);
        const double t = p + a[k];
        const double z = t - p;
        const double se = (p - (t - z)) + (a[k] - z);
        s = t;
        c = c * x + (pe + se);
    }
    return s + c;
}

// sum_{i>=1} alpha[i-1] * C(x, i)
inline double eval_binomial_basis(const std::vector<double>& alpha, double x) {
    double term = 1.0, s = 0.0;
    for (std::size_t i = 1; i <= alpha.size(); ++i) {
        term *= (x - static_cast<double>(i - 1)) / static_cast<double>(i);
        s += alpha[i - 1] * term;
    }
    return s;
}

// alpha_i = (forward difference)^i p (0) for i = 1..deg, so that
// p(x) = sum_i alpha_i C(x, i) when p(0) = 0.
inline std::vector<double> binomial_basis(const std::vector<double>& power_coeffs) {
    const int r = static_cast<int>(power_coeffs.size()) - 1;
    std::vector<long double> v(static_cast<std::size_t>(std::max(r, 0)) + 1);
    for (int j = 0; j <= r; ++j) v[j] = compensated_horner(power_coeffs, static_cast<double>(j));
    std::vector<double> alpha;
    for (int i = 1; i <= r; ++i) {
        long double s = 0.0L;
        for (int j = 0; j <= i; ++j) s += (((i - j) & 1) ? -1.0L : 1.0L) * binomial(i, j) * v[j];
        alpha.push_back(static_cast<double>(s));
    }
    return alpha;
}

// Power-basis coefficients of sum_i alpha_i C(x, i) via Stirling numbers of
// the first kind.
inline std::vector<double> power_from_binomial(const std::vector<double>& alpha) {
    const int r = static_cast<int>(alpha.size());
    std::vector<std::vector<long double>> s(r + 1, std::vector<long double>(r + 1, 0.0L));
    s[0][0] = 1.0L;
    for (int i = 1; i <= r; ++i)
        for (int k = 1; k <= i; ++k) s[i][k] = s[i - 1][k - 1] - static_cast<long double>(i - 1) * s[i - 1][k];
    std::vector<double> p(r + 1, 0.0);
    long double fact = 1.0L;
    std::vector<long double> acc(r + 1, 0.0L);
    for (int i = 1; i <= r; ++i) {
        fact *= i;
        for (int k = 1; k <= i; ++k) acc[k] += alpha[i - 1] * s[i][k] / fact;
    }
    for (int k = 1; k <= r; ++k) p[k] = static_cast<double>(acc[k]);
    return p;
}

struct FlatPolynomial {
    int r = 0;
    int N = 0;
    std::vector<double> power_coeffs;  // r+1 entries, power_coeffs[0] == 0
    std::vector<double> binom_coeffs;  // alpha_1..alpha_r
    double achieved_error = 0.0;

    double operator()(double x) const { return compensated_horner(power_coeffs, x); }
    double at_integer(int x) const { return eval_binomial_basis(binom_coeffs, static_cast<double>(x)); }
};

inline FlatPolynomial flat_from_binomial(int r, int N, std::vector<double> alpha) {
    FlatPolynomial p;
    p.r = r;
    p.N = N;
    p.binom_coeffs = std::move(alpha);
    p.power_coeffs = power_from_binomial(p.binom_coeffs);
    p.achieved_error = 0.0;
    for (int i = 1; i <= N; ++i) p.achieved_error = std::max(p.achieved_error, std::abs(p.at_integer(i) - 1.0));
    return p;
}

// Degree <= r, p(0) = 0, minimizing max_{i in [N]} |p(i) - 1|. Solved as a
// linear program in a column-scaled binomial basis; r = N is plain
// interpolation.
inline FlatPolynomial build_flat_poly(int r, int N) {
    if (r < 1 || r > N) throw DomainError("flat polynomial needs 1 <= r <= N");
    if (N > 400 || r > 40) throw CapacityError("flat polynomial size beyond the dense LP range");
    if (r == N) {
        std::vector<double> alpha(r);
        for (int i = 1; i <= r; ++i) alpha[i - 1] = (i & 1) ? 1.0 : -1.0;
        return flat_from_binomial(r, N, std::move(alpha));
    }
    LinearProgram lp;
    for (int j = 1; j <= r; ++j) lp.add_variable(0.0, -kInf, kInf);
    const int t = lp.add_variable(1.0, 0.0, kInf);
    for (int i = 1; i <= N; ++i) {
        std::vector<double> row(r + 1, 0.0);
        for (int j = 1; j <= r; ++j) row[j - 1] = binomial(i, j) / binomial(N, j);
        row[t] = -1.0;
        lp.add_constraint(row, LinearProgram::Sense::le, 1.0);
        for (int j = 0; j < r; ++j) row[j] = -row[j];
        lp.add_constraint(row, LinearProgram::Sense::le, -1.0);
    }
    SimplexOptions opt;
    opt.tol = 1e-12;
    const LpResult res = lp.minimize(opt);
    if (res.status != LpResult::Status::optimal) throw CapacityError("flat polynomial LP did not converge");
    std::vector<double> alpha(r);
    for (int j = 1; j <= r; ++j) alpha[j - 1] = res.x[j - 1] / binomial(N, j);
    return flat_from_binomial(r, N, std::move(alpha));
}

}  // namespace junta
