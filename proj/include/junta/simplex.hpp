#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "junta/core.hpp"

namespace junta {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class PivotRule { dantzig, bland };

struct SimplexOptions {
    PivotRule rule = PivotRule::dantzig;
    double tol = 1e-10;
    std::size_t max_iterations = 0;  // 0: 50*(rows+cols)
    // Consecutive degenerate pivots after which Bland's rule takes over.
    std::size_t degenerate_switch = 40;
};

struct LpResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::vector<double> duals;  // multipliers of the equality rows
    std::vector<int> basis;     // basic column per row (>= cols means artificial)
    std::size_t iterations = 0;
};

namespace detail {

inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (std::abs(a[p][c]) < 1e-300) return false;
        std::swap(a[p], a[c]);
        std::swap(rhs[p], rhs[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    for (std::size_t c = 0; c < n; ++c) rhs[c] /= a[c][c];
    return true;
}

}  // namespace detail

// Dense bounded-variable tableau simplex for
//     minimize c.x  subject to  A x = b,  0 <= x <= upper.
// Phase one drives artificial columns out; Dantzig pricing falls back to
// Bland's rule on stalling.
inline LpResult solve_standard_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                                  const std::vector<double>& c, const std::vector<double>& upper,
                                  SimplexOptions opt = {}) {
    const std::size_t m = b.size();
    const std::size_t n = c.size();
    const std::size_t N = n + m;
    const double tol = opt.tol;
    const std::size_t max_iter = opt.max_iterations ? opt.max_iterations : 50 * (m + N) + 1000;

    std::vector<double> sign(m, 1.0);
    std::vector<std::vector<double>> T(m, std::vector<double>(N, 0.0));
    std::vector<double> xB(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (A[i].size() != n) throw DomainError("constraint row has wrong width");
        sign[i] = b[i] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) T[i][j] = sign[i] * A[i][j];
        T[i][n + i] = 1.0;
        xB[i] = sign[i] * b[i];
    }
    std::vector<double> ub(N, kInf);
    for (std::size_t j = 0; j < n; ++j) ub[j] = upper.empty() ? kInf : upper[j];
    std::vector<int> basis(m);
    std::vector<char> is_basic(N, 0), at_upper(N, 0);
    for (std::size_t i = 0; i < m; ++i) {
        basis[i] = static_cast<int>(n + i);
        is_basic[n + i] = 1;
    }

    LpResult res;
    std::vector<double> cost(N, 0.0), d(N);
    PivotRule rule = opt.rule;
    std::size_t degenerate_run = 0;

    auto run_phase = [&]() -> LpResult::Status {
        while (true) {
            if (res.iterations++ >= max_iter) return LpResult::Status::iteration_limit;
            for (std::size_t j = 0; j < N; ++j) {
                if (is_basic[j]) {
                    d[j] = 0.0;
                    continue;
                }
                double s = cost[j];
                for (std::size_t i = 0; i < m; ++i) s -= cost[basis[i]] * T[i][j];
                d[j] = s;
            }
            std::size_t enter = N;
            double best = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                if (is_basic[j] || ub[j] == 0.0) continue;
                const bool improving = at_upper[j] ? d[j] > tol : d[j] < -tol;
                if (!improving) continue;
                if (rule == PivotRule::bland) {
                    enter = j;
                    break;
                }
                if (std::abs(d[j]) > best) {
                    best = std::abs(d[j]);
                    enter = j;
                }
            }
            if (enter == N) return LpResult::Status::optimal;

            const double s = at_upper[enter] ? -1.0 : 1.0;
            double theta = ub[enter];
            std::size_t leave = m;
            bool leave_to_upper = false;
            double leave_coef = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double coef = s * T[i][enter];
                double lim;
                bool to_upper;
                if (coef > tol) {
                    lim = std::max(xB[i], 0.0) / coef;
                    to_upper = false;
                } else if (coef < -tol && ub[basis[i]] < kInf) {
                    lim = std::max(ub[basis[i]] - xB[i], 0.0) / (-coef);
                    to_upper = true;
                } else {
                    continue;
                }
                bool take = lim < theta - 1e-14;
                if (!take && lim <= theta + 1e-14 && leave < m) {
                    take = rule == PivotRule::bland ? basis[i] < basis[leave]
                                                    : std::abs(coef) > std::abs(leave_coef);
                }
                if (take) {
                    theta = lim;
                    leave = i;
                    leave_to_upper = to_upper;
                    leave_coef = coef;
                }
            }
            if (theta == kInf) return LpResult::Status::unbounded;

            degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
            if (degenerate_run > opt.degenerate_switch) rule = PivotRule::bland;

            for (std::size_t i = 0; i < m; ++i) xB[i] -= s * theta * T[i][enter];
            if (leave == m) {
                at_upper[enter] = !at_upper[enter];
                continue;
            }
            const double entering_value = at_upper[enter] ? ub[enter] - theta : theta;
            const int out = basis[leave];
            is_basic[out] = 0;
            at_upper[out] = leave_to_upper ? 1 : 0;
            is_basic[enter] = 1;
            at_upper[enter] = 0;
            basis[leave] = static_cast<int>(enter);
            xB[leave] = entering_value;

            const double piv = T[leave][enter];
            auto& prow = T[leave];
            for (double& v : prow) v /= piv;
            for (std::size_t i = 0; i < m; ++i) {
                if (i == leave) continue;
                const double f = T[i][enter];
                if (f == 0.0) continue;
                auto& row = T[i];
                for (std::size_t j = 0; j < N; ++j) row[j] -= f * prow[j];
                row[enter] = 0.0;
            }
        }
    };

    for (std::size_t j = n; j < N; ++j) cost[j] = 1.0;
    auto st = run_phase();
    if (st != LpResult::Status::optimal) {
        res.status = st == LpResult::Status::unbounded ? LpResult::Status::infeasible : st;
        return res;
    }
    double infeas = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (static_cast<std::size_t>(basis[i]) >= n) infeas += xB[i];
        scale = std::max(scale, std::abs(b[i]));
    }
    if (infeas > 1e-8 * scale) {
        res.status = LpResult::Status::infeasible;
        return res;
    }

    for (std::size_t j = 0; j < N; ++j) cost[j] = j < n ? c[j] : 0.0;
    for (std::size_t j = n; j < N; ++j) {
        ub[j] = 0.0;
        at_upper[j] = 0;
    }
    degenerate_run = 0;
    st = run_phase();
    res.status = st;
    if (st != LpResult::Status::optimal) return res;

    res.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        if (!is_basic[j] && at_upper[j]) res.x[j] = ub[j];
    for (std::size_t i = 0; i < m; ++i)
        if (static_cast<std::size_t>(basis[i]) < n) res.x[basis[i]] = xB[i];
    res.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
    res.basis = basis;

    // Multipliers: B^T pi = c_B over the original (sign-normalized) columns.
    std::vector<std::vector<double>> Bt(m, std::vector<double>(m, 0.0));
    std::vector<double> cb(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = static_cast<std::size_t>(basis[i]);
        for (std::size_t r = 0; r < m; ++r) Bt[i][r] = j < n ? sign[r] * A[r][j] : (r == j - n ? 1.0 : 0.0);
        cb[i] = j < n ? c[j] : 0.0;
    }
    if (detail::solve_dense(Bt, cb)) {
        res.duals.resize(m);
        for (std::size_t r = 0; r < m; ++r) res.duals[r] = sign[r] * cb[r];
    }
    return res;
}

// General form: bounds lo <= x <= hi (lo may be -inf) and rows of kind
// <=, >=, = ; converted to the standard form above.
class LinearProgram {
public:
    enum class Sense { le, ge, eq };

    int add_variable(double cost, double lo = 0.0, double hi = kInf) {
        cost_.push_back(cost);
        lo_.push_back(lo);
        hi_.push_back(hi);
        for (auto& r : rows_) r.push_back(0.0);
        return static_cast<int>(cost_.size()) - 1;
    }

    void add_constraint(const std::vector<double>& coeffs, Sense sense, double rhs) {
        if (coeffs.size() != cost_.size()) throw DomainError("constraint width mismatch");
        rows_.push_back(coeffs);
        sense_.push_back(sense);
        rhs_.push_back(rhs);
    }

    std::size_t variables() const { return cost_.size(); }

    LpResult minimize(SimplexOptions opt = {}) const {
        const std::size_t nv = cost_.size();
        // column map: each variable -> (positive column, negative column or -1), shift
        std::vector<int> pos(nv), neg(nv, -1);
        std::vector<double> shift(nv, 0.0);
        std::vector<double> c, ub;
        for (std::size_t v = 0; v < nv; ++v) {
            if (std::isfinite(lo_[v])) {
                shift[v] = lo_[v];
                pos[v] = static_cast<int>(c.size());
                c.push_back(cost_[v]);
                ub.push_back(hi_[v] - lo_[v]);
            } else {
                pos[v] = static_cast<int>(c.size());
                c.push_back(cost_[v]);
                ub.push_back(kInf);
                neg[v] = static_cast<int>(c.size());
                c.push_back(-cost_[v]);
                ub.push_back(kInf);
                if (std::isfinite(hi_[v])) throw DomainError("free variables with a finite upper bound unsupported");
            }
        }
        const std::size_t structural = c.size();
        std::size_t slacks = 0;
        for (auto s : sense_)
            if (s != Sense::eq) ++slacks;
        const std::size_t ncols = structural + slacks;
        c.resize(ncols, 0.0);
        ub.resize(ncols, kInf);
        std::vector<std::vector<double>> A(rows_.size(), std::vector<double>(ncols, 0.0));
        std::vector<double> b(rows_.size());
        std::size_t slack = structural;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            double rhs = rhs_[r];
            for (std::size_t v = 0; v < nv; ++v) {
                const double a = rows_[r][v];
                if (a == 0.0) continue;
                A[r][pos[v]] = a;
                if (neg[v] >= 0) A[r][neg[v]] = -a;
                rhs -= a * shift[v];
            }
            if (sense_[r] == Sense::le) A[r][slack++] = 1.0;
            if (sense_[r] == Sense::ge) A[r][slack++] = -1.0;
            b[r] = rhs;
        }
        LpResult std_res = solve_standard_lp(A, b, c, ub, opt);
        LpResult out = std_res;
        if (std_res.status != LpResult::Status::optimal) return out;
        out.x.assign(nv, 0.0);
        out.objective = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
            double val = std_res.x[pos[v]] + shift[v];
            if (neg[v] >= 0) val -= std_res.x[neg[v]];
            out.x[v] = val;
            out.objective += cost_[v] * val;
        }
        return out;
    }

private:
    std::vector<double> cost_, lo_, hi_;
    std::vector<std::vector<double>> rows_;
    std::vector<Sense> sense_;
    std::vector<double> rhs_;
};

}  // namespace junta
