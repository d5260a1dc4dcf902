#include <catch_amalgamated.hpp>

#include "junta/simplex.hpp"

using namespace junta;
using Catch::Approx;

namespace {

// Brute force for min c.x, A x <= b, x >= 0 (x in R^2 or R^3): enumerate all
// vertices as intersections of n tight constraints.
double brute_min(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                 const std::vector<double>& c, bool& feasible) {
    const std::size_t n = c.size();
    std::vector<std::vector<double>> rows = A;
    std::vector<double> rhs = b;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = -1.0;
        rows.push_back(e);
        rhs.push_back(0.0);
    }
    const std::size_t m = rows.size();
    double best = kInf;
    feasible = false;
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == n) {
            std::vector<std::vector<double>> M(n);
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n; ++i) {
                M[i] = rows[pick[i]];
                r[i] = rhs[pick[i]];
            }
            if (!detail::solve_dense(M, r)) return;
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += rows[i][j] * r[j];
                if (s > rhs[i] + 1e-9) return;
            }
            feasible = true;
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += c[j] * r[j];
            best = std::min(best, v);
            return;
        }
        for (std::size_t i = start; i < m; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_CASE("textbook LP") {
    // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    LinearProgram lp;
    lp.add_variable(-3.0);
    lp.add_variable(-5.0);
    lp.add_constraint({1, 0}, LinearProgram::Sense::le, 4);
    lp.add_constraint({0, 2}, LinearProgram::Sense::le, 12);
    lp.add_constraint({3, 2}, LinearProgram::Sense::le, 18);
    auto r = lp.minimize();
    REQUIRE(r.status == LpResult::Status::optimal);
    CHECK(r.objective == Approx(-36.0));
    CHECK(r.x[0] == Approx(2.0));
    CHECK(r.x[1] == Approx(6.0));
}

TEST_CASE("infeasible and unbounded programs") {
    LinearProgram a;
    a.add_variable(1.0);
    a.add_constraint({1.0}, LinearProgram::Sense::ge, 2.0);
    a.add_constraint({1.0}, LinearProgram::Sense::le, 1.0);
    CHECK(a.minimize().status == LpResult::Status::infeasible);

    LinearProgram b;
    b.add_variable(-1.0);
    b.add_variable(0.0);
    b.add_constraint({1.0, -1.0}, LinearProgram::Sense::le, 1.0);
    CHECK(b.minimize().status == LpResult::Status::unbounded);
}

TEST_CASE("bounded and free variables") {
    // min x - y, -2 <= x <= 3, y free, x + y = 1, y <= 5 -> x=-2, y=3 -> -5
    LinearProgram lp;
    lp.add_variable(1.0, -2.0, 3.0);
    lp.add_variable(-1.0, -kInf, kInf);
    lp.add_constraint({1.0, 1.0}, LinearProgram::Sense::eq, 1.0);
    lp.add_constraint({0.0, 1.0}, LinearProgram::Sense::le, 5.0);
    auto r = lp.minimize();
    REQUIRE(r.status == LpResult::Status::optimal);
    CHECK(r.objective == Approx(-5.0));
    CHECK(r.x[0] == Approx(-2.0));
}

TEST_CASE("random small LPs agree with vertex enumeration") {
    Rng rng(3);
    int compared = 0;
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 2 + t % 2, m = 2 + t % 4;
        std::vector<std::vector<double>> A(m, std::vector<double>(n));
        std::vector<double> b(m), c(n);
        for (auto& row : A)
            for (double& v : row) v = std::round(10.0 * (2.0 * uniform01(rng) - 0.7));
        for (double& v : b) v = std::round(10.0 * uniform01(rng)) - 2.0;
        for (double& v : c) v = std::round(10.0 * (2.0 * uniform01(rng) - 1.0));
        // box keeps the brute force finite
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> e(n, 0.0);
            e[j] = 1.0;
            A.push_back(e);
            b.push_back(20.0);
        }
        bool feasible = false;
        const double want = brute_min(A, b, c, feasible);
        LinearProgram lp;
        for (double cj : c) lp.add_variable(cj);
        for (std::size_t i = 0; i < A.size(); ++i) lp.add_constraint(A[i], LinearProgram::Sense::le, b[i]);
        for (auto rule : {PivotRule::dantzig, PivotRule::bland}) {
            SimplexOptions opt;
            opt.rule = rule;
            auto r = lp.minimize(opt);
            if (!feasible) {
                CHECK(r.status == LpResult::Status::infeasible);
                continue;
            }
            REQUIRE(r.status == LpResult::Status::optimal);
            CHECK(r.objective == Approx(want).margin(1e-7));
            ++compared;
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("equality-form duals satisfy complementary slackness") {
    // min c.x, A x = b, 0 <= x <= u
    std::vector<std::vector<double>> A{{1, 1, 1, 0}, {1, -1, 0, 1}};
    std::vector<double> b{4, 1}, c{-1, -2, 0, 0}, u{3, 3, kInf, kInf};
    auto r = solve_standard_lp(A, b, c, u);
    REQUIRE(r.status == LpResult::Status::optimal);
    CHECK(r.objective == Approx(-7.0));  // x = (1, 3)
    REQUIRE(r.duals.size() == 2);
    // basic columns have zero reduced cost
    for (int j : r.basis) {
        if (j >= 4) continue;
        const double red = c[j] - r.duals[0] * A[0][j] - r.duals[1] * A[1][j];
        CHECK(red == Approx(0.0).margin(1e-9));
    }
}
