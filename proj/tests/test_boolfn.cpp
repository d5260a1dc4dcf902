#include <catch_amalgamated.hpp>

#include "junta/boolfn.hpp"

using namespace junta;
using Catch::Approx;

namespace {

// Naive 2^-n sum_x f(x) chi_S(x).
double naive_coeff(const BooleanFunction& f, Point S) {
    double s = 0.0;
    for (Point x = 0; x < f.size(); ++x) s += f(x) * chi(S, x);
    return s / static_cast<double>(f.size());
}

// max over all 2^(2^|T|) sign functions g of x_T of E[f g]
double brute_junta_corr(const BooleanFunction& f, CoordSet T) {
    const auto t = T.elements();
    const std::size_t cells = std::size_t{1} << t.size();
    double best = -1.0;
    for (std::uint64_t g = 0; g < (std::uint64_t{1} << cells); ++g) {
        double s = 0.0;
        for (Point x = 0; x < f.size(); ++x) {
            std::size_t cell = 0;
            for (std::size_t j = 0; j < t.size(); ++j)
                if ((x >> t[j]) & 1u) cell |= std::size_t{1} << j;
            s += f(x) * (((g >> cell) & 1u) ? -1.0 : 1.0);
        }
        best = std::max(best, s / static_cast<double>(f.size()));
    }
    return best;
}

}  // namespace

TEST_CASE("wht of constants and characters") {
    auto s = wht(BooleanFunction::constant(2, 1.0));
    CHECK(s[0] == 1.0);
    for (Point S = 1; S < 4; ++S) CHECK(s[S] == 0.0);

    auto c = wht(BooleanFunction::character(2, CoordSet::of({0, 1})));
    CHECK(c[3] == Approx(1.0));
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
    CHECK(c[2] == 0.0);
}

TEST_CASE("wht matches naive inner products") {
    Rng rng(11);
    auto f = BooleanFunction::random_bounded(3, rng);
    auto s = wht(f);
    for (Point S = 0; S < 8; ++S) CHECK(std::abs(s[S] - naive_coeff(f, S)) <= 1e-12);
}

TEST_CASE("Parseval and round trip on many random functions") {
    Rng rng(12);
    for (int t = 0; t < 500; ++t) {
        const int n = 1 + t % 12;
        auto f = (t & 1) ? BooleanFunction::random_sign(n, rng) : BooleanFunction::random_bounded(n, rng);
        auto s = wht(f);
        REQUIRE(std::abs(s.total_weight() - f.mean_square()) <= 1e-9 * std::max(1.0, f.mean_square()));
        auto g = inverse_wht(s);
        for (Point x = 0; x < f.size(); ++x) REQUIRE(std::abs(g(x) - f(x)) <= 1e-9);
    }
}

TEST_CASE("arity above 24 is rejected") {
    CHECK_THROWS_AS(BooleanFunction::check_arity(25), CapacityError);
}

TEST_CASE("average_over kills coefficients touching V") {
    CHECK(average_over(BooleanFunction::character(2, CoordSet::of({0})), CoordSet::of({0})).mean_square() == 0.0);
    Rng rng(3);
    auto f = BooleanFunction::random_bounded(4, rng);
    auto same = average_over(f, CoordSet{});
    CHECK(same.values() == f.values());

    const CoordSet V = CoordSet::of({1, 3});
    auto in = wht(f), out = wht(average_over(f, V));
    for (Point S = 0; S < 16; ++S) {
        const double want = (S & V.bits) ? 0.0 : in[S];
        CHECK(std::abs(out[S] - want) <= 1e-12);
    }
}

TEST_CASE("noise operator acts diagonally in the Fourier basis") {
    Rng rng(4);
    auto f = BooleanFunction::random_bounded(4, rng);
    auto id = noise_operator(f, 1.0, CoordSet::full(4));
    for (Point x = 0; x < 16; ++x) CHECK(id(x) == Approx(f(x)).margin(1e-15));
    auto flat = noise_operator(f, 0.0, CoordSet::full(4));
    for (Point x = 0; x < 16; ++x) CHECK(flat(x) == Approx(f.mean()).margin(1e-12));

    const CoordSet V = CoordSet::of({0, 2, 3});
    auto in = wht(f), out = wht(noise_operator(f, 0.5, V));
    for (Point S = 0; S < 16; ++S)
        CHECK(std::abs(out[S] - std::pow(0.5, std::popcount(S & V.bits)) * in[S]) <= 1e-12);
    CHECK_THROWS_AS(noise_operator(f, 1.5, V), DomainError);
    CHECK_THROWS_AS(noise_operator(f, -0.1, V), DomainError);
}

TEST_CASE("noise point sampling") {
    Rng rng(5);
    const Point x = 0b1011;
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_noise_point(x, 1.0, CoordSet::full(4), rng) == x);
        CHECK(sample_noise_point(x, 0.3, CoordSet{}, rng) == x);
    }
    // rho = 0: every coordinate is a fair coin; 3 sigma binomial band.
    const int draws = 100000;
    std::array<int, 4> ones{};
    for (int i = 0; i < draws; ++i) {
        Point y = sample_noise_point(x, 0.0, CoordSet::full(4), rng);
        for (int j = 0; j < 4; ++j) ones[j] += (y >> j) & 1u;
    }
    const double sigma = std::sqrt(draws * 0.25);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(ones[j] - draws / 2.0) <= 3.0 * sigma);
    // rho = 0.6 on coordinate 0 of x = +1: P(flip) = 0.2
    int flips = 0;
    for (int i = 0; i < draws; ++i) flips += sample_noise_point(0, 0.6, CoordSet::of({0}), rng) & 1u;
    CHECK(std::abs(flips - 0.2 * draws) <= 3.0 * std::sqrt(draws * 0.16));
}

TEST_CASE("spectral sampling") {
    Rng rng(6);
    auto chi1 = wht(BooleanFunction::character(3, CoordSet::of({0})));
    for (int i = 0; i < 100; ++i) CHECK(spectral_sample(chi1, rng) == CoordSet::of({0}));
    auto cst = wht(BooleanFunction::constant(3, -1.0));
    for (int i = 0; i < 100; ++i) CHECK(spectral_sample(cst, rng).empty());
    CHECK_THROWS_AS(spectral_sample(wht(BooleanFunction::constant(2, 0.0)), rng), EmptyDistributionError);

    auto maj = BooleanFunction::majority3();
    SpectralSampler sampler(wht(maj));
    std::array<double, 8> p{};
    for (Point S = 0; S < 8; ++S) p[S] = naive_coeff(maj, S) * naive_coeff(maj, S);
    const int draws = 100000;
    std::array<int, 8> hits{};
    for (int i = 0; i < draws; ++i) ++hits[sampler(rng).bits];
    for (Point S = 0; S < 8; ++S) {
        const double sigma = std::sqrt(draws * p[S] * (1 - p[S]));
        CHECK(std::abs(hits[S] - draws * p[S]) <= 3.0 * sigma + 1e-9);
    }
}

TEST_CASE("junta correlation") {
    auto c12 = BooleanFunction::character(2, CoordSet::of({0, 1}));
    CHECK(junta_corr_exact(c12, CoordSet::of({0, 1})) == Approx(1.0));
    CHECK(junta_corr_exact(c12, CoordSet::of({0})) == Approx(0.0).margin(1e-15));

    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        const int n = 1 + t % 4;
        auto f = BooleanFunction::random_sign(n, rng);
        for (Point T = 0; T < (Point{1} << n); ++T) {
            if (std::popcount(T) > 3) continue;
            CHECK(std::abs(junta_corr_exact(f, CoordSet(T)) - brute_junta_corr(f, CoordSet(T))) <= 1e-12);
        }
    }
}

TEST_CASE("junta correlation is monotone and 1-Lipschitz in L2") {
    Rng rng(8);
    for (int t = 0; t < 30; ++t) {
        auto f = BooleanFunction::random_sign(5, rng);
        for (Point T = 0; T < 32; ++T)
            for (int i = 0; i < 5; ++i)
                CHECK(junta_corr_exact(f, CoordSet(T | (1u << i))) >= junta_corr_exact(f, CoordSet(T)) - 1e-12);
        std::vector<double> hv(f.values());
        for (double& v : hv) v += 0.2 * (2.0 * uniform01(rng) - 1.0);
        BooleanFunction h(5, hv);
        const double dist = std::sqrt((f - h).mean_square());
        for (Point T = 0; T < 32; ++T)
            CHECK(std::abs(junta_corr_exact(f, CoordSet(T)) - junta_corr_exact(h, CoordSet(T))) <= dist + 1e-12);
    }
}

TEST_CASE("weight at or above a level") {
    auto c12 = wht(BooleanFunction::character(3, CoordSet::of({0, 1})));
    CHECK(weight_at_or_above(c12, 3) == 0.0);
    Rng rng(9);
    auto s = wht(BooleanFunction::random_bounded(5, rng));
    CHECK(weight_at_or_above(s, 0) == Approx(s.total_weight()));
    CHECK(weight_at_or_above(s, 0) - weight_at_or_above(s, 1) == Approx(s[0] * s[0]).margin(1e-12));
    CHECK_THROWS_AS(weight_at_or_above(s, 6), DomainError);
}

TEST_CASE("restriction") {
    Rng rng(10);
    auto f = BooleanFunction::random_bounded(5, rng);
    auto same = restrict(f, CoordSet{}, {});
    CHECK(same.g.values() == f.values());

    auto r = restrict(BooleanFunction::character(2, CoordSet::of({0, 1})), CoordSet::of({0}), {1});
    CHECK(r.g.values() == BooleanFunction::character(1, CoordSet::of({0})).values());
    CHECK(r.coords == std::vector<int>{1});

    // f_{U->y}^(S) = sum_{A subset U} f^(S u A) chi_A(y)
    const CoordSet U = CoordSet::of({1, 3});
    const std::vector<int> y{-1, 1};
    const Point yb = 1u << 1;
    auto rf = restrict(f, U, y);
    auto fs = wht(f), gs = wht(rf.g);
    for (Point S = 0; S < gs.coeffs.size(); ++S) {
        Point Sf = 0;
        for (int j = 0; j < rf.g.arity(); ++j)
            if ((S >> j) & 1u) Sf |= 1u << rf.coords[j];
        double want = 0.0;
        for (Point A = U.bits;; A = (A - 1) & U.bits) {
            want += fs[Sf | A] * chi(A, yb);
            if (A == 0) break;
        }
        CHECK(std::abs(gs[S] - want) <= 1e-12);
    }
    CHECK_THROWS_AS(restrict(f, U, {1}), DomainError);
    CHECK_THROWS_AS(restrict(f, U, {1, 0}), DomainError);
}
