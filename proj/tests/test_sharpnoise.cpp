#include <catch_amalgamated.hpp>

#include "junta/sharpnoise.hpp"

using namespace junta;
using Catch::Approx;

namespace {

// (1 - (1 - x)^kappa)^delta by direct evaluation
double profile(int kappa, int delta, double x) { return std::pow(1.0 - std::pow(1.0 - x, kappa), delta); }

SharpNoiseParams raw(int ell, int kappa, int delta, CoordSet V) {
    SharpNoiseParams p;
    p.ell = ell;
    p.kappa = kappa;
    p.delta_exp = delta;
    p.rho = 1.0 - 1.0 / (2.0 * ell);
    p.V = V;
    return p;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SharpNoiseParams::make(1, 4, 1, CoordSet{}), DomainError);
    CHECK_THROWS_AS(SharpNoiseParams::make(0, 5, 1, CoordSet{}), DomainError);
    CHECK(SharpNoiseParams::make(4, 5, 2, CoordSet{}).rho == 0.875);
}

TEST_CASE("lambda values") {
    auto p = SharpNoiseParams::make(1, 5, 3, CoordSet::full(6));
    CHECK(lambda(0, p) == 1.0);
    const double want = std::pow(1.0 - std::pow(31.0 / 32.0, 5), 3);
    CHECK(lambda(5, p) == Approx(want).epsilon(1e-12));
    CHECK(lambda(5, p) == Approx(3.15e-3).epsilon(0.01));
    CHECK(lambda(5, p) <= std::pow(2.0, -3));
}

TEST_CASE("three-branch contract on 200 parameter sets") {
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        const int ell = uniform_int(1, 6, rng), kappa = uniform_int(5, 12, rng), delta = uniform_int(1, 8, rng);
        auto p = SharpNoiseParams::make(ell, kappa, delta, CoordSet::full(24));
        double prev = 1.0;
        for (int c = 0; c <= kappa * ell + 6; ++c) {
            const double l = lambda(c, p);
            CHECK(l >= 0.0);
            CHECK(l <= 1.0);
            CHECK(l <= prev + 1e-15);
            prev = l;
            if (c <= ell) CHECK(l >= 1.0 - delta * std::pow(2.0, -kappa));
            if (c >= kappa * ell) CHECK(l <= std::pow(2.0, -delta));
        }
    }
}

TEST_CASE("apply_exact") {
    Rng rng(2);
    auto f = BooleanFunction::random_bounded(6, rng);
    auto s = wht(f);
    auto same = apply_exact(s, SharpNoiseParams::make(2, 5, 2, CoordSet{}));
    CHECK(same.coeffs == s.coeffs);

    auto p = SharpNoiseParams::make(1, 5, 2, CoordSet::full(6));
    FourierSpectrum point{6, std::vector<double>(64, 0.0)};
    point[0b111111] = 1.0;
    CHECK(apply_exact(point, p).total_weight() <= std::pow(2.0, -2 * p.delta_exp));

    auto out = apply_exact(s, SharpNoiseParams::make(2, 6, 3, CoordSet::of({0, 2, 4})));
    CHECK(out.total_weight() - out[0] * out[0] <= s.total_weight() - s[0] * s[0] + 1e-15);
}

TEST_CASE("mixture coefficients") {
    CHECK(mixture_polynomial(1, 1) == std::vector<double>{0.0, 1.0});
    CHECK(mixture_polynomial(2, 1) == std::vector<double>{0.0, 2.0, -1.0});
    CHECK(mixture_polynomial(5, 1) == std::vector<double>{0, 5, -10, 10, -5, 1});

    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const int kappa = uniform_int(1, 6, rng), delta = uniform_int(1, 4, rng);
        auto a = mixture_polynomial(kappa, delta);
        REQUIRE(a.size() == static_cast<std::size_t>(kappa * delta + 1));
        double abs_sum = 0.0;
        for (double v : a) abs_sum += std::abs(v);
        CHECK(abs_sum <= std::pow(2.0, 2 * kappa * delta));
        for (int i = 1; i <= 9; ++i) {
            const double x = i / 10.0;
            double v = 0.0;
            for (int j = static_cast<int>(a.size()) - 1; j >= 0; --j) v = v * x + a[j];
            CHECK(v == Approx(profile(kappa, delta, x)).margin(1e-9));
        }
    }
}

TEST_CASE("fixed and big integer paths agree") {
    for (int kappa = 5; kappa <= 8; ++kappa)
        for (int delta = 1; delta <= 8; ++delta)
            CHECK(mixture_polynomial(kappa, delta, IntegerMode::big) == mixture_polynomial(kappa, delta, IntegerMode::fixed64));
    CHECK_THROWS_AS(mixture_polynomial(10, 7, IntegerMode::fixed64), CapacityError);
    auto big = mixture_polynomial(10, 7, IntegerMode::big);
    CHECK(big.size() == 71);
    CHECK(big.back() == Approx(-1.0));  // (-(-x)^10)^7 -> leading coefficient (-1)^7
}

TEST_CASE("mixture matches the Fourier profile for kappa*Delta <= 40") {
    for (int kappa = 5; kappa <= 10; ++kappa)
        for (int delta = 1; kappa * delta <= 40; ++delta)
            for (int ell = 1; ell <= 4; ++ell) {
                auto p = SharpNoiseParams::make(ell, kappa, delta, CoordSet::full(12));
                auto mix = mixture_coeffs(p);
                for (int c = 0; c <= 12; ++c) CHECK(std::abs(mix.attenuation(c) - lambda(c, p)) <= 1e-9);
            }
}

TEST_CASE("mixture oracle") {
    Rng rng(4);
    auto f = BooleanFunction::random_bounded(4, rng);
    auto base = exact_oracle(f);
    auto p = raw(1, 2, 1, CoordSet{});
    auto o = sharpnoise_oracle(base, p);
    for (Point x = 0; x < 16; ++x) CHECK(o->query(x, rng) == Approx(f(x)));

    // kappa = 2, Delta = 1 keeps the variance manageable.
    const CoordSet S = CoordSet::of({0, 1});
    auto chiS = exact_oracle(BooleanFunction::character(4, S));
    auto q = raw(2, 2, 1, CoordSet::of({0, 1, 2}));
    auto so = sharpnoise_oracle(chiS, q);
    CHECK(so->bound() == 16.0);
    const int draws = 100000;
    const Point x = 0b0001;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double v = so->query(x, rng);
        REQUIRE(std::abs(v) <= so->bound());
        sum += v;
        sq += v * v;
    }
    const double mean = sum / draws, sd = std::sqrt(sq / draws - mean * mean);
    const double want = lambda(2, q) * chi(S.bits, x);
    CHECK(std::abs(mean - want) <= 3.0 * sd / std::sqrt(draws));
    CHECK(std::abs(so->represented()(x) - want) <= 1e-12);

    const auto before = chiS->base_queries();
    so->query(x, rng);
    CHECK(chiS->base_queries() - before == static_cast<std::uint64_t>(q.degree() + 1));
}

TEST_CASE("residual oracle h = g - SharpNoise g") {
    Rng rng(5);
    auto f = BooleanFunction::random_bounded(4, rng);
    auto base = exact_oracle(f);
    auto h0 = h_oracle(base, raw(1, 2, 1, CoordSet{}));
    for (Point x = 0; x < 16; ++x) CHECK(h0->query(x, rng) == Approx(0.0).margin(1e-12));

    const CoordSet S = CoordSet::of({0, 1, 2});
    auto chiS = exact_oracle(BooleanFunction::character(4, S));
    auto p = raw(1, 2, 1, CoordSet::of({0, 1, 2}));
    auto h = h_oracle(chiS, p);
    CHECK(h->bound() == 17.0);
    const Point x = 0b0101;
    const int draws = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double v = h->query(x, rng);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / draws, sd = std::sqrt(sq / draws - mean * mean);
    const double want = (1.0 - lambda(3, p)) * chi(S.bits, x);
    CHECK(std::abs(mean - want) <= 3.0 * sd / std::sqrt(draws));

    // E[h^2] through estimate_l2 against the Fourier formula sum (1 - lambda)^2 f^2
    auto g = BooleanFunction::random_bounded(3, rng);
    auto gp = raw(1, 1, 1, CoordSet::of({0, 1}));
    auto hg = h_oracle(exact_oracle(g), gp);
    auto gs = wht(g);
    double exact = 0.0;
    for (Point T = 0; T < 8; ++T) exact += std::pow(1.0 - lambda(std::popcount(T & 3u), gp), 2) * gs[T] * gs[T];
    CHECK(hg->represented().mean_square() == Approx(exact).margin(1e-12));
    // M = 5; a direct Z/D plan at eps = 0.05
    L2Plan plan{20000, 400};
    const double est = estimate_l2(*hg, plan, rng);
    CHECK(std::abs(est - exact) <= 0.05);
}
