#include <catch_amalgamated.hpp>

#include "junta/localest.hpp"

using namespace junta;
using Catch::Approx;

namespace {

struct Moments {
    double mean = 0.0, var = 0.0;
};

Moments local_g_moments(const BooleanFunction& f, const LocalEstParams& p) {
    std::vector<double> g(f.size());
    const CoordSet all = CoordSet::full(f.arity());
    for (Point x = 0; x < f.size(); ++x) g[x] = local_g(ball_values(f, x, p.r, all), p);
    Moments m;
    for (double v : g) m.mean += v;
    m.mean /= static_cast<double>(g.size());
    for (double v : g) m.var += (v - m.mean) * (v - m.mean);
    m.var /= static_cast<double>(g.size());
    return m;
}

// random f of Fourier degree <= d
BooleanFunction low_degree(int n, int d, Rng& rng) {
    FourierSpectrum s{n, std::vector<double>(std::size_t{1} << n, 0.0)};
    for (Point S = 0; S < s.coeffs.size(); ++S)
        if (std::popcount(S) <= d) s[S] = 2.0 * uniform01(rng) - 1.0;
    return inverse_wht(s);
}

}  // namespace

TEST_CASE("parameter construction") {
    auto p = LocalEstParams::make(5, 0.02);
    CHECK(p.r == 5);
    CHECK(p.flat.achieved_error <= p.tau);
    CHECK_THROWS_AS(LocalEstParams::with_radius(16, 2, 0.01), DomainError);
    auto q = LocalEstParams::with_radius(8, 4, 0.2);
    CHECK(q.flat.achieved_error <= 0.2);
}

TEST_CASE("ball enumeration order") {
    auto off = ball_offsets(CoordSet::full(3), 2);
    CHECK(off == std::vector<Point>{0, 1, 2, 4, 3, 5, 6});
    CHECK(ball_size(10, 3) == 1 + 10 + 45 + 120);
    CHECK(ball_offsets(CoordSet::of({1, 3}), 5).size() == 4);
}

TEST_CASE("local_g on simple functions") {
    auto p = LocalEstParams::with_radius(4, 2, 0.6);
    auto c = BooleanFunction::constant(4, 0.37);
    for (Point x = 0; x < 16; ++x) CHECK(local_g(ball_values(c, x, 2, CoordSet::full(4)), p) == Approx(0.37));
    CHECK(local_estimate(ball_values(BooleanFunction::constant(4, -0.7), 3, 2, CoordSet::full(4)), p) == Approx(0.7));
    auto wrong = ball_values(c, 0, 1, CoordSet::full(4));
    CHECK_THROWS_AS(local_g(wrong, p), DomainError);

    // r = L = n interpolates: every function has degree <= L, so local_g = E[f].
    Rng rng(1);
    for (int n = 1; n <= 6; ++n) {
        auto exact = LocalEstParams::with_radius(n, n, 1e-9);
        auto f = BooleanFunction::random_bounded(n, rng);
        for (Point x = 0; x < f.size(); ++x)
            CHECK(local_g(ball_values(f, x, n, CoordSet::full(n)), exact) == Approx(f.mean()).margin(1e-12));
        auto chi1 = BooleanFunction::character(n, CoordSet::of({0}));
        CHECK(local_estimate(ball_values(chi1, 0, n, CoordSet::full(n)), exact) == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("unbiasedness and variance identity") {
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        const int n = 3 + t % 8;
        const int L = std::max(2, n - t % 3);
        const int r = std::max(1, std::min(L, 1 + t % 4));
        auto p = LocalEstParams::with_radius(L, r, 10.0);
        auto f = BooleanFunction::random_bounded(n, rng);
        auto s = wht(f);
        auto m = local_g_moments(f, p);
        CHECK(std::abs(m.mean - s[0]) <= 1e-9);
        const auto w = s.level_weights();
        double want = 0.0;
        for (int i = 1; i <= n; ++i) want += std::pow(1.0 - p.flat.at_integer(i), 2) * w[i];
        INFO("n=" << n << " L=" << L << " r=" << r);
        CHECK(std::abs(m.var - want) <= 1e-9 * std::max(1.0, want));
    }
}

TEST_CASE("variance bound without high-level weight") {
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const int n = 6 + t % 3, L = 4;
        const int r = 2 + t % 2;
        auto p = LocalEstParams::with_radius(L, r, 1.0);
        auto f = low_degree(n, L - 1, rng);
        REQUIRE(weight_at_or_above(wht(f), L) <= 1e-20);
        const double var_f = f.mean_square() - f.mean() * f.mean();
        auto m = local_g_moments(f, p);
        CHECK(m.var <= p.flat.achieved_error * p.flat.achieved_error * var_f + 1e-12);
    }
}

TEST_CASE("local estimator error bound") {
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const int n = 6, L = 5, r = 3;
        auto p = LocalEstParams::with_radius(L, r, 0.5);
        auto f = (t & 1) ? low_degree(n, 3, rng) : BooleanFunction::random_bounded(n, rng);
        auto s = wht(f);
        double avg = 0.0;
        for (Point x = 0; x < f.size(); ++x) avg += local_estimate(ball_values(f, x, r, CoordSet::full(n)), p);
        avg /= static_cast<double>(f.size());
        const double var_f = f.mean_square() - s[0] * s[0];
        const double bound = p.flat.achieved_error * std::sqrt(var_f) + 5.0 * std::pow(n, r) * std::sqrt(weight_at_or_above(s, L));
        CHECK(std::abs(avg - std::abs(s[0])) <= bound + 1e-12);
    }
}

TEST_CASE("closeness of Est to the junta correlation") {
    // L = kappa * ell so that sets reaching level L outside C are damped by 2^-Delta.
    Rng rng(5);
    const int n = 8;
    const CoordSet U = CoordSet::of({0, 1, 2});
    auto p = LocalEstParams::with_radius(5, 3, 0.2);
    for (int t = 0; t < 12; ++t) {
        auto f = (t % 3 == 0) ? BooleanFunction::random_sign(n, rng) : BooleanFunction::random_bounded(n, rng);
        const CoordSet C = CoordSet(static_cast<std::uint32_t>(t % 8)) & U;
        auto sp = SharpNoiseParams::make(1, 5, 20, C.complement(n));
        auto fC = apply_exact(f, sp);
        const double est = exact_est(fC, U, p);
        const double corr = junta_corr_exact(fC, U);
        CHECK(std::abs(est - corr) <= 2.0 * p.tau);
    }
}

TEST_CASE("bundle drawing") {
    Rng rng(6);
    auto p0 = LocalEstParams::with_radius(1, 1, 1.0);
    NoiseMixture id{{1.0}, 0.5};
    // C = [n]: nothing is randomized, the ball in the complement is just x.
    auto b = draw_bundle(0b101, CoordSet::full(4), 4, p0, id, 1, rng);
    CHECK(b.entries() == std::vector<Point>{0b101});

    auto p = LocalEstParams::with_radius(3, 2, 1.0);
    auto mix = mixture_coeffs(SharpNoiseParams::make(2, 5, 1, CoordSet{}));
    const CoordSet C = CoordSet::of({0});
    auto bb = draw_bundle(0b0110, C, 5, p, mix, 3, rng);
    CHECK(bb.entry_count() == ball_size(4, 2) * 6 * 3);
    bb.for_each_entry([&](std::size_t y, int i, int, Point z) {
        if (i == 0) CHECK(z == (bb.x ^ bb.offsets[y]));
        CHECK(((z ^ bb.x ^ bb.offsets[y]) & C.bits) == 0u);
    });
    CHECK(bb.entries() == bb.entries());

    // Marginal flip rates against (1 - rho^i)/2, 3 sigma.
    const int trials = 10000;
    std::vector<int> flips(mix.alphas.size(), 0);
    for (int t = 0; t < trials; ++t) {
        auto d = draw_bundle(0, C, 5, p, mix, 1, rng);
        d.for_each_entry([&](std::size_t y, int i, int, Point z) {
            if (y == 0) flips[i] += (z >> 3) & 1u;
        });
    }
    for (std::size_t i = 0; i < flips.size(); ++i) {
        const double q = (1.0 - std::pow(mix.rho, static_cast<double>(i))) / 2.0;
        CHECK(std::abs(flips[i] - q * trials) <= 3.0 * std::sqrt(trials * q * (1 - q)) + 1e-9);
    }
}

TEST_CASE("weight route agrees with the derivative route on bundle values") {
    Rng rng(7);
    const int n = 7;
    auto f = BooleanFunction::random_bounded(n, rng);
    auto o = exact_oracle(f);
    auto mix = mixture_coeffs(SharpNoiseParams::make(2, 5, 1, CoordSet{}));
    const CoordSet C = CoordSet::of({1});
    for (int r : {1, 2, 3, 4}) {
        auto p = LocalEstParams::with_radius(5, r, 10.0);
        auto set = draw_and_evaluate(*o, C, p, mix, 6, 2, rng);
        for (CoordSet U : {CoordSet::of({1}), CoordSet::of({1, 2}), CoordSet::of({0, 1, 5})}) {
            double direct = 0.0;
            for (std::size_t j = 0; j < set.evaluated.xs.size(); ++j)
                direct += local_estimate(bundle_ball(set.evaluated, j, U), p);
            direct /= static_cast<double>(set.evaluated.xs.size());
            CHECK(estimate_junta_corr(set.evaluated, U, p) == Approx(direct).margin(1e-9));
        }
    }
    auto p = LocalEstParams::with_radius(5, 2, 10.0);
    auto set = draw_and_evaluate(*o, C, p, mix, 2, 1, rng);
    CHECK_THROWS_AS(estimate_junta_corr(set.evaluated, CoordSet::of({2}), p), DomainError);
    auto p3 = LocalEstParams::with_radius(5, 3, 10.0);
    CHECK_THROWS_AS(estimate_junta_corr(set.evaluated, CoordSet::of({1, 2}), p3), DomainError);
}

TEST_CASE("junta correlation estimates") {
    const int n = 6;
    const CoordSet U = CoordSet::of({0, 1, 2});
    auto sp = SharpNoiseParams::make(2, 5, 1, U.complement(n));
    auto mix = mixture_coeffs(sp);
    auto p = LocalEstParams::with_radius(3, 3, 1e-9);
    const double eps = 0.25;

    Rng frng(8);
    auto g = BooleanFunction::random_sign(3, frng);
    auto junta = BooleanFunction::from(n, [&](Point x) { return g(x & 7u); });
    int good = 0;
    for (int s = 0; s < 20; ++s) {
        Rng rng = make_rng(81, s);
        auto o = exact_oracle(junta);
        auto set = draw_and_evaluate(*o, U, p, mix, 32, 1, rng);
        good += std::abs(estimate_junta_corr(set.evaluated, U, p) - 1.0) <= eps / 2;
    }
    CHECK(good >= 18);

    // chi_S with S not inside U: target correlation 0.
    const CoordSet C = CoordSet::of({0});
    auto spC = SharpNoiseParams::make(2, 5, 1, C.complement(n));
    auto chiS = BooleanFunction::character(n, CoordSet::of({0, 3}));
    REQUIRE(junta_corr_exact(apply_exact(chiS, spC), U) == Approx(0.0).margin(1e-12));
    good = 0;
    for (int s = 0; s < 20; ++s) {
        Rng rng = make_rng(82, s);
        auto o = exact_oracle(chiS);
        auto set = draw_and_evaluate(*o, C, p, mix, 32, 2048, rng);
        good += estimate_junta_corr(set.evaluated, U, p) <= eps;
    }
    CHECK(good >= 18);
}

TEST_CASE("bundle reuse costs no queries") {
    Rng rng(9);
    const int n = 6;
    auto f = BooleanFunction::random_sign(n, rng);
    auto o = exact_oracle(f);
    const CoordSet C = CoordSet::of({0});
    auto mix = mixture_coeffs(SharpNoiseParams::make(2, 5, 1, C.complement(n)));
    auto p = LocalEstParams::with_radius(3, 3, 1e-9);
    auto set = draw_and_evaluate(*o, C, p, mix, 8, 4, rng);
    const auto spent = o->base_queries();
    CHECK(spent == 8u * ball_size(5, 3) * 5u * 4u);
    estimate_junta_corr(set.evaluated, CoordSet::of({0, 1, 2}), p);
    estimate_junta_corr(set.evaluated, CoordSet::of({0, 4, 5}), p);
    CHECK(o->base_queries() == spent);
}
