#include <catch_amalgamated.hpp>

#include "junta/reference.hpp"

using namespace junta;
using Catch::Approx;

namespace {

// max over |T| = k and over every sign function of the T-coordinates of E[f g]
double junta_corr_by_enumeration(const BooleanFunction& f, int k) {
    const int n = f.arity();
    double best = -1.0;
    for (CoordSet T : subsets_of_size(CoordSet::full(n), k)) {
        const auto coords = T.elements();
        for (std::uint32_t table = 0; table < (1u << (1u << k)); ++table) {
            double acc = 0.0;
            for (Point x = 0; x < (1u << n); ++x) {
                std::uint32_t key = 0;
                for (int j = 0; j < k; ++j) key |= ((x >> coords[j]) & 1u) << j;
                acc += f(x) * (((table >> key) & 1u) ? -1.0 : 1.0);
            }
            best = std::max(best, acc / (1u << n));
        }
    }
    return best;
}

// full enumeration of 3^n conjunctions and FALSE
std::size_t brute_opt(const LabeledDataset& d) {
    std::size_t best = d.positives();
    std::uint64_t total = 1;
    for (int i = 0; i < d.n; ++i) total *= 3;
    for (std::uint64_t t = 0; t < total; ++t) {
        Conjunction c;
        std::uint64_t v = t;
        for (int i = 0; i < d.n; ++i, v /= 3) {
            if (v % 3 == 1) c.positive.bits |= 1u << i;
            if (v % 3 == 2) c.negative.bits |= 1u << i;
        }
        std::size_t err = 0;
        for (std::size_t j = 0; j < d.size(); ++j) err += c(d.x[j]) != d.y[j];
        best = std::min(best, err);
    }
    return best;
}

}  // namespace

TEST_CASE("junta correlation of juntas and parities") {
    Rng rng = make_rng(1);
    const CoordSet T = CoordSet::of({1, 4, 5});
    auto base = BooleanFunction::random_sign(3, rng);
    auto f = BooleanFunction::from(7, [&](Point x) {
        const Point y = ((x >> 1) & 1u) | (((x >> 4) & 1u) << 1) | (((x >> 5) & 1u) << 2);
        return base(y);
    });
    auto r = exact_junta_corr_k(f, 3);
    CHECK(r.corr == Approx(1.0));
    if (junta_corr_exact(base, CoordSet::of({0, 1})) < 1.0 - 1e-9) CHECK(r.set == T);
    CHECK(exact_dist_junta(f, 3) == Approx(0.0).margin(1e-12));

    auto parity = BooleanFunction::character(6, CoordSet::full(4));
    CHECK(exact_junta_corr_k(parity, 3).corr == Approx(0.0).margin(1e-12));
    CHECK(exact_dist_junta(parity, 3) == Approx(0.5));
    CHECK_THROWS_AS(exact_junta_corr_k(parity, 7), DomainError);
}

TEST_CASE("junta correlation against double enumeration") {
    Rng rng = make_rng(2);
    for (int t = 0; t < 20; ++t) {
        auto f = t % 2 ? BooleanFunction::random_sign(4, rng) : BooleanFunction::random_bounded(4, rng);
        for (int k = 0; k <= 2; ++k) CHECK(exact_junta_corr_k(f, k).corr == Approx(junta_corr_by_enumeration(f, k)).margin(1e-12));
    }
}

TEST_CASE("junta correlation is monotone in k") {
    Rng rng = make_rng(3);
    for (int t = 0; t < 20; ++t) {
        auto f = BooleanFunction::random_sign(6, rng);
        double prev = -1.0;
        for (int k = 0; k <= 6; ++k) {
            const double c = exact_junta_corr_k(f, k).corr;
            CHECK(c >= prev - 1e-12);
            prev = c;
        }
        CHECK(prev == Approx(1.0));
    }
}

TEST_CASE("distance to one-juntas by enumeration") {
    Rng rng = make_rng(4);
    for (int t = 0; t < 20; ++t) {
        auto f = BooleanFunction::random_sign(4, rng);
        double best = 1.0;
        for (int i = 0; i < 4; ++i)
            for (int table = 0; table < 4; ++table) {
                int dis = 0;
                for (Point x = 0; x < 16; ++x) {
                    const double g = ((table >> ((x >> i) & 1u)) & 1) ? -1.0 : 1.0;
                    dis += f(x) != g;
                }
                best = std::min(best, dis / 16.0);
            }
        CHECK(exact_dist_junta(f, 1) == Approx(best).margin(1e-12));
    }
    auto bounded = BooleanFunction::random_bounded(4, rng);
    CHECK_THROWS_AS(exact_dist_junta(bounded, 1), DomainError);
}

TEST_CASE("optimal conjunction basics") {
    Rng rng = make_rng(5);
    LabeledDataset all_pos{6, {}, {}};
    for (int j = 0; j < 50; ++j) all_pos.push(uniform_point(6, rng), 1);
    auto r = exact_opt_conjunction(all_pos);
    CHECK(r.error == 0.0);
    CHECK(r.conjunction == Conjunction::always_true());

    LabeledDataset all_neg{6, {}, {}};
    for (int j = 0; j < 50; ++j) all_neg.push(uniform_point(6, rng), -1);
    CHECK(exact_opt_conjunction(all_neg).error == 0.0);

    LabeledDataset big{15, {}, {}};
    big.push(0, 1);
    CHECK_THROWS_AS(exact_opt_conjunction(big), CapacityError);
    CHECK_THROWS_AS(exact_opt_conjunction(LabeledDataset{4, {}, {}}), DataError);
}

TEST_CASE("noiseless planted conjunctions are recovered") {
    Rng rng = make_rng(6);
    for (int t = 0; t < 20; ++t) {
        const int n = uniform_int(4, 12, rng);
        auto target = random_conjunction(n, uniform_int(1, 4, rng), rng);
        auto data = planted_sampler(n, target, 0.0, 0.4).take(400, rng);
        auto r = exact_opt_conjunction(data);
        CHECK(r.mistakes == 0);
        CHECK(empirical_error(data, r.conjunction) == 0.0);
    }
}

TEST_CASE("noisy planted conjunctions") {
    Rng rng = make_rng(7);
    for (int t = 0; t < 10; ++t) {
        const int n = 10;
        auto target = random_conjunction(n, 4, rng);
        auto data = planted_sampler(n, target, 0.1, 0.5).take(1000, rng);
        auto r = exact_opt_conjunction(data);
        const double planted = empirical_error(data, target);
        CHECK(r.error <= planted);
        // planted error concentrates at the flip rate
        CHECK(planted <= 0.1 + 3.0 * std::sqrt(0.09 / 1000.0));
        CHECK(r.error == Approx(empirical_error(data, r.conjunction)));
        for (int s = 0; s < 100; ++s) {
            auto other = random_conjunction(n, uniform_int(0, n, rng), rng);
            CHECK(r.error <= empirical_error(data, other));
        }
    }
}

TEST_CASE("branch and bound agrees with full enumeration") {
    Rng rng = make_rng(8);
    for (int t = 0; t < 60; ++t) {
        const int n = uniform_int(1, 7, rng);
        LabeledDataset d{n, {}, {}};
        const int m = uniform_int(1, 80, rng);
        for (int j = 0; j < m; ++j) d.push(uniform_point(n, rng), (rng() & 1) ? 1 : -1);
        auto r = exact_opt_conjunction(d);
        CHECK(r.mistakes == brute_opt(d));
        CHECK(r.mistakes == static_cast<std::size_t>(std::llround(empirical_error(d, r.conjunction) * m)));
    }
}

TEST_CASE("conjunction search at the size limit") {
    Rng rng = make_rng(9);
    auto target = random_conjunction(14, 3, rng);
    auto data = planted_sampler(14, target, 0.05, 0.5).take(2000, rng);
    auto r = exact_opt_conjunction(data);
    CHECK(r.error <= empirical_error(data, target));
}

TEST_CASE("conjunction semantics") {
    Conjunction c;
    c.positive = CoordSet::of({0});
    c.negative = CoordSet::of({2});
    CHECK(c(0b100) == 1);
    CHECK(c(0b101) == -1);
    CHECK(c(0b000) == -1);
    CHECK(c.str() == "x1 & ~x3");
    Conjunction bad;
    bad.positive = CoordSet::of({1});
    bad.negative = CoordSet::of({1});
    CHECK(bad.normalized() == Conjunction::always_false());
    CHECK(Conjunction::always_false()(0) == -1);
    CHECK(Conjunction::always_true()(7) == 1);
}
