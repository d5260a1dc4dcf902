#pragma once

#include <utility>
#include <vector>

#include "junta/boolfn.hpp"
#include "junta/conjunction.hpp"

namespace junta {

struct JuntaCorrResult {
    double corr = 0.0;
    CoordSet set;
};

// max over |T| = k of the T-junta correlation; ties go to the smallest bitmask
inline JuntaCorrResult exact_junta_corr_k(const BooleanFunction& f, int k) {
    const int n = f.arity();
    if (k < 0 || k > n) throw DomainError("junta size outside [0, n]");
    const auto sets = subsets_of_size(CoordSet::full(n), k);
    std::vector<double> corr(sets.size());
    parallel_for(sets.size(), [&](std::size_t i) { corr[i] = junta_corr_exact(f, sets[i]); });
    JuntaCorrResult best{-1.0, CoordSet{}};
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (corr[i] > best.corr + 1e-12) best = {corr[i], sets[i]};
    return best;
}

inline double exact_dist_junta(const BooleanFunction& f, int k) {
    if (!f.sign_valued()) throw DomainError("distance to juntas needs a sign-valued function");
    return std::max(0.0, (1.0 - exact_junta_corr_k(f, k).corr) / 2.0);
}

struct ConjunctionFit {
    double error = 0.0;  // empirical error rate
    std::size_t mistakes = 0;
    Conjunction conjunction;
};

namespace detail {

class ConjunctionSearch {
public:
    explicit ConjunctionSearch(const LabeledDataset& d) : n_(d.n), words_((d.size() + 63) / 64) {
        pos_.assign(n_, std::vector<std::uint64_t>(words_, 0));
        neg_.assign(n_, std::vector<std::uint64_t>(words_, 0));
        label_.assign(words_, 0);
        all_.assign(words_, 0);
        for (std::size_t j = 0; j < d.size(); ++j) {
            const std::uint64_t bit = std::uint64_t{1} << (j % 64);
            all_[j / 64] |= bit;
            if (d.y[j] == 1) label_[j / 64] |= bit;
            for (int i = 0; i < n_; ++i) ((d.x[j] >> i) & 1u ? neg_ : pos_)[i][j / 64] |= bit;
        }
    }

    // Best completion of the literal choices fixed for variables < start,
    // given the points still satisfying them. index is the ternary mask so far
    // (variable 0 most significant; absent/positive/negative = 0/1/2).
    void run(int start, std::uint64_t index, const std::vector<std::uint64_t>& sat) {
        buf_.assign(n_ + 1, std::vector<std::uint64_t>(words_));
        buf_[start] = sat;
        best_err_ = ~std::size_t{0};
        best_index_ = 0;
        dfs(start, index);
    }

    std::size_t best_err() const { return best_err_; }
    std::uint64_t best_index() const { return best_index_; }

    std::size_t missed_positives(const std::vector<std::uint64_t>& sat) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(label_[w] & ~sat[w]);
        return c;
    }
    std::size_t false_positives(const std::vector<std::uint64_t>& sat) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(~label_[w] & sat[w]);
        return c;
    }
    std::vector<std::uint64_t> restrict(const std::vector<std::uint64_t>& sat, int var, int digit) const {
        std::vector<std::uint64_t> out = sat;
        if (digit == 1)
            for (std::size_t w = 0; w < words_; ++w) out[w] &= pos_[var][w];
        if (digit == 2)
            for (std::size_t w = 0; w < words_; ++w) out[w] &= neg_[var][w];
        return out;
    }
    const std::vector<std::uint64_t>& all() const { return all_; }

private:
    void dfs(int var, std::uint64_t index) {
        const auto& sat = buf_[var];
        const std::size_t lb = missed_positives(sat);
        if (lb >= best_err_) return;
        if (var == n_) {
            const std::size_t err = lb + false_positives(sat);
            if (err < best_err_) {
                best_err_ = err;
                best_index_ = index;
            }
            return;
        }
        for (int digit = 0; digit < 3; ++digit) {
            auto& next = buf_[var + 1];
            for (std::size_t w = 0; w < words_; ++w)
                next[w] = digit == 0 ? sat[w] : sat[w] & (digit == 1 ? pos_[var][w] : neg_[var][w]);
            dfs(var + 1, index * 3 + digit);
        }
    }

    int n_;
    std::size_t words_;
    std::vector<std::vector<std::uint64_t>> pos_, neg_, buf_;
    std::vector<std::uint64_t> label_, all_;
    std::size_t best_err_ = 0;
    std::uint64_t best_index_ = 0;
};

inline Conjunction conjunction_from_ternary(int n, std::uint64_t index) {
    Conjunction c;
    for (int i = n - 1; i >= 0; --i) {
        const int digit = static_cast<int>(index % 3);
        index /= 3;
        if (digit == 1) c.positive.bits |= 1u << i;
        if (digit == 2) c.negative.bits |= 1u << i;
    }
    return c;
}

}  // namespace detail

// Minimum empirical error over FALSE and every literal-consistent conjunction
// (TRUE is the empty one). Ties: FALSE first, then ternary mask order.
inline ConjunctionFit exact_opt_conjunction(const LabeledDataset& d) {
    if (d.n > 14) throw CapacityError("exhaustive conjunction search is limited to n <= 14");
    if (d.size() == 0) throw DataError("empty dataset");
    const int n = d.n;
    const std::size_t m = d.size();
    const std::size_t false_err = d.positives();

    // partitions over the choices for the first two variables
    const int lead = std::min(n, 2);
    std::size_t parts = 1;
    for (int i = 0; i < lead; ++i) parts *= 3;
    detail::ConjunctionSearch proto(d);
    std::vector<std::pair<std::size_t, std::uint64_t>> result(parts);
    parallel_for(parts, [&](std::size_t p) {
        detail::ConjunctionSearch s = proto;
        std::vector<std::uint64_t> sat = s.all();
        std::uint64_t idx = p;
        for (int i = 0, div = lead == 2 ? 3 : 1; i < lead; ++i, div /= 3) sat = s.restrict(sat, i, (idx / div) % 3);
        s.run(lead, idx, sat);
        result[p] = {s.best_err(), s.best_index()};
    });

    std::size_t best_err = false_err;
    Conjunction best = Conjunction::always_false();
    std::uint64_t best_index = ~std::uint64_t{0};
    for (auto [err, index] : result) {
        if (err < best_err || (err == best_err && !best.constant_override && index < best_index)) {
            best_err = err;
            best_index = index;
            best = detail::conjunction_from_ternary(n, index);
        }
    }
    return {static_cast<double>(best_err) / static_cast<double>(m), best_err, best};
}

}  // namespace junta
