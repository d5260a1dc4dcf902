#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "junta/core.hpp"

namespace junta {

// +1 is True, -1 is False. A positive literal on i holds when x_i = +1, a
// negative literal when x_i = -1.
struct Conjunction {
    enum class Constant { always_true, always_false };

    CoordSet positive;
    CoordSet negative;
    std::optional<Constant> constant_override;

    static Conjunction always_true() { return {}; }
    static Conjunction always_false() { return {CoordSet{}, CoordSet{}, Constant::always_false}; }

    Conjunction normalized() const {
        if (constant_override == Constant::always_true) return always_true();
        if (constant_override == Constant::always_false || positive.intersects(negative)) return always_false();
        return *this;
    }

    bool satisfied(Point x) const {
        if (constant_override) return *constant_override == Constant::always_true;
        return (x & positive.bits) == 0 && (x & negative.bits) == negative.bits;
    }
    int operator()(Point x) const { return satisfied(x) ? 1 : -1; }

    int size() const { return constant_override ? 0 : positive.size() + negative.size(); }

    std::string str() const {
        if (constant_override) return *constant_override == Constant::always_true ? "TRUE" : "FALSE";
        if (positive.empty() && negative.empty()) return "TRUE";
        std::string s;
        for (std::uint32_t b = positive.bits | negative.bits; b; b &= b - 1) {
            const int i = std::countr_zero(b);
            if (!s.empty()) s += " & ";
            s += (negative.contains(i) ? "~x" : "x") + std::to_string(i + 1);
        }
        return s;
    }

    friend bool operator==(const Conjunction& a, const Conjunction& b) {
        const Conjunction x = a.normalized(), y = b.normalized();
        return x.positive == y.positive && x.negative == y.negative && x.constant_override == y.constant_override;
    }
};

struct LabeledDataset {
    int n = 0;
    std::vector<Point> x;
    std::vector<int> y;

    std::size_t size() const { return x.size(); }

    void push(Point p, int label) {
        if (label != 1 && label != -1) throw DataError("labels must be +1 or -1");
        if (n < 32 && (p >> n) != 0) throw DataError("point outside {+1,-1}^n");
        x.push_back(p);
        y.push_back(label);
    }

    std::size_t positives() const {
        std::size_t c = 0;
        for (int v : y) c += v == 1;
        return c;
    }
};

template <class H>
double empirical_error(const LabeledDataset& d, const H& h) {
    if (d.size() == 0) throw DataError("empty dataset");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < d.size(); ++i) wrong += h(d.x[i]) != d.y[i];
    return static_cast<double>(wrong) / static_cast<double>(d.size());
}

// Streaming draws from a distribution over labeled examples.
struct Sampler {
    int n = 0;
    std::function<std::pair<Point, int>(Rng&)> draw;
    std::uint64_t limit = ~std::uint64_t{0};
    mutable std::uint64_t used = 0;

    std::pair<Point, int> operator()(Rng& rng) const {
        if (used >= limit) throw DataError("sampler exhausted");
        ++used;
        return draw(rng);
    }

    LabeledDataset take(std::size_t count, Rng& rng) const {
        LabeledDataset d{n, {}, {}};
        d.x.reserve(count);
        d.y.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            auto [p, l] = (*this)(rng);
            d.push(p, l);
        }
        return d;
    }
};

// Labels from `target`, flipped with probability eta. The marginal is uniform
// unless positive_rate is set, in which case a satisfying point is drawn with
// that probability and a uniform point otherwise.
inline Sampler planted_sampler(int n, const Conjunction& target, double eta, std::optional<double> positive_rate = {}) {
    if (n < 1 || n > kMaxArity) throw DomainError("arity out of range");
    if (!(eta >= 0.0 && eta <= 0.5)) throw DomainError("flip rate outside [0, 1/2]");
    Sampler s;
    s.n = n;
    s.draw = [n, target, eta, positive_rate](Rng& rng) {
        Point x = uniform_point(n, rng);
        if (positive_rate && !target.constant_override && uniform01(rng) < *positive_rate)
            x = (x & ~target.positive.bits) | target.negative.bits;
        int label = target(x);
        if (uniform01(rng) < eta) label = -label;
        return std::pair<Point, int>{x, label};
    };
    return s;
}

// Labels from `target` flipped with probability eta; each coordinate is -1
// independently with probability bias.
inline Sampler product_sampler(int n, const Conjunction& target, double eta, double bias) {
    if (n < 1 || n > kMaxArity) throw DomainError("arity out of range");
    if (!(eta >= 0.0 && eta <= 0.5)) throw DomainError("flip rate outside [0, 1/2]");
    if (!(bias >= 0.0 && bias <= 1.0)) throw DomainError("bias outside [0, 1]");
    Sampler s;
    s.n = n;
    s.draw = [n, target, eta, bias](Rng& rng) {
        Point x = 0;
        for (int i = 0; i < n; ++i)
            if (uniform01(rng) < bias) x |= Point{1} << i;
        int label = target(x);
        if (uniform01(rng) < eta) label = -label;
        return std::pair<Point, int>{x, label};
    };
    return s;
}

inline Sampler dataset_sampler(const LabeledDataset& d) {
    if (d.size() == 0) throw DataError("empty dataset");
    Sampler s;
    s.n = d.n;
    s.draw = [d](Rng& rng) {
        const std::size_t i = std::uniform_int_distribution<std::size_t>(0, d.size() - 1)(rng);
        return std::pair<Point, int>{d.x[i], d.y[i]};
    };
    return s;
}

inline Conjunction random_conjunction(int n, int size, Rng& rng) {
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = i;
    std::shuffle(c.begin(), c.end(), rng);
    Conjunction out;
    for (int j = 0; j < size && j < n; ++j) {
        if (rng() & 1)
            out.negative.bits |= 1u << c[j];
        else
            out.positive.bits |= 1u << c[j];
    }
    return out;
}

}  // namespace junta
