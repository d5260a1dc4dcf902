#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "junta/boolfn.hpp"

namespace junta {

enum class Regime { desk, paper };

// Randomized M-bounded query access to a function g: every answer lies in
// [-M, M] and the answers at a fixed x average to g(x).
class ValueOracle {
public:
    ValueOracle(int arity, double bound) : arity_(arity), bound_(bound) {}
    virtual ~ValueOracle() = default;

    virtual double query(Point x, Rng& rng) const = 0;

    int arity() const { return arity_; }
    double bound() const { return bound_; }

    virtual bool deterministic() const { return false; }
    // Cumulative calls to the underlying base function.
    virtual std::uint64_t base_queries() const = 0;
    // Base-function calls made by one query.
    virtual std::uint64_t fanout() const = 0;
    // The exact function whose values the answers average to, when the base is
    // an explicit table.
    virtual BooleanFunction represented() const = 0;

private:
    int arity_;
    double bound_;
};

using OraclePtr = std::shared_ptr<const ValueOracle>;

class TableOracle final : public ValueOracle {
public:
    explicit TableOracle(BooleanFunction f) : ValueOracle(f.arity(), f.bound()), f_(std::move(f)) {}

    double query(Point x, Rng&) const override {
        count_.fetch_add(1, std::memory_order_relaxed);
        return f_(x);
    }
    bool deterministic() const override { return true; }
    std::uint64_t base_queries() const override { return count_.load(std::memory_order_relaxed); }
    std::uint64_t fanout() const override { return 1; }
    BooleanFunction represented() const override { return f_; }
    const BooleanFunction& table() const { return f_; }

private:
    BooleanFunction f_;
    mutable std::atomic<std::uint64_t> count_{0};
};

// Answers +1 with probability (1+g(x))/2 and -1 otherwise.
class BernoulliOracle final : public ValueOracle {
public:
    explicit BernoulliOracle(BooleanFunction means) : ValueOracle(means.arity(), 1.0), g_(std::move(means)) {
        if (g_.bound() > 1.0) throw DomainError("Bernoulli means must lie in [-1,1]");
    }

    double query(Point x, Rng& rng) const override {
        count_.fetch_add(1, std::memory_order_relaxed);
        return uniform01(rng) < 0.5 * (1.0 + g_(x)) ? 1.0 : -1.0;
    }
    std::uint64_t base_queries() const override { return count_.load(std::memory_order_relaxed); }
    std::uint64_t fanout() const override { return 1; }
    BooleanFunction represented() const override { return g_; }

private:
    BooleanFunction g_;
    mutable std::atomic<std::uint64_t> count_{0};
};

class ForwardingOracle : public ValueOracle {
public:
    ForwardingOracle(OraclePtr inner, double bound) : ValueOracle(inner->arity(), bound), inner_(std::move(inner)) {}
    std::uint64_t base_queries() const override { return inner_->base_queries(); }
    const OraclePtr& inner() const { return inner_; }

protected:
    OraclePtr inner_;
};

class NoisyOracle final : public ForwardingOracle {
public:
    NoisyOracle(OraclePtr inner, double rho, CoordSet V)
        : ForwardingOracle(inner, inner->bound()), noise_(rho, V), rho_(rho), V_(V) {}

    double query(Point x, Rng& rng) const override { return inner_->query(noise_(x, rng), rng); }
    bool deterministic() const override { return inner_->deterministic() && (rho_ == 1.0 || V_.empty()); }
    std::uint64_t fanout() const override { return inner_->fanout(); }
    BooleanFunction represented() const override { return noise_operator(inner_->represented(), rho_, V_); }

private:
    NoiseSampler noise_;
    double rho_;
    CoordSet V_;
};

class AveragedOracle final : public ForwardingOracle {
public:
    AveragedOracle(OraclePtr inner, CoordSet V) : ForwardingOracle(inner, inner->bound()), V_(V) {}

    double query(Point x, Rng& rng) const override {
        if (V_.empty()) return inner_->query(x, rng);
        const Point r = static_cast<Point>(rng()) & V_.bits;
        return inner_->query((x & ~V_.bits) | r, rng);
    }
    bool deterministic() const override { return inner_->deterministic() && V_.empty(); }
    std::uint64_t fanout() const override { return inner_->fanout(); }
    BooleanFunction represented() const override { return average_over(inner_->represented(), V_); }

private:
    CoordSet V_;
};

// Throws BudgetExceeded once the base-query count consumed since construction
// would pass the budget.
class BudgetedOracle final : public ForwardingOracle {
public:
    BudgetedOracle(OraclePtr inner, std::uint64_t budget)
        : ForwardingOracle(inner, inner->bound()), budget_(budget), start_(inner->base_queries()) {}

    double query(Point x, Rng& rng) const override {
        if (inner_->base_queries() - start_ + inner_->fanout() > budget_)
            throw BudgetExceeded("query budget exhausted");
        return inner_->query(x, rng);
    }
    bool deterministic() const override { return inner_->deterministic(); }
    std::uint64_t fanout() const override { return inner_->fanout(); }
    BooleanFunction represented() const override { return inner_->represented(); }
    std::uint64_t used() const { return inner_->base_queries() - start_; }

private:
    std::uint64_t budget_;
    std::uint64_t start_;
};

inline std::shared_ptr<const TableOracle> exact_oracle(const BooleanFunction& f) {
    return std::make_shared<const TableOracle>(f);
}

inline OraclePtr noisy_oracle(OraclePtr o, double rho, CoordSet V) {
    return std::make_shared<const NoisyOracle>(std::move(o), rho, V);
}

inline OraclePtr averaged_oracle(OraclePtr o, CoordSet V) {
    return std::make_shared<const AveragedOracle>(std::move(o), V);
}

inline OraclePtr budgeted_oracle(OraclePtr o, std::uint64_t budget) {
    return std::make_shared<const BudgetedOracle>(std::move(o), budget);
}

// ---------------------------------------------------------------------------
// Coordinate oracles. Only the identity provider (k' = n, oracle i returns x_i)
// ships; an external provider can be plugged in through `provider`.

struct CoordinateOracleSet {
    enum class Mode { identity, external };

    int kprime = 0;
    Mode mode = Mode::identity;
    // Confidence for an external provider; the identity provider ignores it.
    double confidence = 1.0;
    std::function<OraclePtr(OraclePtr base, const CoordinateOracleSet&)> provider;

    static CoordinateOracleSet identity(int n) { return {n, Mode::identity, 1.0, {}}; }
};

inline OraclePtr coordinate_avg_oracle(OraclePtr base, const CoordinateOracleSet& oracles) {
    if (oracles.mode == CoordinateOracleSet::Mode::identity) {
        if (oracles.kprime != base->arity())
            throw DomainError("identity coordinate oracles require k' = n");
        return base;
    }
    if (!oracles.provider) throw UnsupportedModeError("external coordinate-oracle provider not plugged in");
    return oracles.provider(std::move(base), oracles);
}

// ---------------------------------------------------------------------------
// Estimators

inline std::uint64_t value_query_count(double M, double eps, double delta) {
    return static_cast<std::uint64_t>(std::ceil(2.0 * M * M * std::log(2.0 / delta) / (eps * eps)));
}

inline double estimate_value(const ValueOracle& o, Point x, double eps, double delta, Rng& rng) {
    if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) throw DomainError("eps and delta must be positive");
    const double M = o.bound();
    if (o.deterministic()) return std::clamp(o.query(x, rng), -M, M);
    const std::uint64_t n = std::max<std::uint64_t>(1, value_query_count(M, eps, delta));
    double s = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) s += o.query(x, rng);
    return std::clamp(s / static_cast<double>(n), -M, M);
}

struct L2Plan {
    std::uint64_t outer = 1;
    std::uint64_t inner = 1;
};

inline L2Plan l2_plan(double M, double eps, double delta, Regime regime, bool deterministic) {
    L2Plan p;
    if (regime == Regime::paper) {
        const double N = std::ceil(1000.0 * std::pow(M, 4) * std::log(1.0 / delta) / (eps * eps));
        p.outer = p.inner = static_cast<std::uint64_t>(N);
    } else {
        // Hoeffding on Z^2 in [0, M^2] for half the error, and enough inner
        // queries that the upward bias Var/inner stays below the other half.
        p.outer = static_cast<std::uint64_t>(std::ceil(2.0 * std::pow(M, 4) * std::log(4.0 / delta) / (eps * eps)));
        p.inner = static_cast<std::uint64_t>(std::ceil(2.0 * M * M / eps));
    }
    if (deterministic) p.inner = 1;
    p.outer = std::max<std::uint64_t>(p.outer, 1);
    p.inner = std::max<std::uint64_t>(p.inner, 1);
    return p;
}

// Z/D construction: average `inner` answers at each of `outer` uniform points,
// square, average. The result lies in [0, M^2].
inline double estimate_l2(const ValueOracle& o, const L2Plan& plan, Rng& rng) {
    const double M = o.bound();
    double acc = 0.0;
    for (std::uint64_t j = 0; j < plan.outer; ++j) {
        const Point x = uniform_point(o.arity(), rng);
        double z = 0.0;
        for (std::uint64_t i = 0; i < plan.inner; ++i) z += o.query(x, rng);
        z = std::clamp(z / static_cast<double>(plan.inner), -M, M);
        acc += z * z;
    }
    return std::clamp(acc / static_cast<double>(plan.outer), 0.0, M * M);
}

inline double estimate_l2(const ValueOracle& o, double eps, double delta, Rng& rng, Regime regime = Regime::desk) {
    if (!(eps > 0.0 && eps <= 0.25) || !(delta > 0.0 && delta <= 0.25))
        throw DomainError("estimate_l2 needs eps, delta in (0, 1/4]");
    return estimate_l2(o, l2_plan(o.bound(), eps, delta, regime, o.deterministic()), rng);
}

}  // namespace junta
