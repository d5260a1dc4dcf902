#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <json.hpp>

#include "junta/conjunction.hpp"
#include "junta/flatpoly.hpp"
#include "junta/params.hpp"
#include "junta/simplex.hpp"

namespace junta {

inline int ball_radius(int n) { return static_cast<int>(std::ceil(std::pow(n, 2.0 / 3.0) - 1e-9)); }

// x is a member when it differs from the anchor on at most `radius` of the
// constant coordinates.
struct BallEvent {
    int n = 0;
    Point anchor = 0;
    CoordSet const_coords;
    int radius = 0;

    int distance(Point x) const { return std::popcount((x ^ anchor) & const_coords.bits); }
    bool contains(Point x) const { return distance(x) <= radius; }
};

inline BallEvent build_ball_event(const std::vector<Point>& samples, int n) {
    if (samples.empty()) throw DomainError("a ball event needs at least one sample");
    if (n < 1 || n > kMaxArity) throw DomainError("arity out of range");
    BallEvent e;
    e.n = n;
    e.anchor = samples.front();
    std::uint32_t differ = 0;
    for (Point p : samples) differ |= p ^ e.anchor;
    e.const_coords = CoordSet(CoordSet::full(n).bits & ~differ);
    e.radius = ball_radius(n);
    return e;
}

inline std::size_t feature_count(int n, int d) {
    double s = 0.0;
    for (int j = 0; j <= std::min(n, d); ++j) s += binomial(n, j);
    return static_cast<std::size_t>(s);
}

// Multilinear polynomial in the +-1 coordinates: sum_S c_S chi_S(x).
struct MultilinearPolynomial {
    int n = 0;
    std::vector<CoordSet> monomials;
    std::vector<double> coeffs;

    static MultilinearPolynomial of_degree(int n, int d) {
        MultilinearPolynomial p;
        p.n = n;
        for (int j = 0; j <= std::min(n, d); ++j)
            for (CoordSet S : subsets_of_size(CoordSet::full(n), j)) p.monomials.push_back(S);
        p.coeffs.assign(p.monomials.size(), 0.0);
        return p;
    }

    double operator()(Point x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < monomials.size(); ++i)
            s += (std::popcount(x & monomials[i].bits) & 1) ? -coeffs[i] : coeffs[i];
        return s;
    }
};

struct ThresholdChoice {
    double threshold = 0.0;
    std::size_t mistakes = 0;
};

// Predict +1 iff p > t. Candidates are -inf and every p-value; the fewest
// mistakes wins, ties go to the larger threshold.
inline ThresholdChoice choose_threshold(const std::vector<double>& p, const std::vector<int>& y) {
    if (p.size() != y.size() || p.empty()) throw DataError("threshold scan needs matching nonempty inputs");
    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::size_t mistakes = 0;
    for (int v : y) mistakes += v == -1;
    ThresholdChoice best{-std::numeric_limits<double>::infinity(), mistakes};
    for (std::size_t i = 0; i < order.size();) {
        const double v = p[order[i]];
        for (; i < order.size() && p[order[i]] == v; ++i) mistakes += y[order[i]] == 1 ? 1 : -1;
        if (mistakes <= best.mistakes) best = {v, mistakes};
    }
    return best;
}

struct L1Fit {
    MultilinearPolynomial poly;
    double threshold = 0.0;
    double training_error = 0.0;
    double l1_loss = 0.0;  // mean |p(x) - y|
    std::size_t lp_iterations = 0;

    int predict(Point x) const { return poly(x) > threshold ? 1 : -1; }
};

// Least absolute deviations over degree-<=d multilinear polynomials, solved
// through its dual
//     max y.u  s.t.  Phi^T u = 0,  -1 <= u <= 1,
// whose equality multipliers give the coefficients (with a sign flip).
inline L1Fit l1_regression(const LabeledDataset& data, int d, std::size_t feature_cap = 5000,
                           SimplexOptions opt = {}) {
    if (data.size() == 0) throw DataError("empty dataset");
    if (d < 0) throw DomainError("negative degree");
    const std::size_t F = feature_count(data.n, d);
    if (F > feature_cap) throw CapacityError("regression needs " + std::to_string(F) + " features, above the cap");
    L1Fit fit;
    fit.poly = MultilinearPolynomial::of_degree(data.n, d);
    const std::size_t m = data.size();

    LinearProgram lp;
    for (std::size_t j = 0; j < m; ++j) lp.add_variable(-static_cast<double>(data.y[j]), -1.0, 1.0);
    for (std::size_t f = 0; f < F; ++f) {
        std::vector<double> row(m);
        for (std::size_t j = 0; j < m; ++j) row[j] = (std::popcount(data.x[j] & fit.poly.monomials[f].bits) & 1) ? -1.0 : 1.0;
        lp.add_constraint(row, LinearProgram::Sense::eq, 0.0);
    }
    const auto res = lp.minimize(opt);
    if (res.status == LpResult::Status::iteration_limit) throw CapacityError("simplex iteration cap reached");
    if (res.status != LpResult::Status::optimal || res.duals.size() != F)
        throw InvariantViolation("regression dual did not solve to optimality");
    for (std::size_t f = 0; f < F; ++f) fit.poly.coeffs[f] = -res.duals[f];
    fit.lp_iterations = res.iterations;

    std::vector<double> pv(m);
    double loss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        pv[j] = fit.poly(data.x[j]);
        loss += std::abs(pv[j] - data.y[j]);
    }
    // strong duality: the primal loss equals the dual value
    if (std::abs(loss + res.objective) > 1e-6 * std::max(1.0, loss))
        throw InvariantViolation("regression primal and dual values disagree");
    fit.l1_loss = loss / static_cast<double>(m);
    const auto t = choose_threshold(pv, data.y);
    fit.threshold = t.threshold;
    fit.training_error = static_cast<double>(t.mistakes) / static_cast<double>(m);
    return fit;
}

// h(x) = h'(x) inside the ball event, -1 (False) outside.
struct StitchedHypothesis {
    BallEvent ball;
    L1Fit fit;

    int operator()(Point x) const { return ball.contains(x) ? fit.predict(x) : -1; }
};

struct LearnedHypothesis {
    std::optional<StitchedHypothesis> stitched;  // empty: the constant -1

    int operator()(Point x) const { return stitched ? (*stitched)(x) : -1; }
};

inline nlohmann::json to_json(const LearnedHypothesis& h) {
    if (!h.stitched) return {{"constant", -1}};
    const auto& s = *h.stitched;
    nlohmann::json poly = nlohmann::json::array();
    for (std::size_t i = 0; i < s.fit.poly.monomials.size(); ++i)
        if (s.fit.poly.coeffs[i] != 0.0) poly.push_back({{"set", s.fit.poly.monomials[i].bits}, {"coeff", s.fit.poly.coeffs[i]}});
    return {{"ball_event",
             {{"n", s.ball.n}, {"anchor", s.ball.anchor}, {"const_coords", s.ball.const_coords.bits}, {"radius", s.ball.radius}}},
            {"polynomial", poly},
            {"threshold", s.fit.threshold}};
}

inline LearnedHypothesis hypothesis_from_json(const nlohmann::json& j) {
    LearnedHypothesis h;
    if (j.contains("constant")) return h;
    StitchedHypothesis s;
    const auto& b = j.at("ball_event");
    s.ball.n = b.at("n");
    s.ball.anchor = b.at("anchor");
    s.ball.const_coords = CoordSet(b.at("const_coords").get<std::uint32_t>());
    s.ball.radius = b.at("radius");
    s.fit.poly.n = s.ball.n;
    for (const auto& term : j.at("polynomial")) {
        s.fit.poly.monomials.push_back(CoordSet(term.at("set").get<std::uint32_t>()));
        s.fit.poly.coeffs.push_back(term.at("coeff"));
    }
    s.fit.threshold = j.at("threshold");
    h.stitched = std::move(s);
    return h;
}

struct LearnParams {
    int n = 0;
    double eps = 0.1;
    int m = 1;
    int degree = 1;
    std::size_t features = 1;
    std::size_t N = 1;
    std::size_t draws = 1;
    std::size_t selection = 1;
    std::uint64_t rounds = 1;

    static LearnParams make(const ParamSchedule& s, int n, double eps) {
        if (n < 1 || n > kMaxArity) throw DomainError("arity out of range");
        if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
        LearnParams p;
        p.n = n;
        p.eps = eps;
        const double n13 = std::cbrt(static_cast<double>(n));
        p.m = std::max(1, static_cast<int>(std::ceil(n13 - 1e-9)));
        p.degree = s.learn_degree > 0 ? s.learn_degree
                                      : std::max(1, static_cast<int>(std::ceil(s.c_d * n13 * std::log2(1.0 / eps) - 1e-9)));
        p.features = feature_count(n, p.degree);
        if (p.features > 5000) throw CapacityError("feature count above 5000");
        p.N = s.learn_N > 0 ? static_cast<std::size_t>(s.learn_N)
                            : std::min<std::size_t>(50 * p.features, static_cast<std::size_t>(std::max(1, s.learn_N_cap)));
        p.draws = static_cast<std::size_t>(std::ceil(s.draw_factor / eps * static_cast<double>(p.N)));
        p.selection = s.selection_samples > 0 ? static_cast<std::size_t>(s.selection_samples)
                                              : std::max<std::size_t>(4000, static_cast<std::size_t>(std::ceil(4.0 * (n / eps) * (n / eps))));
        p.rounds = s.learn_rounds > 0 ? static_cast<std::uint64_t>(s.learn_rounds)
                                      : static_cast<std::uint64_t>(std::min(1e7, std::pow(1.0 / eps, p.m)));
        return p;
    }
};

struct LearnReport {
    LearnedHypothesis hypothesis;
    LearnParams params;
    std::uint64_t positive_rounds = 0;  // rounds whose m labels were all +1
    std::uint64_t fitted_rounds = 0;    // rounds that reached N ball samples
    std::vector<double> selection_errors;  // [0] is the constant -1
    std::size_t winner = 0;
    std::uint64_t draws_used = 0;
};

// Rounds draw their tuples and ball samples in order from one stream; the
// regressions then run in parallel.
inline LearnReport agnostic_learn(const Sampler& sampler, double eps, const ParamSchedule& sched, Rng& rng) {
    LearnReport rep;
    rep.params = LearnParams::make(sched, sampler.n, eps);
    const auto& p = rep.params;
    const std::uint64_t used0 = sampler.used;

    struct Job {
        BallEvent ball;
        LabeledDataset data;
    };
    std::vector<Job> jobs;
    for (std::uint64_t round = 0; round < p.rounds; ++round) {
        std::vector<Point> tuple;
        bool all_positive = true;
        for (int j = 0; j < p.m; ++j) {
            auto [x, y] = sampler(rng);
            tuple.push_back(x);
            all_positive &= y == 1;
        }
        if (!all_positive) continue;
        ++rep.positive_rounds;
        Job job{build_ball_event(tuple, sampler.n), LabeledDataset{sampler.n, {}, {}}};
        for (std::size_t t = 0; t < p.draws && job.data.size() < p.N; ++t) {
            auto [x, y] = sampler(rng);
            if (job.ball.contains(x)) job.data.push(x, y);
        }
        if (job.data.size() < p.N) continue;
        jobs.push_back(std::move(job));
    }
    rep.fitted_rounds = jobs.size();

    std::vector<LearnedHypothesis> hyps(1);
    std::vector<std::optional<L1Fit>> fits(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) { fits[i] = l1_regression(jobs[i].data, p.degree); });
    for (std::size_t i = 0; i < jobs.size(); ++i) hyps.push_back({StitchedHypothesis{jobs[i].ball, *fits[i]}});

    const LabeledDataset holdout = sampler.take(p.selection, rng);
    rep.selection_errors.resize(hyps.size());
    parallel_for(hyps.size(), [&](std::size_t i) { rep.selection_errors[i] = empirical_error(holdout, hyps[i]); });
    rep.winner = static_cast<std::size_t>(std::min_element(rep.selection_errors.begin(), rep.selection_errors.end()) -
                                          rep.selection_errors.begin());
    rep.hypothesis = hyps[rep.winner];
    rep.draws_used = sampler.used - used0;
    return rep;
}

// q(t) = T_d(t/Delta) / T_d((Delta+1)/Delta) with Delta = min(slack, s) and
// d = ceil(3 sqrt(Delta) ln(1/eps)). With literal indicators in {0,1},
// p(x) = q(#true literals - (s - Delta) + 1) is 1 on satisfying points and
// within eps of 0 on points falsifying at most Delta literals.
struct AndApproximator {
    int s = 1;
    int delta = 1;
    int degree = 0;
    double norm = 1.0;

    double q(double t) const { return chebyshev_eval(degree, t / delta) / norm; }

    double operator()(Point x, const Conjunction& c) const {
        const int true_literals = std::popcount(~x & c.positive.bits) + std::popcount(x & c.negative.bits);
        return q(static_cast<double>(true_literals - (s - delta) + 1));
    }
};

inline AndApproximator and_approximator(int s, int slack, double eps) {
    if (s < 1 || slack < 1) throw DomainError("conjunction size and slack must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    AndApproximator a;
    a.s = s;
    a.delta = std::min(slack, s);
    a.degree = static_cast<int>(std::ceil(3.0 * std::sqrt(static_cast<double>(a.delta)) * std::log(1.0 / eps)));
    a.norm = chebyshev_eval(a.degree, (a.delta + 1.0) / a.delta);
    return a;
}

}  // namespace junta
