#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "junta/localest.hpp"
#include "junta/params.hpp"
#include "junta/refine.hpp"

namespace junta {

struct CandidateRecord {
    CoordSet C;
    CoordSet I;
    CoordSet U;
    double est = 0.0;
    bool passed = true;  // frequency test; always true for the classical tester
    std::string kind;    // "local" or "direct"
};

struct TesterReport {
    double gamma = 0.0;
    double dist = 0.5;
    CoordSet best_set;
    std::uint64_t query_count = 0;
    std::uint64_t spectral_samples = 0;
    bool aborted = false;
    double runtime_seconds = 0.0;
    std::vector<CandidateRecord> candidates;
    std::map<std::string, double> caps;

    void finish() {
        gamma = std::clamp(gamma, 0.0, 1.0);
        dist = (1.0 - gamma) / 2.0;
    }
};

// Restricts which k-sets U are evaluated; all sets by default.
using SetFilter = std::function<bool(CoordSet U)>;

namespace detail {

struct LocalSetup {
    LocalEstParams lp;
    NoiseMixture mix;
    int replicas = 1;
    int N = 1;
    int ell = 1;

    std::size_t nonzero_alphas() const {
        std::size_t c = 0;
        for (double a : mix.alphas) c += a != 0.0;
        return c;
    }
};

inline LocalSetup local_setup(int kprime, int k, double eps, const ParamSchedule& s) {
    LocalSetup st;
    st.ell = s.ell_for(k);
    st.lp = LocalEstParams::make(s.L_for(kprime, k), std::min(s.tau_factor * eps, 0.5), s.c_r);
    st.mix = mixture_coeffs(SharpNoiseParams::make(st.ell, s.kappa, s.delta_exp, CoordSet{}));
    if (s.replicas > 0) {
        st.replicas = s.replicas;
    } else {
        double sq = 0.0;
        for (double a : st.mix.alphas) sq += a * a;
        const double want = std::ceil(sq / (std::ldexp(1.0, kprime - k) * eps * eps));
        st.replicas = static_cast<int>(std::clamp(want, 1.0, static_cast<double>(std::max(1, s.max_replicas))));
    }
    st.N = s.N > 0 ? s.N : static_cast<int>(std::min(1e6, std::ceil(std::pow(kprime / eps, 4))));
    return st;
}

inline BundleEvalOptions eval_options(const ParamSchedule& s, double eps, const LocalSetup& st, int kprime) {
    if (s.regime != Regime::paper) return {};
    return paper_eval_options(eps, st.mix, ball_size(kprime, st.lp.r));
}

inline std::vector<CoordSet> supersets_of_size(CoordSet C, int n, int k, CoordSet forbidden = {}) {
    std::vector<CoordSet> out;
    if (C.size() > k || C.intersects(forbidden)) return out;
    const CoordSet free = CoordSet::full(n) - C - forbidden;
    for (CoordSet extra : subsets_of_size(free, k - C.size())) out.push_back(C | extra);
    return out;
}

inline void record_caps(TesterReport& r, const LocalSetup& st, int outer) {
    r.caps["N"] = st.N;
    r.caps["replicas"] = st.replicas;
    r.caps["L"] = st.lp.L;
    r.caps["r"] = st.lp.r;
    r.caps["tau"] = st.lp.tau;
    r.caps["ell"] = st.ell;
    r.caps["outer_reps"] = outer;
}

}  // namespace detail

// True when at most max_frac of the reference samples lie inside U with at
// least ell coordinates outside C.
inline bool passes_frequency_test(const std::vector<CoordSet>& ref, CoordSet C, CoordSet U, int ell, double max_frac) {
    std::size_t bad = 0;
    for (CoordSet S : ref) bad += S.subset_of(U) && (S - C).size() >= ell;
    return static_cast<double>(bad) <= max_frac * static_cast<double>(ref.size());
}

// corr(g, J_A) = E_x |g_ave^{complement A}(x)|, estimated by stratifying over the
// 2^{|A|} settings of the A-coordinates (uniform points when |A| > 16).
inline double estimate_corr_direct(OraclePtr o, CoordSet A, double eps, double delta, Rng& rng) {
    if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) throw DomainError("eps and delta must be positive");
    const int n = o->arity();
    if (!A.subset_of(CoordSet::full(n))) throw DomainError("A outside the domain");
    auto avg = averaged_oracle(o, A.complement(n));
    if (A.size() <= 16) {
        const std::size_t cells = std::size_t{1} << A.size();
        const auto coords = A.elements();
        double s = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            Point x = 0;
            for (std::size_t j = 0; j < coords.size(); ++j) x |= static_cast<Point>((c >> j) & 1u) << coords[j];
            s += std::abs(estimate_value(*avg, x, eps, delta / static_cast<double>(cells), rng));
        }
        return s / static_cast<double>(cells);
    }
    const double M = o->bound();
    const std::size_t points = static_cast<std::size_t>(std::ceil(2.0 * M * M * std::log(4.0 / delta) / (eps * eps)));
    double s = 0.0;
    for (std::size_t j = 0; j < points; ++j)
        s += std::abs(estimate_value(*avg, uniform_point(n, rng), eps / 2.0, delta / (2.0 * points), rng));
    return s / static_cast<double>(points);
}

// Spectral-sample-driven tester. Spectral draws from P_f stand in for the
// quantum queries; every classical query goes through `oracle` (by default an
// exact table of f).
inline TesterReport quantum_sim_tester(const BooleanFunction& f, int k, double eps, const ParamSchedule& sched, Rng& rng,
                                       OraclePtr oracle = nullptr, SetFilter filter = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = f.arity();
    if (k < 1 || k > n) throw DomainError("k must lie in [1, k']");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    if (!f.sign_valued()) throw DomainError("the tester needs a sign-valued function");
    if (n > 12) throw CapacityError("k' above 12 is outside desk scale");
    if (!oracle) oracle = exact_oracle(f);
    if (oracle->arity() != n) throw DomainError("oracle arity differs from f");
    const std::uint64_t q0 = oracle->base_queries();

    const auto st = detail::local_setup(n, k, eps, sched);
    const SpectralSampler P(wht(f));
    TesterReport rep;
    const double ref_target = std::pow(n / eps, 4);
    const auto ref_count = static_cast<std::size_t>(std::max(1.0, std::min(ref_target, static_cast<double>(sched.ref_samples_cap))));
    std::vector<CoordSet> ref(ref_count);
    for (auto& S : ref) S = P(rng);
    const int draws = sched.c_samples_for(k);
    const int outer = std::max(1, sched.outer_reps);
    detail::record_caps(rep, st, outer);
    rep.caps["ref_samples"] = static_cast<double>(ref_count);
    rep.caps["ref_samples_uncapped"] = ref_target;
    rep.caps["spectral_draws_per_rep"] = draws;

    // candidate C's, in order of first appearance
    std::vector<CoordSet> Cs;
    std::set<std::uint32_t> seen;
    for (int t = 0; t < outer; ++t) {
        CoordSet C;
        for (int j = 0; j < draws; ++j) C = C | P(rng);
        if (C.size() > k) continue;
        if (seen.insert(C.bits).second) Cs.push_back(C);
    }
    rep.spectral_samples = ref_count + static_cast<std::uint64_t>(outer) * draws;
    rep.caps["distinct_C"] = static_cast<double>(Cs.size());

    const double pass_frac = sched.freq_test_factor * eps * eps;
    const auto opt = detail::eval_options(sched, eps, st, n);
    const std::uint64_t seed = rng();
    std::vector<std::vector<CandidateRecord>> logs(Cs.size());
    parallel_for(Cs.size(), [&](std::size_t ci) {
        const CoordSet C = Cs[ci];
        Rng r = make_rng(seed, ci);
        const auto bundles = draw_and_evaluate(*oracle, C, st.lp, st.mix, st.N, st.replicas, r, opt);
        for (CoordSet U : detail::supersets_of_size(C, n, k)) {
            if (filter && !filter(U)) continue;
            CandidateRecord rec{C, CoordSet{}, U, 0.0, passes_frequency_test(ref, C, U, st.ell, pass_frac), "local"};
            if (rec.passed) rec.est = estimate_junta_corr(bundles.evaluated, U, st.lp);
            logs[ci].push_back(rec);
        }
    });
    for (auto& l : logs)
        for (auto& rec : l) {
            if (rec.passed && rec.est > rep.gamma) {
                rep.gamma = rec.est;
                rep.best_set = rec.U;
            }
            rep.candidates.push_back(rec);
        }
    rep.query_count = oracle->base_queries() - q0;
    rep.finish();
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Fully classical tester with coordinate oracles.
inline TesterReport classical_tester(OraclePtr f, int k, double eps, const CoordinateOracleSet& oracles,
                                     const ParamSchedule& sched, Rng& rng, SetFilter filter = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    OraclePtr g = coordinate_avg_oracle(f, oracles);
    const int n = g->arity();
    if (k < 1 || k > n) throw DomainError("k must lie in [1, k']");
    if (n > 12) throw CapacityError("k' above 12 is outside desk scale");
    const std::uint64_t q0 = g->base_queries();

    TesterReport rep;
    const auto found = find_high_level_coordinates(g, k, eps * eps, sched, rng);
    const auto st = detail::local_setup(n, k, eps, sched);
    detail::record_caps(rep, st, static_cast<int>(found.pairs.size()));
    rep.caps["pairs"] = static_cast<double>(found.pairs.size());

    // bundles are drawn once per distinct C' and shared by every I paired with it
    std::vector<CoordSet> Cs;
    for (const auto& q : found.pairs)
        if (q.C.size() <= k && std::find(Cs.begin(), Cs.end(), q.C) == Cs.end()) Cs.push_back(q.C);
    rep.caps["distinct_C"] = static_cast<double>(Cs.size());
    const auto opt = detail::eval_options(sched, eps, st, n);
    const std::uint64_t seed = rng();
    std::vector<EvaluatedBundles> evals(Cs.size());
    parallel_for(Cs.size(), [&](std::size_t ci) {
        Rng r = make_rng(seed, ci);
        evals[ci] = draw_and_evaluate(*g, Cs[ci], st.lp, st.mix, st.N, st.replicas, r, opt).evaluated;
    });

    std::vector<std::pair<RefinePair, CoordSet>> choices;  // (pair, A)
    for (const auto& q : found.pairs) {
        auto it = std::find(Cs.begin(), Cs.end(), q.C);
        if (it == Cs.end()) continue;
        const auto& ev = evals[static_cast<std::size_t>(it - Cs.begin())];
        double best = -1.0;
        CoordSet A;
        bool any = false;
        for (CoordSet U : detail::supersets_of_size(q.C, n, k, q.I)) {
            if (filter && !filter(U)) continue;
            const double e = estimate_junta_corr(ev, U, st.lp);
            rep.candidates.push_back({q.C, q.I, U, e, true, "local"});
            if (e > best) {
                best = e;
                A = U;
                any = true;
            }
        }
        if (any) choices.emplace_back(q, A);
    }

    std::vector<CoordSet> As;
    for (const auto& [q, A] : choices)
        if (std::find(As.begin(), As.end(), A) == As.end()) As.push_back(A);
    std::vector<double> direct(As.size());
    const std::uint64_t dseed = rng();
    parallel_for(As.size(), [&](std::size_t i) {
        Rng r = make_rng(dseed, i);
        direct[i] = estimate_corr_direct(g, As[i], sched.direct_eps_factor * eps, sched.direct_delta, r);
    });
    for (std::size_t i = 0; i < As.size(); ++i) {
        rep.candidates.push_back({CoordSet{}, CoordSet{}, As[i], direct[i], true, "direct"});
        if (direct[i] > rep.gamma) {
            rep.gamma = direct[i];
            rep.best_set = As[i];
        }
    }
    rep.query_count = g->base_queries() - q0;
    rep.finish();
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Upper bounds on base queries, used to size the abort budget.
inline double quantum_expected_queries(int kprime, int k, double eps, const ParamSchedule& s) {
    const auto st = detail::local_setup(kprime, k, eps, s);
    return static_cast<double>(std::max(1, s.outer_reps)) * st.N * static_cast<double>(ball_size(kprime, st.lp.r)) *
           static_cast<double>(st.nonzero_alphas()) * st.replicas;
}

inline double classical_expected_queries(int kprime, int k, double eps, const ParamSchedule& s) {
    const auto st = detail::local_setup(kprime, k, eps, s);
    double sets = 0.0;
    for (int j = 0; j <= k; ++j) sets += binomial(kprime, j);
    sets = std::min(sets, static_cast<double>(s.family_cap));
    const double per_C = st.N * static_cast<double>(ball_size(kprime, st.lp.r)) * static_cast<double>(st.nonzero_alphas()) * st.replicas;
    const double cells = std::ldexp(1.0, k);
    const double per_A = cells * static_cast<double>(value_query_count(1.0, s.direct_eps_factor * eps, s.direct_delta / cells));
    return sets * per_C + binomial(kprime, k) * per_A;
}

// Runs `run` against a budgeted view of `base`; an overrun is a defined outcome
// with gamma = 0.
template <class Run>
TesterReport run_with_budget(OraclePtr base, double budget, Run&& run) {
    const auto cap = static_cast<std::uint64_t>(std::min(budget, 1.8e19));
    auto limited = budgeted_oracle(base, cap);
    try {
        TesterReport r = run(limited);
        r.caps["budget"] = budget;
        return r;
    } catch (const BudgetExceeded&) {
        TesterReport r;
        r.aborted = true;
        r.query_count = cap;
        r.caps["budget"] = budget;
        r.finish();
        return r;
    }
}

inline double distance_estimate(const TesterReport& r) {
    if (r.aborted) return 0.5;
    return (1.0 - std::clamp(r.gamma, 0.0, 1.0)) / 2.0;
}

}  // namespace junta
