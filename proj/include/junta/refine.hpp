#pragma once

#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include <json.hpp>

#include "junta/ninf.hpp"
#include "junta/params.hpp"
#include "junta/sharpnoise.hpp"

namespace junta {

struct RefineParams {
    int kprime = 0;
    int k = 1;
    double eps = 0.1;
    int beta = 1;
    int m = 1;           // coordinate guesses per repetition
    int gamma = 1;       // level of the sampled sets
    int ell = 1;
    int kappa = 5;
    int delta_exp = 10;
    int outer_reps = 200;
    double variance_threshold = 0.0;
    int ell_prime = 1;
    int family_cap = 5000;
    double ninf_accuracy = 0.02;
    RefineBackend backend = RefineBackend::idealized;

    static RefineParams make(const ParamSchedule& s, int kprime, int k, double eps, int c_size) {
        if (k < 1 || k > kprime) throw DomainError("k must lie in [1, k']");
        if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
        RefineParams p;
        p.kprime = kprime;
        p.k = k;
        p.eps = eps;
        const double lg = std::log2(kprime / eps);
        const double k13 = std::cbrt(static_cast<double>(k));
        p.beta = std::max(c_size, k);
        p.m = std::max(1, static_cast<int>(std::ceil(s.c_m * p.beta / (k13 * k13) - 1e-9)));
        p.gamma = std::max(1, static_cast<int>(std::ceil(s.c_gamma * k13 - 1e-9)));
        p.ell = std::max(p.gamma, static_cast<int>(std::ceil(s.c_ell * k13 * k13 - 1e-9)));
        p.kappa = s.refine_kappa > 0 ? s.refine_kappa : std::max(5, static_cast<int>(std::ceil(10.0 * lg)));
        p.delta_exp = s.refine_delta;
        p.outer_reps = s.refine_outer_reps;
        p.variance_threshold = s.variance_factor * eps * eps / (static_cast<double>(k) * k);
        p.ell_prime = (static_cast<int>(std::ceil(std::log2(std::max(kprime, 2)))) + 2) * p.ell;
        p.family_cap = s.family_cap;
        p.ninf_accuracy = s.ninf_accuracy;
        p.backend = s.refine_backend;
        p.validate();
        return p;
    }

    void validate() const {
        if (gamma > ell) throw DomainError("refine level gamma exceeds ell");
        if (kappa < 5) throw DomainError("refine kappa must be at least 5");
        if (m < 0 || outer_reps < 1) throw DomainError("bad refine repetition counts");
    }

    SharpNoiseParams noise(CoordSet V) const { return SharpNoiseParams::make(ell, kappa, delta_exp, V); }
};

struct RefinePair {
    CoordSet C;  // C'
    CoordSet I;

    friend auto operator<=>(const RefinePair&, const RefinePair&) = default;
};

struct RefineLogRecord {
    int level = 0;
    int rep = 0;
    int pass = 0;
    CoordSet C;
    CoordSet I;
    CoordSet Cprime;
    double variance = 0.0;
    CoordSet T;
    std::string exit;  // "", "variance", "contained", "empty"
    int irrelevant_added = -1;
};

inline void write_jsonl(std::ostream& os, const std::vector<RefineLogRecord>& log) {
    for (const auto& r : log) {
        nlohmann::json j = {{"level", r.level},
                            {"rep", r.rep},
                            {"pass", r.pass},
                            {"C", r.C.bits},
                            {"I", r.I.bits},
                            {"Cprime", r.Cprime.bits},
                            {"Cprime_size", r.Cprime.size()},
                            {"variance", r.variance},
                            {"T", r.T.bits},
                            {"exit", r.exit}};
        if (r.irrelevant_added >= 0) j["irrelevant_added"] = r.irrelevant_added;
        os << j.dump() << '\n';
    }
}

struct RefineResult {
    std::vector<RefinePair> pairs;  // sorted, deduplicated
    std::vector<RefineLogRecord> log;
};

namespace detail {

inline CoordSet draw_guesses(CoordSet C, int m, Rng& rng) {
    const auto elems = C.elements();
    CoordSet I;
    if (elems.empty()) return I;
    for (int j = 0; j < m; ++j) I.bits |= 1u << elems[uniform_int(0, static_cast<int>(elems.size()) - 1, rng)];
    return I;
}

// One repetition on an exact spectrum (the spectrum of f_ave^I is obtained by
// zeroing coefficients that meet I).
inline RefinePair refine_rep_exact(const FourierSpectrum& s, CoordSet C, const RefineParams& p, Rng& rng,
                                   std::vector<RefineLogRecord>& log, std::optional<CoordSet> R) {
    const int n = s.n;
    const CoordSet I = draw_guesses(C, p.m, rng);
    FourierSpectrum fI = s;
    for (std::size_t S = 0; S < fI.coeffs.size(); ++S)
        if (S & I.bits) fI.coeffs[S] = 0.0;
    std::vector<double> lam;
    CoordSet Cp;
    for (int pass = 0;; ++pass) {
        if (pass > C.size() + 1) throw InvariantViolation("refine loop did not terminate");
        const CoordSet V = C - Cp;
        const auto np = p.noise(V);
        lam.assign(static_cast<std::size_t>(n) + 1, 0.0);
        for (int c = 0; c <= n; ++c) lam[c] = lambda(c, np);
        FourierSpectrum h = fI;
        double var = 0.0;
        for (std::size_t S = 0; S < h.coeffs.size(); ++S) {
            h.coeffs[S] *= 1.0 - lam[std::popcount(static_cast<std::uint32_t>(S) & V.bits)];
            var += h.coeffs[S] * h.coeffs[S];
        }
        RefineLogRecord rec{0, 0, pass, C, I, Cp, var, CoordSet{}, "", -1};
        if (var <= p.variance_threshold) {
            rec.exit = "variance";
            log.push_back(rec);
            break;
        }
        CoordSet T;
        try {
            T = level_table_exact(h, std::min(p.gamma, n)).sample(rng);
        } catch (const EmptyDistributionError&) {
            rec.exit = "empty";
            log.push_back(rec);
            break;
        }
        rec.T = T;
        const CoordSet add = T & C;
        if (R) rec.irrelevant_added = (add - Cp - *R).size();
        if (add.subset_of(Cp)) {
            rec.exit = "contained";
            log.push_back(rec);
            break;
        }
        log.push_back(rec);
        Cp = Cp | add;
    }
    return {Cp, I};
}

inline RefinePair refine_rep_sampled(OraclePtr o, CoordSet C, const RefineParams& p, Rng& rng,
                                     std::vector<RefineLogRecord>& log, std::optional<CoordSet> R) {
    const CoordSet I = draw_guesses(C, p.m, rng);
    auto fI = averaged_oracle(o, I);
    CoordSet Cp;
    for (int pass = 0;; ++pass) {
        if (pass > C.size() + 1) throw InvariantViolation("refine loop did not terminate");
        auto h = h_oracle(fI, p.noise(C - Cp));
        const double var = estimate_l2(*h, std::max(p.variance_threshold / 10.0, 1e-12), std::ldexp(1.0, -20), rng);
        RefineLogRecord rec{0, 0, pass, C, I, Cp, var, CoordSet{}, "", -1};
        if (var <= p.variance_threshold) {
            rec.exit = "variance";
            log.push_back(rec);
            break;
        }
        CoordSet T;
        try {
            T = sample_level_set(h, std::min(p.gamma, o->arity()), p.ninf_accuracy, rng).set;
        } catch (const EmptyDistributionError&) {
            rec.exit = "empty";
            log.push_back(rec);
            break;
        }
        rec.T = T;
        const CoordSet add = T & C;
        if (R) rec.irrelevant_added = (add - Cp - *R).size();
        if (add.subset_of(Cp)) {
            rec.exit = "contained";
            log.push_back(rec);
            break;
        }
        log.push_back(rec);
        Cp = Cp | add;
    }
    return {Cp, I};
}

template <class Rep>
RefineResult run_reps(int reps, Rng& rng, Rep&& rep) {
    const std::uint64_t seed = rng();
    std::vector<RefinePair> out(reps);
    std::vector<std::vector<RefineLogRecord>> logs(reps);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t i) {
        Rng r = make_rng(seed, i);
        out[i] = rep(r, logs[i]);
        for (auto& rec : logs[i]) rec.rep = static_cast<int>(i);
    });
    RefineResult res;
    std::set<RefinePair> uniq(out.begin(), out.end());
    res.pairs.assign(uniq.begin(), uniq.end());
    for (auto& l : logs) res.log.insert(res.log.end(), l.begin(), l.end());
    return res;
}

}  // namespace detail

// Refine-Coordinates on an exact spectrum: every E[h^2] and normalized
// influence is computed exactly (the idealized backend).
inline RefineResult refine_coordinates(const FourierSpectrum& s, CoordSet C, const RefineParams& p, Rng& rng,
                                       std::optional<CoordSet> R = {}) {
    if (!C.subset_of(CoordSet::full(s.n))) throw DomainError("C outside the domain");
    return detail::run_reps(p.outer_reps, rng, [&](Rng& r, std::vector<RefineLogRecord>& log) {
        return detail::refine_rep_exact(s, C, p, r, log, R);
    });
}

inline RefineResult refine_coordinates(OraclePtr o, CoordSet C, const RefineParams& p, Rng& rng,
                                       std::optional<CoordSet> R = {}) {
    if (!C.subset_of(CoordSet::full(o->arity()))) throw DomainError("C outside the domain");
    if (p.backend == RefineBackend::idealized) return refine_coordinates(wht(o->represented()), C, p, rng, R);
    return detail::run_reps(p.outer_reps, rng, [&](Rng& r, std::vector<RefineLogRecord>& log) {
        return detail::refine_rep_sampled(o, C, p, r, log, R);
    });
}

struct FindResult {
    std::vector<RefinePair> pairs;               // union over all levels
    std::vector<std::vector<RefinePair>> levels;  // levels[0] is the seed {([k'], {})}
    std::vector<RefineLogRecord> log;
};

// g = T_{1 - 1/(2k)} f, then ceil(log2 k') + 1 rounds of refinement starting
// from ([k'], {}), accumulating I across rounds.
inline FindResult find_high_level_coordinates(OraclePtr f, int k, double eps, const ParamSchedule& sched, Rng& rng,
                                              std::optional<CoordSet> R = {}) {
    const int kp = f->arity();
    if (k < 1 || k > kp) throw DomainError("k must lie in [1, k']");
    auto g = noisy_oracle(f, 1.0 - 1.0 / (2.0 * k), CoordSet::full(kp));
    std::optional<FourierSpectrum> gs;
    if (sched.refine_backend == RefineBackend::idealized) gs = wht(g->represented());

    FindResult res;
    std::set<RefinePair> all;
    std::vector<RefinePair> prev{{CoordSet::full(kp), CoordSet{}}};
    res.levels.push_back(prev);
    all.insert(prev.begin(), prev.end());
    const int rounds = static_cast<int>(std::ceil(std::log2(std::max(kp, 2)))) + 1;
    for (int level = 0; level < rounds; ++level) {
        std::set<RefinePair> next;
        for (const auto& [C, I] : prev) {
            const auto p = RefineParams::make(sched, kp, k, eps, C.size());
            RefineResult r;
            if (gs) {
                FourierSpectrum avg = *gs;
                for (std::size_t S = 0; S < avg.coeffs.size(); ++S)
                    if (S & I.bits) avg.coeffs[S] = 0.0;
                r = refine_coordinates(avg, C, p, rng, R);
            } else {
                r = refine_coordinates(averaged_oracle(g, I), C, p, rng, R);
            }
            for (auto& rec : r.log) {
                rec.level = level;
                rec.I = rec.I | I;
                res.log.push_back(rec);
            }
            for (const auto& q : r.pairs) next.insert({q.C, q.I | I});
        }
        if (static_cast<int>(next.size()) > sched.family_cap)
            throw CapacityError("family cap exceeded at level " + std::to_string(level) + " (" +
                                std::to_string(next.size()) + " pairs)");
        prev.assign(next.begin(), next.end());
        res.levels.push_back(prev);
        all.insert(next.begin(), next.end());
    }
    res.pairs.assign(all.begin(), all.end());
    return res;
}

struct PairCheck {
    bool guesses_irrelevant = false;  // I inside the complement of R
    bool pure = false;                // C' inside R
    bool low_residual = false;
    double residual = 0.0;            // sum over |S \ C'| >= ell', |S| <= k of f_ave^I(S)^2

    explicit operator bool() const { return guesses_irrelevant && pure && low_residual; }
};

inline PairCheck check_pair_conditions(const FourierSpectrum& s, const RefinePair& pair, CoordSet R, int k, double eps,
                                       int ell_prime) {
    PairCheck c;
    c.guesses_irrelevant = !pair.I.intersects(R);
    c.pure = pair.C.subset_of(R);
    for (std::size_t S = 0; S < s.coeffs.size(); ++S) {
        const auto set = static_cast<std::uint32_t>(S);
        if (set & pair.I.bits) continue;
        if (std::popcount(set) > k) continue;
        if (std::popcount(set & ~pair.C.bits) < ell_prime) continue;
        c.residual += s.coeffs[S] * s.coeffs[S];
    }
    c.low_residual = c.residual <= eps * eps / 100.0;
    return c;
}

}  // namespace junta
