#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <variant>

#include "junta/oracle.hpp"

namespace junta {

enum class RefineBackend { idealized, sampled };

// Every tunable of the testers and the learner. Zero in an "auto" field means
// the value is derived from (k', k, eps) when a run starts.
struct ParamSchedule {
    Regime regime = Regime::desk;

    // local estimation inside the testers
    int ell = 0;        // auto: ceil(k^{2/3})
    int kappa = 5;
    int delta_exp = 1;
    int L = 0;          // auto: min(kappa ell, k' - k)
    double tau_factor = 0.1;  // tau = tau_factor * eps
    double c_r = 1.0;
    int N = 256;        // bundles per candidate C
    int replicas = 0;   // auto: sum alpha^2 / (2^{k'-k} eps^2)
    int max_replicas = 4096;

    // quantum-sim tester
    int ref_samples_cap = 100000;
    int outer_reps = 12;
    int c_samples = 0;  // auto: ceil(k^{1/3})
    double freq_test_factor = 0.1;

    // direct correlation estimate
    double direct_eps_factor = 0.05;  // eps / 20
    double direct_delta = 1e-3;

    // refine / find-high-level-coordinates
    RefineBackend refine_backend = RefineBackend::idealized;
    double c_m = 0.5;
    double c_gamma = 0.5;
    double c_ell = 0.5;
    int refine_kappa = 0;  // auto: ceil(10 log2(k'/eps))
    int refine_delta = 10;
    int refine_outer_reps = 200;
    int family_cap = 5000;
    double variance_factor = 1.0;  // threshold = variance_factor * eps^2 / k^2
    double ninf_accuracy = 0.02;

    // agnostic learner
    int learn_rounds = 500;
    int learn_degree = 0;   // auto: ceil(c_d n^{1/3} log2(1/eps))
    double c_d = 0.25;
    int learn_N = 0;        // auto: min(50 * features, learn_N_cap)
    int learn_N_cap = 4000;
    double draw_factor = 4.0;  // draws = ceil(draw_factor / eps * N)
    int selection_samples = 0;  // auto: ceil(4 (n/eps)^2), at least 4000

    // abort wrapper
    double budget_factor = 4.0;

    static ParamSchedule desk() { return {}; }

    // Asymptotic settings as written; only sensible at toy sizes.
    static ParamSchedule paper(int kprime, int k, double eps) {
        ParamSchedule s;
        s.regime = Regime::paper;
        const double lg = std::log2(kprime / eps);
        s.ell = static_cast<int>(std::ceil(std::pow(k, 2.0 / 3.0)));
        s.kappa = std::max(5, static_cast<int>(std::ceil(10.0 * lg)));
        s.N = 0;
        s.replicas = 1;
        s.ref_samples_cap = static_cast<int>(std::min(1e9, std::pow(kprime / eps, 4)));
        s.outer_reps = static_cast<int>(std::min(1e9, std::pow(1.0 / eps, std::cbrt(k))));
        s.c_m = 10.0 * std::pow(lg, 4);
        s.c_gamma = std::pow(lg, 3);
        s.c_ell = std::pow(lg, 3);
        s.refine_outer_reps = static_cast<int>(std::min(1e9, std::exp(std::cbrt(k) * std::pow(lg, 5))));
        s.learn_rounds = 0;
        return s;
    }

    using Field = std::variant<int ParamSchedule::*, double ParamSchedule::*>;

    static const std::map<std::string, Field>& fields() {
        static const std::map<std::string, Field> f = {
            {"ell", &ParamSchedule::ell},
            {"kappa", &ParamSchedule::kappa},
            {"delta_exp", &ParamSchedule::delta_exp},
            {"L", &ParamSchedule::L},
            {"tau_factor", &ParamSchedule::tau_factor},
            {"c_r", &ParamSchedule::c_r},
            {"N", &ParamSchedule::N},
            {"replicas", &ParamSchedule::replicas},
            {"max_replicas", &ParamSchedule::max_replicas},
            {"ref_samples_cap", &ParamSchedule::ref_samples_cap},
            {"outer_reps", &ParamSchedule::outer_reps},
            {"c_samples", &ParamSchedule::c_samples},
            {"freq_test_factor", &ParamSchedule::freq_test_factor},
            {"direct_eps_factor", &ParamSchedule::direct_eps_factor},
            {"direct_delta", &ParamSchedule::direct_delta},
            {"c_m", &ParamSchedule::c_m},
            {"c_gamma", &ParamSchedule::c_gamma},
            {"c_ell", &ParamSchedule::c_ell},
            {"refine_kappa", &ParamSchedule::refine_kappa},
            {"refine_delta", &ParamSchedule::refine_delta},
            {"refine_outer_reps", &ParamSchedule::refine_outer_reps},
            {"family_cap", &ParamSchedule::family_cap},
            {"variance_factor", &ParamSchedule::variance_factor},
            {"ninf_accuracy", &ParamSchedule::ninf_accuracy},
            {"learn_rounds", &ParamSchedule::learn_rounds},
            {"learn_degree", &ParamSchedule::learn_degree},
            {"c_d", &ParamSchedule::c_d},
            {"learn_N", &ParamSchedule::learn_N},
            {"learn_N_cap", &ParamSchedule::learn_N_cap},
            {"draw_factor", &ParamSchedule::draw_factor},
            {"selection_samples", &ParamSchedule::selection_samples},
            {"budget_factor", &ParamSchedule::budget_factor},
        };
        return f;
    }

    void set(const std::string& key, const std::string& value) {
        if (key == "regime") {
            if (value == "desk") regime = Regime::desk;
            else if (value == "paper") regime = Regime::paper;
            else throw ConfigError("regime must be desk or paper");
            return;
        }
        if (key == "refine_backend") {
            if (value == "idealized") refine_backend = RefineBackend::idealized;
            else if (value == "sampled") refine_backend = RefineBackend::sampled;
            else throw ConfigError("refine_backend must be idealized or sampled");
            return;
        }
        auto it = fields().find(key);
        if (it == fields().end()) throw ConfigError("unknown schedule key: " + key);
        try {
            std::size_t used = 0;
            if (auto pi = std::get_if<int ParamSchedule::*>(&it->second)) {
                const int v = std::stoi(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                this->**pi = v;
            } else {
                const double v = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                this->*std::get<double ParamSchedule::*>(it->second) = v;
            }
        } catch (const std::logic_error&) {
            throw ConfigError("bad value for " + key + ": " + value);
        }
    }

    bool has(const std::string& key) const { return key == "regime" || key == "refine_backend" || fields().count(key); }

    std::map<std::string, std::string> values() const {
        std::map<std::string, std::string> out;
        out["regime"] = regime == Regime::desk ? "desk" : "paper";
        out["refine_backend"] = refine_backend == RefineBackend::idealized ? "idealized" : "sampled";
        for (const auto& [name, f] : fields()) {
            if (auto pi = std::get_if<int ParamSchedule::*>(&f))
                out[name] = std::to_string(this->**pi);
            else {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", this->*std::get<double ParamSchedule::*>(f));
                out[name] = buf;
            }
        }
        return out;
    }

    // derived values
    int ell_for(int k) const { return ell > 0 ? ell : std::max(1, static_cast<int>(std::ceil(std::pow(k, 2.0 / 3.0) - 1e-9))); }
    int c_samples_for(int k) const {
        return c_samples > 0 ? c_samples : std::max(1, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(k)) - 1e-9)));
    }
    int L_for(int kprime, int k) const {
        if (L > 0) return L;
        return std::max(1, std::min(kappa * ell_for(k), kprime - k));
    }
};

}  // namespace junta
