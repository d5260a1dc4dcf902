#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "junta/conjlearn.hpp"
#include "junta/io.hpp"
#include "junta/ninf.hpp"
#include "junta/reference.hpp"
#include "junta/refine.hpp"
#include "junta/tester.hpp"

namespace junta {

struct InstanceSpec {
    std::string kind = "junta";  // junta | character | random | constant | conjunction | file
    int n = 8;
    int k = 3;
    double eta = 0.0;
    int size = 4;          // conjunction size
    double eps = 0.2;
    std::string marginal = "uniform";  // uniform | product
    double bias = 0.5;     // product marginal: Pr[x_i = -1]
    double positive_rate = -1.0;  // uniform marginal mixed with satisfying points when >= 0
    std::string input;     // truth-table path for kind=file
    int u = 2;             // |U| for the ninf task
};

struct ExperimentConfig {
    std::string task;
    std::uint64_t seed = 1;
    int runs = 1;
    InstanceSpec inst;
    ParamSchedule sched = ParamSchedule::desk();
    double tolerance = -1.0;  // default: eps
    double success_fraction = 2.0 / 3.0;
    std::size_t samples = 1000;   // gen: dataset rows
    std::size_t holdout = 20000;  // learn-conj: evaluation rows
    double delta = 0.1;           // ninf confidence
    bool budget = true;           // wrap tester runs in the abort budget

    double tol() const { return tolerance >= 0.0 ? tolerance : inst.eps; }

    void set(const std::string& key, const std::string& value) {
        auto as_int = [&](int lo) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(value, &used);
            } catch (const std::logic_error&) {
                throw ConfigError("bad value for " + key + ": " + value);
            }
            if (used != value.size() || v < lo) throw ConfigError("bad value for " + key + ": " + value);
            return v;
        };
        auto as_double = [&]() {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(value, &used);
            } catch (const std::logic_error&) {
                throw ConfigError("bad value for " + key + ": " + value);
            }
            if (used != value.size()) throw ConfigError("bad value for " + key + ": " + value);
            return v;
        };
        if (key == "kind") {
            static const std::vector<std::string> kinds = {"junta", "character", "random", "constant", "conjunction", "file"};
            if (std::find(kinds.begin(), kinds.end(), value) == kinds.end()) throw ConfigError("unknown instance kind: " + value);
            inst.kind = value;
        } else if (key == "n") {
            inst.n = as_int(1);
            if (inst.n > kMaxArity) throw ConfigError("n above " + std::to_string(kMaxArity));
        } else if (key == "k") {
            inst.k = as_int(0);
        } else if (key == "eta") {
            inst.eta = as_double();
            if (!(inst.eta >= 0.0 && inst.eta <= 0.5)) throw ConfigError("eta outside [0, 1/2]");
        } else if (key == "size") {
            inst.size = as_int(0);
        } else if (key == "eps") {
            inst.eps = as_double();
            if (!(inst.eps > 0.0 && inst.eps < 1.0)) throw ConfigError("eps outside (0, 1)");
        } else if (key == "marginal") {
            if (value != "uniform" && value != "product") throw ConfigError("marginal must be uniform or product");
            inst.marginal = value;
        } else if (key == "bias") {
            inst.bias = as_double();
        } else if (key == "positive_rate") {
            inst.positive_rate = as_double();
        } else if (key == "input") {
            inst.input = value;
        } else if (key == "u") {
            inst.u = as_int(0);
        } else if (key == "seed") {
            try {
                std::size_t used = 0;
                seed = std::stoull(value, &used);
                if (used != value.size()) throw ConfigError("bad seed: " + value);
            } catch (const std::logic_error&) {
                throw ConfigError("bad seed: " + value);
            }
        } else if (key == "runs") {
            runs = as_int(1);
        } else if (key == "tolerance") {
            tolerance = as_double();
        } else if (key == "success_fraction") {
            success_fraction = as_double();
        } else if (key == "samples") {
            samples = static_cast<std::size_t>(as_int(1));
        } else if (key == "holdout") {
            holdout = static_cast<std::size_t>(as_int(1));
        } else if (key == "delta") {
            delta = as_double();
        } else if (key == "budget") {
            if (value != "true" && value != "false") throw ConfigError("budget must be true or false");
            budget = value == "true";
        } else {
            sched.set(key, value);
        }
    }
};

// A config file is either a JSON object or "key = value" lines ('#' starts a
// comment).
inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad JSON config: ") + e.what());
        }
        for (const auto& [k, v] : j.items()) {
            if (v.is_string())
                out.emplace_back(k, v.get<std::string>());
            else if (v.is_boolean() || v.is_number())
                out.emplace_back(k, v.dump());
            else
                throw ConfigError("config value for " + k + " must be a scalar");
        }
        return out;
    }
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + " has no '='");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

inline std::pair<std::string, std::string> parse_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + kv);
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

// ---------------------------------------------------------------------------
// instances

struct FunctionInstance {
    BooleanFunction f;
    CoordSet relevant;
    std::size_t flips = 0;
};

inline BooleanFunction read_truth_table(const std::filesystem::path& path) {
    const auto data = read_file(path);
    if (data.rfind("BFN1", 0) == 0) return truth_table_from_bfn1(data);
    try {
        return truth_table_from_json(nlohmann::json::parse(data));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("unreadable truth table: ") + e.what());
    }
}

inline FunctionInstance make_function(const InstanceSpec& s, Rng& rng) {
    FunctionInstance out;
    const int n = s.n;
    if (s.kind == "junta") {
        if (s.k < 0 || s.k > n) throw ConfigError("junta size outside [0, n]");
        std::vector<int> c(n);
        for (int i = 0; i < n; ++i) c[i] = i;
        std::shuffle(c.begin(), c.end(), rng);
        std::vector<int> coords(c.begin(), c.begin() + s.k);
        std::sort(coords.begin(), coords.end());
        for (int i : coords) out.relevant.bits |= 1u << i;
        const auto base = BooleanFunction::random_sign(s.k, rng);
        std::vector<double> v(std::size_t{1} << n);
        for (Point x = 0; x < v.size(); ++x) {
            Point y = 0;
            for (std::size_t j = 0; j < coords.size(); ++j) y |= ((x >> coords[j]) & 1u) << j;
            v[x] = base(y);
            if (uniform01(rng) < s.eta) {
                v[x] = -v[x];
                ++out.flips;
            }
        }
        out.f = BooleanFunction(n, std::move(v));
    } else if (s.kind == "character") {
        if (s.k + 1 > n) throw ConfigError("character instance needs k + 1 <= n");
        out.relevant = CoordSet::full(s.k + 1);
        out.f = BooleanFunction::character(n, out.relevant);
    } else if (s.kind == "random") {
        out.f = BooleanFunction::random_sign(n, rng);
        out.relevant = CoordSet::full(n);
    } else if (s.kind == "constant") {
        out.f = BooleanFunction::constant(n, 1.0);
    } else if (s.kind == "file") {
        if (s.input.empty()) throw ConfigError("kind=file needs input=<path>");
        out.f = read_truth_table(s.input);
        out.relevant = CoordSet::full(out.f.arity());
    } else {
        throw ConfigError("instance kind " + s.kind + " is not a function");
    }
    return out;
}

struct ConjunctionInstance {
    Conjunction target;
    Sampler sampler;
};

inline ConjunctionInstance make_conjunction(const InstanceSpec& s, Rng& rng) {
    if (s.kind != "conjunction") throw ConfigError("this task needs kind=conjunction");
    if (s.size > s.n) throw ConfigError("conjunction size above n");
    ConjunctionInstance c;
    c.target = random_conjunction(s.n, s.size, rng);
    if (s.marginal == "product")
        c.sampler = product_sampler(s.n, c.target, s.eta, s.bias);
    else if (s.positive_rate >= 0.0)
        c.sampler = planted_sampler(s.n, c.target, s.eta, s.positive_rate);
    else
        c.sampler = planted_sampler(s.n, c.target, s.eta);
    return c;
}

// ---------------------------------------------------------------------------
// tasks

struct TaskOutcome {
    std::vector<nlohmann::json> records;      // one per seed
    std::vector<double> runtimes;             // seconds, per seed
    std::map<std::string, std::string> files;  // relative path -> content
    bool ok = true;
    std::string diff;  // failing seeds, when not ok
};

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string summary_csv(const std::string& task, const std::vector<nlohmann::json>& records, double required) {
    std::size_t ok = 0;
    double err = 0.0, err2 = 0.0, exact = 0.0, est = 0.0, queries = 0.0;
    std::size_t with_err = 0, with_q = 0;
    for (const auto& r : records) {
        ok += r.value("success", false);
        if (r.contains("abs_error")) {
            const double e = r["abs_error"];
            err += e;
            err2 += e * e;
            ++with_err;
        }
        if (r.contains("exact")) exact += r["exact"].get<double>();
        if (r.contains("estimate")) est += r["estimate"].get<double>();
        if (r.contains("query_count")) {
            queries += r["query_count"].get<double>();
            ++with_q;
        }
    }
    const double m = records.empty() ? 1.0 : static_cast<double>(records.size());
    const double mean_err = with_err ? err / with_err : 0.0;
    const double sd = with_err > 1 ? std::sqrt(std::max(0.0, (err2 - with_err * mean_err * mean_err) / (with_err - 1))) : 0.0;
    const double frac = records.empty() ? 0.0 : ok / m;
    std::string out =
        "task,runs,successes,success_fraction,required_fraction,mean_abs_error,stddev_abs_error,mean_exact,mean_estimate,"
        "mean_queries,pass\n";
    out += task + "," + std::to_string(records.size()) + "," + std::to_string(ok) + "," + fmt(frac) + "," + fmt(required) +
           "," + fmt(mean_err) + "," + fmt(sd) + "," + fmt(exact / m) + "," + fmt(est / m) + "," +
           fmt(with_q ? queries / with_q : 0.0) + "," + (frac >= required - 1e-12 ? "1" : "0") + "\n";
    return out;
}

namespace detail {

template <class Body>
TaskOutcome run_seeds(const ExperimentConfig& cfg, Body&& body) {
    TaskOutcome out;
    for (int i = 0; i < cfg.runs; ++i) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
        Rng rng = make_rng(seed);
        const auto t0 = std::chrono::steady_clock::now();
        nlohmann::json rec = body(seed, rng, out);
        out.runtimes.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        rec["seed"] = seed;
        out.records.push_back(std::move(rec));
    }
    std::size_t good = 0;
    for (const auto& r : out.records) good += r.value("success", false);
    const double frac = out.records.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(out.records.size());
    out.ok = frac >= cfg.success_fraction - 1e-12;
    if (!out.ok) {
        out.diff = "success fraction " + fmt(frac) + " below required " + fmt(cfg.success_fraction) + "; failing seeds:";
        for (const auto& r : out.records)
            if (!r.value("success", false)) out.diff += " " + std::to_string(r["seed"].get<std::uint64_t>());
    }
    return out;
}

inline std::string seed_name(const std::string& stem, std::uint64_t seed, const std::string& ext) {
    return stem + "_seed" + std::to_string(seed) + ext;
}

}  // namespace detail

inline TaskOutcome task_gen(const ExperimentConfig& cfg) {
    return detail::run_seeds(cfg, [&](std::uint64_t seed, Rng& rng, TaskOutcome& out) {
        nlohmann::json rec = {{"kind", cfg.inst.kind}, {"n", cfg.inst.n}, {"eta", cfg.inst.eta}};
        if (cfg.inst.kind == "conjunction") {
            auto c = make_conjunction(cfg.inst, rng);
            const auto data = c.sampler.take(cfg.samples, rng);
            out.files[detail::seed_name("dataset", seed, ".csv")] = dataset_csv(data);
            out.files[detail::seed_name("dataset", seed, ".csv.json")] = dataset_sidecar(data).dump() + "\n";
            std::size_t flipped = 0;
            for (std::size_t i = 0; i < data.size(); ++i) flipped += c.target(data.x[i]) != data.y[i];
            const double frac = static_cast<double>(flipped) / static_cast<double>(data.size());
            rec["target"] = c.target.str();
            rec["flip_fraction"] = frac;
            bool ok = std::abs(frac - cfg.inst.eta) <= 3.0 * std::sqrt(cfg.inst.eta * (1.0 - cfg.inst.eta) / data.size()) + 1e-12;
            if (cfg.inst.n <= 14) {
                const double opt = exact_opt_conjunction(data).error;
                rec["opt"] = opt;
                if (cfg.inst.eta == 0.0) ok = ok && opt == 0.0;
            }
            rec["success"] = ok;
            return rec;
        }
        auto inst = make_function(cfg.inst, rng);
        out.files[detail::seed_name("instance", seed, ".json")] = truth_table_json(inst.f).dump() + "\n";
        if (inst.f.sign_valued()) out.files[detail::seed_name("instance", seed, ".bfn")] = truth_table_bfn1(inst.f);
        rec["k"] = cfg.inst.k;
        rec["relevant"] = inst.relevant.str();
        bool ok = true;
        if (cfg.inst.kind == "junta") {
            const double frac = static_cast<double>(inst.flips) / static_cast<double>(inst.f.size());
            rec["flip_fraction"] = frac;
            ok = std::abs(frac - cfg.inst.eta) <= 3.0 * std::sqrt(cfg.inst.eta * (1.0 - cfg.inst.eta) / inst.f.size()) + 1e-12;
            if (inst.f.arity() <= 16) {
                const double d = exact_dist_junta(inst.f, cfg.inst.k);
                rec["exact_dist"] = d;
                if (cfg.inst.eta == 0.0) ok = ok && d == 0.0;
            }
        }
        rec["success"] = ok;
        return rec;
    });
}

inline TaskOutcome task_wht(const ExperimentConfig& cfg) {
    return detail::run_seeds(cfg, [&](std::uint64_t, Rng& rng, TaskOutcome&) {
        const auto f = cfg.inst.kind == "file" ? read_truth_table(cfg.inst.input) : BooleanFunction::random_bounded(cfg.inst.n, rng);
        const auto s = wht(f);
        const auto back = inverse_wht(s);
        double rt = 0.0, mass = 0.0, sq = 0.0;
        for (Point x = 0; x < f.size(); ++x) {
            rt = std::max(rt, std::abs(f(x) - back(x)));
            sq += f(x) * f(x);
        }
        for (double c : s.coeffs) mass += c * c;
        const double parseval = std::abs(mass - sq / static_cast<double>(f.size()));
        return nlohmann::json{{"n", f.arity()},
                              {"roundtrip_max_error", rt},
                              {"parseval_error", parseval},
                              {"abs_error", rt},
                              {"success", rt <= 1e-9 && parseval <= 1e-9}};
    });
}

inline TaskOutcome task_tester(const ExperimentConfig& cfg, bool quantum) {
    return detail::run_seeds(cfg, [&](std::uint64_t, Rng& rng, TaskOutcome&) {
        auto inst = make_function(cfg.inst, rng);
        const int n = inst.f.arity(), k = cfg.inst.k;
        const double eps = cfg.inst.eps;
        const auto exact = exact_junta_corr_k(inst.f, k);
        auto base = exact_oracle(inst.f);
        auto run = [&](OraclePtr o) {
            return quantum ? quantum_sim_tester(inst.f, k, eps, cfg.sched, rng, o)
                           : classical_tester(o, k, eps, CoordinateOracleSet::identity(n), cfg.sched, rng);
        };
        TesterReport rep;
        double budget = 0.0;
        if (cfg.budget) {
            budget = cfg.sched.budget_factor *
                     (quantum ? quantum_expected_queries(n, k, eps, cfg.sched) : classical_expected_queries(n, k, eps, cfg.sched));
            rep = run_with_budget(base, budget, run);
        } else {
            rep = run(base);
        }
        const double err = std::abs(rep.gamma - exact.corr);
        return nlohmann::json{{"kind", cfg.inst.kind},
                              {"n", n},
                              {"k", k},
                              {"eps", eps},
                              {"eta", cfg.inst.eta},
                              {"exact", exact.corr},
                              {"exact_set", exact.set.str()},
                              {"exact_dist", (1.0 - exact.corr) / 2.0},
                              {"estimate", rep.gamma},
                              {"dist", distance_estimate(rep)},
                              {"best_set", rep.best_set.str()},
                              {"abs_error", err},
                              {"query_count", rep.query_count},
                              {"spectral_samples", rep.spectral_samples},
                              {"budget", budget},
                              {"aborted", rep.aborted},
                              {"caps", rep.caps},
                              {"success", err <= cfg.tol()}};
    });
}

inline TaskOutcome task_learn(const ExperimentConfig& cfg) {
    if (cfg.inst.n > 14) throw ConfigError("learn-conj computes the exact optimum and needs n <= 14");
    return detail::run_seeds(cfg, [&](std::uint64_t seed, Rng& rng, TaskOutcome& out) {
        auto c = make_conjunction(cfg.inst, rng);
        const auto rep = agnostic_learn(c.sampler, cfg.inst.eps, cfg.sched, rng);
        const auto holdout = c.sampler.take(cfg.holdout, rng);
        const double err = empirical_error(holdout, rep.hypothesis);
        const auto opt = exact_opt_conjunction(holdout);
        out.files[detail::seed_name("hypothesis", seed, ".json")] = to_json(rep.hypothesis).dump() + "\n";
        return nlohmann::json{{"n", cfg.inst.n},
                              {"size", cfg.inst.size},
                              {"eta", cfg.inst.eta},
                              {"eps", cfg.inst.eps},
                              {"target", c.target.str()},
                              {"exact", opt.error},
                              {"opt_conjunction", opt.conjunction.str()},
                              {"estimate", err},
                              {"err_minus_opt", err - opt.error},
                              {"abs_error", std::abs(err - opt.error)},
                              {"winner", rep.winner},
                              {"candidates", rep.selection_errors.size()},
                              {"positive_rounds", rep.positive_rounds},
                              {"fitted_rounds", rep.fitted_rounds},
                              {"query_count", rep.draws_used},
                              {"success", err <= opt.error + cfg.tol()}};
    });
}

inline TaskOutcome task_ninf(const ExperimentConfig& cfg) {
    return detail::run_seeds(cfg, [&](std::uint64_t, Rng& rng, TaskOutcome&) {
        InstanceSpec s = cfg.inst;
        if (s.kind == "conjunction") throw ConfigError("ninf needs a function instance");
        auto inst = make_function(s, rng);
        const int n = inst.f.arity();
        if (cfg.inst.u > n) throw ConfigError("u above n");
        std::vector<int> c(n);
        for (int i = 0; i < n; ++i) c[i] = i;
        std::shuffle(c.begin(), c.end(), rng);
        CoordSet U;
        for (int j = 0; j < cfg.inst.u; ++j) U.bits |= 1u << c[j];
        const auto p = NinfEstimateParams::make(inst.f.bound(), cfg.inst.eps, cfg.delta, U.size(), cfg.sched.regime);
        auto o = exact_oracle(inst.f);
        const double est = estimate_ninf(o, U, p, rng);
        const double exact = norm_inf_exact(wht(inst.f), U);
        return nlohmann::json{{"n", n},
                              {"U", U.str()},
                              {"exact", exact},
                              {"estimate", est},
                              {"abs_error", std::abs(est - exact)},
                              {"trials", p.M},
                              {"query_count", o->base_queries()},
                              {"success", std::abs(est - exact) <= cfg.tol()}};
    });
}

inline TaskOutcome task_refine(const ExperimentConfig& cfg) {
    return detail::run_seeds(cfg, [&](std::uint64_t seed, Rng& rng, TaskOutcome& out) {
        auto inst = make_function(cfg.inst, rng);
        const int n = inst.f.arity(), k = cfg.inst.k;
        const double eps = cfg.inst.eps;
        const auto found = find_high_level_coordinates(exact_oracle(inst.f), k, eps, cfg.sched, rng, inst.relevant);
        const auto gs = wht(noise_operator(inst.f, 1.0 - 1.0 / (2.0 * k), CoordSet::full(n)));
        const int ell_prime = RefineParams::make(cfg.sched, n, k, eps, n).ell_prime;
        std::size_t passing = 0;
        nlohmann::json good = nlohmann::json::array();
        for (const auto& q : found.pairs)
            if (check_pair_conditions(gs, q, inst.relevant, k, eps, ell_prime)) {
                ++passing;
                if (good.size() < 10) good.push_back({{"C", q.C.str()}, {"I", q.I.str()}});
            }
        std::ostringstream log;
        write_jsonl(log, found.log);
        out.files[detail::seed_name("refine_log", seed, ".jsonl")] = log.str();
        return nlohmann::json{{"n", n},
                              {"k", k},
                              {"eps", eps},
                              {"relevant", inst.relevant.str()},
                              {"pairs", found.pairs.size()},
                              {"passing_pairs", passing},
                              {"passing_examples", good},
                              {"ell_prime", ell_prime},
                              {"success", passing > 0}};
    });
}

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> t = {"gen", "wht", "test-junta-quantum-sim", "test-junta-classical",
                                               "learn-conj", "ninf", "refine", "report"};
    return t;
}

inline TaskOutcome run_task(const ExperimentConfig& cfg) {
    if (cfg.task == "gen") return task_gen(cfg);
    if (cfg.task == "wht") return task_wht(cfg);
    if (cfg.task == "test-junta-quantum-sim") return task_tester(cfg, true);
    if (cfg.task == "test-junta-classical") return task_tester(cfg, false);
    if (cfg.task == "learn-conj") return task_learn(cfg);
    if (cfg.task == "ninf") return task_ninf(cfg);
    if (cfg.task == "refine") return task_refine(cfg);
    throw ConfigError("unknown task: " + cfg.task);
}

// Outputs of a run: <task>.jsonl, <task>_summary.csv, <task>_timing.csv and
// any per-seed files. Everything but the timing file is a pure function of
// the config.
inline void write_outcome(const std::filesystem::path& dir, const ExperimentConfig& cfg, const TaskOutcome& o) {
    std::string jsonl;
    for (const auto& r : o.records) jsonl += r.dump() + "\n";
    for (const auto& [name, content] : o.files) write_file_atomic(dir / name, content);
    write_file_atomic(dir / (cfg.task + ".jsonl"), jsonl);
    nlohmann::json meta = {{"task", cfg.task}, {"seed", cfg.seed}, {"runs", cfg.runs},
                           {"required_fraction", cfg.success_fraction}, {"schedule", cfg.sched.values()}};
    write_file_atomic(dir / (cfg.task + "_config.json"), meta.dump(2) + "\n");
    write_file_atomic(dir / (cfg.task + "_summary.csv"), summary_csv(cfg.task, o.records, cfg.success_fraction));
    std::string timing = "seed,runtime_s\n";
    for (std::size_t i = 0; i < o.runtimes.size(); ++i)
        timing += std::to_string(o.records[i]["seed"].get<std::uint64_t>()) + "," + fmt(o.runtimes[i]) + "\n";
    write_file_atomic(dir / (cfg.task + "_timing.csv"), timing);
}

// Collects every <task>.jsonl in dir into one summary table.
struct ReportResult {
    std::string csv;
    bool ok = true;
    std::size_t tasks = 0;
};

inline ReportResult build_report(const std::filesystem::path& dir) {
    ReportResult r;
    std::string body;
    for (const auto& task : task_names()) {
        const auto path = dir / (task + ".jsonl");
        if (!std::filesystem::exists(path)) continue;
        std::vector<nlohmann::json> records;
        std::istringstream is(read_file(path));
        std::string line;
        while (std::getline(is, line))
            if (!line.empty()) records.push_back(nlohmann::json::parse(line));
        double required = 2.0 / 3.0;
        const auto meta = dir / (task + "_config.json");
        if (std::filesystem::exists(meta)) required = nlohmann::json::parse(read_file(meta)).value("required_fraction", required);
        const auto csv = summary_csv(task, records, required);
        const auto row = csv.substr(csv.find('\n') + 1);
        if (r.tasks == 0) r.csv = csv.substr(0, csv.find('\n') + 1);
        body += row;
        r.ok = r.ok && row.size() >= 2 && row[row.size() - 2] == '1';
        ++r.tasks;
    }
    if (r.tasks == 0) r.ok = false;
    r.csv += body;
    return r;
}

}  // namespace junta
