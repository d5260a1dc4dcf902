#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "junta/experiment.hpp"

using namespace junta;

namespace {

enum Exit { kOk = 0, kTolerance = 1, kConfig = 2, kOther = 3 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"junta-lab: junta testing and conjunction learning experiments"};
    std::string task, config_path, out_dir = "out";
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
    app.add_option("task", task, "gen | wht | test-junta-quantum-sim | test-junta-classical | learn-conj | ninf | refine | report")
        ->required();
    app.add_option("--config", config_path, "JSON or key=value config file");
    auto* seed_opt = app.add_option("--seed", seed, "base seed; run i uses seed + i");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--override", overrides, "key=value, applied after the config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (task == "report") {
            const auto r = build_report(out_dir);
            write_file_atomic(std::filesystem::path(out_dir) / "report.csv", r.csv);
            std::cout << r.csv;
            if (r.tasks == 0) {
                std::cerr << "no task outputs in " << out_dir << "\n";
                return kConfig;
            }
            return r.ok ? kOk : kTolerance;
        }
        const auto& names = task_names();
        if (std::find(names.begin(), names.end(), task) == names.end()) throw ConfigError("unknown task: " + task);
        if (config_path.empty()) throw ConfigError("--config is required for " + task);

        ExperimentConfig cfg;
        cfg.task = task;
        for (const auto& [k, v] : parse_config_text(read_file(config_path))) cfg.set(k, v);
        for (const auto& o : overrides) {
            const auto [k, v] = parse_override(o);
            cfg.set(k, v);
        }
        if (*seed_opt) cfg.seed = seed;

        const auto outcome = run_task(cfg);
        write_outcome(out_dir, cfg, outcome);
        std::cout << summary_csv(task, outcome.records, cfg.success_fraction);
        if (!outcome.ok) {
            std::cerr << outcome.diff << "\n";
            return kTolerance;
        }
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
}
