#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relight/harness.hpp"

namespace {

relight::ExperimentConfig load_config(const std::string& path,
                                      std::optional<double> scale_override,
                                      std::optional<std::string> out_override) {
    auto cfg = relight::ExperimentConfig::load_file(path);
    if (scale_override) cfg.scale = *scale_override;
    if (out_override) cfg.out_dir = *out_override;
    if (const char* env = std::getenv("RELIGHT_SEED")) {
        char* end = nullptr;
        const unsigned long long seed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw std::invalid_argument(std::string("RELIGHT_SEED is not an integer: ") + env);
        cfg.seeds = {static_cast<std::uint64_t>(seed)};
    }
    cfg.validate();
    return cfg;
}

std::vector<int> parse_values(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size())
            throw std::invalid_argument("bad sweep value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("--values needs at least one integer");
    return out;
}

void print_summary(const std::vector<relight::RunResult>& results) {
    std::map<std::string, std::vector<const relight::MetricsRecord*>> by_controller;
    for (const auto& r : results) by_controller[r.metrics.controller].push_back(&r.metrics);

    std::printf("%-22s %6s %12s %12s %14s\n", "controller", "seeds", "avg_queue", "avg_delay",
                "avg_travel[s]");
    for (const auto& [name, rows] : by_controller) {
        double q = 0, d = 0, t = 0;
        for (const auto* m : rows) {
            q += m->avg_queue_length;
            d += m->avg_delay;
            t += m->avg_travel_time;
        }
        const double n = static_cast<double>(rows.size());
        std::printf("%-22s %6zu %12.3f %12.4f %14.2f\n", name.c_str(), rows.size(), q / n,
                    d / n, t / n);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ensemble double-Q traffic signal control testbed"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string param;
    std::string values_csv;
    double scale = 0.0;

    auto* run = app.add_subcommand("run", "Run the configured experiment over all seeds");
    run->add_option("--config", config_path, "experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    auto* scale_opt = run->add_option("--scale", scale, "horizon scale factor override");
    auto* out_opt = run->add_option("--out", out_dir, "output directory override");

    auto* sweep = app.add_subcommand("sweep", "Run the experiment across one agent parameter");
    sweep->add_option("--param", param, "parameter to sweep")
        ->required()
        ->check(CLI::IsMember({"utd", "n", "m"}));
    sweep->add_option("--values", values_csv, "comma-separated integer values")->required();
    sweep->add_option("--config", config_path, "experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);

    auto* presets = app.add_subcommand("presets", "List built-in demand presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            for (const auto& name : relight::flow_preset_names()) std::cout << name << "\n";
            return 0;
        }

        if (run->parsed()) {
            const auto cfg = load_config(
                config_path,
                scale_opt->count() ? std::optional<double>(scale) : std::nullopt,
                out_opt->count() ? std::optional<std::string>(out_dir) : std::nullopt);
            const auto results = relight::run_experiment(cfg);
            print_summary(results);
            std::cout << "wrote " << cfg.out_dir << "/metrics.csv and manifest.json\n";
            return 0;
        }

        relight::SweepSpec spec;
        spec.parameter = param;
        spec.values = parse_values(values_csv);
        spec.base = load_config(config_path, std::nullopt, std::nullopt);
        const auto results = relight::run_sweep(spec);
        print_summary(results);
        std::cout << "wrote " << spec.base.out_dir << "/metrics.csv, curves_" << param
                  << ".csv, curves_" << param << ".svg, manifest.json\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
