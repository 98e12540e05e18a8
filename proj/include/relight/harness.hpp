#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relight/agent.hpp"
#include "relight/baselines.hpp"
#include "relight/env.hpp"

namespace relight {

// Rolling window (in decisions) for queue-length learning curves.
constexpr int kCurveWindow = 40;

struct FlowSource {
    enum class Kind { Preset, File, ArrivalsCsv };
    Kind kind = Kind::Preset;
    std::string value = "equal";
};

struct ControllerSpec {
    std::string type = "relight";  // relight | fixed | sotl | single-dqn
    AgentConfig agent;             // relight family
    double fixed_green_we = 30.0;
    double fixed_green_ns = 30.0;
    SotlController::Params sotl;

    bool is_relight_family() const { return type == "relight" || type == "single-dqn"; }
    void validate() const;
};

struct ExperimentConfig {
    FlowSource flow;
    ControllerSpec controller;
    double horizon = 72000.0;  // s, before scaling
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    double scale = 0.05;
    std::string out_dir = "out";
    RewardWeights weights;
    SimConfig sim;
    bool eval_episode = false;

    double effective_horizon() const { return horizon * scale; }
    void validate() const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load_file(const std::string& path);
};

struct MetricsRecord {
    std::uint64_t seed = 0;
    std::string controller;
    double avg_queue_length = 0.0;
    double avg_delay = 0.0;
    double avg_travel_time = 0.0;  // s
    // Same metrics restricted to the final quarter of the horizon.
    double fq_avg_queue_length = 0.0;
    double fq_avg_delay = 0.0;
    double fq_avg_travel_time = 0.0;
};

struct RunResult {
    MetricsRecord metrics;
    std::vector<double> queued_per_decision;
    std::vector<double> queue_curve;  // rolling mean of the above
    double reward_sum = 0.0;
};

// Parses a "t,approach" CSV (one row per vehicle) into a flow replaying
// those arrivals exactly. Throws std::runtime_error naming the bad line.
FlowSpec ingest_real_arrivals(const std::string& path);

// Resolves the configured flow source (preset / JSON file / arrivals CSV),
// with interval endpoints scaled by config.scale.
FlowSpec resolve_flow(const ExperimentConfig& config);

// One seeded episode under the configured controller. No file output.
RunResult run_single(const ExperimentConfig& config, std::uint64_t seed,
                     const std::string& label);

// Runs every seed, writes metrics.csv and manifest.json under out_dir,
// and returns the per-seed results (rows sorted by controller, then seed).
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

struct SweepSpec {
    std::string parameter;  // utd | n | m
    std::vector<int> values;
    ExperimentConfig base;

    void validate() const;
};

// One run per (value, seed). Writes metrics.csv, curves_<param>.csv,
// curves_<param>.svg, and manifest.json under the base config's out_dir.
std::vector<RunResult> run_sweep(const SweepSpec& spec);

struct CurveSeries {
    std::string label;
    std::vector<double> values;  // indexed by decision
};

// Deterministic line chart; throws std::domain_error when there is nothing
// to plot.
void write_curves_svg(const std::string& path, const std::string& title,
                      const std::string& y_label, const std::vector<CurveSeries>& series);

std::vector<double> rolling_mean(const std::vector<double>& xs, int window);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& rows);

}  // namespace relight
