#include "relight/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relight {

namespace fs = std::filesystem;

namespace {

constexpr double kEps = 1e-9;

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

}  // namespace

void ControllerSpec::validate() const {
    if (type == "fixed") {
        if (fixed_green_we <= 0.0 || fixed_green_ns <= 0.0)
            throw std::invalid_argument("fixed-cycle green durations must be positive");
    } else if (type == "sotl") {
        if (sotl.theta <= 0.0 || sotl.phi_min <= 0.0 || sotl.mu <= 0.0)
            throw std::invalid_argument("SOTL parameters must be positive");
    } else if (is_relight_family()) {
        agent.validate();
    } else {
        throw std::invalid_argument("unknown controller type '" + type + "'");
    }
}

void ExperimentConfig::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
    controller.validate();
    sim.validate();
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    switch (flow.kind) {
        case FlowSource::Kind::Preset: j["flow"] = {{"preset", flow.value}}; break;
        case FlowSource::Kind::File: j["flow"] = {{"path", flow.value}}; break;
        case FlowSource::Kind::ArrivalsCsv: j["flow"] = {{"arrivals_csv", flow.value}}; break;
    }
    nlohmann::json c;
    c["type"] = controller.type;
    if (controller.is_relight_family()) {
        c["n"] = controller.agent.ensemble_size;
        c["m"] = controller.agent.in_target;
        c["utd"] = controller.agent.utd_ratio;
        c["gamma"] = controller.agent.gamma;
        c["epsilon"] = controller.agent.epsilon;
        c["rho"] = controller.agent.rho;
        c["batch_size"] = controller.agent.batch_size;
        c["learning_rate"] = controller.agent.learning_rate;
        c["memory"] = controller.agent.memory;
        c["hidden"] = std::vector<int>(controller.agent.dims.begin() + 1,
                                       controller.agent.dims.end() - 1);
        c["exec"] = to_string(controller.agent.exec);
    } else if (controller.type == "fixed") {
        c["green_we"] = controller.fixed_green_we;
        c["green_ns"] = controller.fixed_green_ns;
    } else if (controller.type == "sotl") {
        c["theta"] = controller.sotl.theta;
        c["phi_min"] = controller.sotl.phi_min;
        c["mu"] = controller.sotl.mu;
    }
    j["controller"] = c;
    j["horizon"] = horizon;
    j["horizon_effective"] = effective_horizon();
    j["scale"] = scale;
    j["seeds"] = seeds;
    j["out"] = out_dir;
    j["reward_weights"] = weights.to_json();
    j["eval_episode"] = eval_episode;
    j["sim"] = {{"road_length", sim.road_length},
                {"lanes_per_approach", sim.lanes_per_approach},
                {"free_flow_speed", sim.free_flow_speed},
                {"saturation_headway", sim.saturation_headway},
                {"yellow_duration", sim.yellow_duration},
                {"tick", sim.tick}};
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;

    const auto& f = j.at("flow");
    if (f.contains("preset")) {
        cfg.flow = {FlowSource::Kind::Preset, f.at("preset").get<std::string>()};
    } else if (f.contains("path")) {
        cfg.flow = {FlowSource::Kind::File, f.at("path").get<std::string>()};
    } else if (f.contains("arrivals_csv")) {
        cfg.flow = {FlowSource::Kind::ArrivalsCsv, f.at("arrivals_csv").get<std::string>()};
    } else {
        throw std::invalid_argument("flow must name a preset, path, or arrivals_csv");
    }

    const auto& c = j.at("controller");
    cfg.controller.type = c.at("type").get<std::string>();
    if (cfg.controller.is_relight_family()) {
        AgentConfig& a = cfg.controller.agent;
        a.ensemble_size = c.value("n", a.ensemble_size);
        a.in_target = c.value("m", a.in_target);
        a.utd_ratio = c.value("utd", a.utd_ratio);
        a.gamma = c.value("gamma", a.gamma);
        a.epsilon = c.value("epsilon", a.epsilon);
        a.rho = c.value("rho", a.rho);
        a.batch_size = c.value("batch_size", a.batch_size);
        a.learning_rate = c.value("learning_rate", a.learning_rate);
        a.memory = c.value("memory", a.memory);
        if (c.contains("hidden")) {
            const auto hidden = c.at("hidden").get<std::vector<int>>();
            a.dims.clear();
            a.dims.push_back(40);
            a.dims.insert(a.dims.end(), hidden.begin(), hidden.end());
            a.dims.push_back(kNumActions);
        }
        if (c.contains("exec")) {
            const auto exec = c.at("exec").get<std::string>();
            if (exec == "serial")
                a.exec = ExecPolicy::Serial;
            else if (exec == "openmp")
                a.exec = ExecPolicy::OpenMp;
            else
                throw std::invalid_argument("exec must be 'serial' or 'openmp'");
        }
    } else if (cfg.controller.type == "fixed") {
        cfg.controller.fixed_green_we = c.value("green_we", 30.0);
        cfg.controller.fixed_green_ns = c.value("green_ns", 30.0);
    } else if (cfg.controller.type == "sotl") {
        cfg.controller.sotl.theta = c.value("theta", 50.0);
        cfg.controller.sotl.phi_min = c.value("phi_min", 10.0);
        cfg.controller.sotl.mu = c.value("mu", 3.0);
    }

    cfg.horizon = j.at("horizon").get<double>();
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.scale = j.value("scale", cfg.scale);
    cfg.out_dir = j.value("out", cfg.out_dir);
    if (j.contains("reward_weights")) cfg.weights = RewardWeights::from_json(j.at("reward_weights"));
    cfg.eval_episode = j.value("eval_episode", false);
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        cfg.sim.road_length = s.value("road_length", cfg.sim.road_length);
        cfg.sim.lanes_per_approach = s.value("lanes_per_approach", cfg.sim.lanes_per_approach);
        cfg.sim.free_flow_speed = s.value("free_flow_speed", cfg.sim.free_flow_speed);
        cfg.sim.saturation_headway = s.value("saturation_headway", cfg.sim.saturation_headway);
        cfg.sim.yellow_duration = s.value("yellow_duration", cfg.sim.yellow_duration);
        cfg.sim.tick = s.value("tick", cfg.sim.tick);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open experiment config: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

FlowSpec ingest_real_arrivals(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open arrivals file: " + path);
    std::string line;
    if (!std::getline(in, line) || trimmed(line) != "t,approach")
        throw std::runtime_error(path + ": line 1: expected header 't,approach'");

    FlowSpec spec;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trimmed(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": expected 't,approach'");
        const std::string t_str = trimmed(row.substr(0, comma));
        const std::string a_str = trimmed(row.substr(comma + 1));
        char* end = nullptr;
        const double t = std::strtod(t_str.c_str(), &end);
        if (t_str.empty() || end != t_str.c_str() + t_str.size() || !(t >= 0.0))
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": bad arrival time '" + t_str + "'");
        ExplicitArrival a;
        a.t = t;
        try {
            a.approach = approach_from_string(a_str);
        } catch (const std::invalid_argument&) {
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": bad approach '" + a_str + "'");
        }
        spec.arrivals.push_back(a);
    }
    std::stable_sort(spec.arrivals.begin(), spec.arrivals.end(),
                     [](const ExplicitArrival& x, const ExplicitArrival& y) { return x.t < y.t; });
    return spec;
}

FlowSpec resolve_flow(const ExperimentConfig& config) {
    FlowSpec flow;
    switch (config.flow.kind) {
        case FlowSource::Kind::Preset: flow = flow_preset(config.flow.value); break;
        case FlowSource::Kind::File: flow = FlowSpec::load_file(config.flow.value); break;
        case FlowSource::Kind::ArrivalsCsv: flow = ingest_real_arrivals(config.flow.value); break;
    }
    return flow.scaled(config.scale);
}

std::vector<double> rolling_mean(const std::vector<double>& xs, int window) {
    std::vector<double> out(xs.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sum += xs[i];
        if (i >= static_cast<std::size_t>(window)) sum -= xs[i - window];
        const std::size_t n = std::min<std::size_t>(i + 1, window);
        out[i] = sum / static_cast<double>(n);
    }
    return out;
}

namespace {

MetricsRecord metrics_from_sim(const TrafficSim& sim, std::uint64_t seed,
                               const std::string& label) {
    MetricsRecord rec;
    rec.seed = seed;
    rec.controller = label;

    const auto& trace = sim.tick_trace();
    const double horizon = sim.time();
    const double boundary = 0.75 * horizon;

    double q_sum = 0.0, d_sum = 0.0, q_fq = 0.0, d_fq = 0.0;
    std::size_t n_fq = 0;
    for (const TickStats& t : trace) {
        q_sum += t.total_queued;
        d_sum += t.mean_delay;
        if (t.time > boundary + kEps) {
            q_fq += t.total_queued;
            d_fq += t.mean_delay;
            ++n_fq;
        }
    }
    if (!trace.empty()) {
        rec.avg_queue_length = q_sum / static_cast<double>(trace.size());
        rec.avg_delay = d_sum / static_cast<double>(trace.size());
    }
    if (n_fq > 0) {
        rec.fq_avg_queue_length = q_fq / static_cast<double>(n_fq);
        rec.fq_avg_delay = d_fq / static_cast<double>(n_fq);
    }

    // Travel times: exited vehicles contribute exit - spawn; vehicles still
    // in the network are censored at the horizon.
    double tt_sum = 0.0, tt_fq = 0.0;
    std::size_t tt_n = 0, tt_fq_n = 0;
    for (const DepartureRecord& d : sim.departures()) {
        tt_sum += d.exit_time - d.spawn_time;
        ++tt_n;
        if (d.exit_time > boundary + kEps) {
            tt_fq += d.exit_time - d.spawn_time;
            ++tt_fq_n;
        }
    }
    for (double spawn : sim.in_network_spawn_times()) {
        tt_sum += horizon - spawn;
        ++tt_n;
        tt_fq += horizon - spawn;
        ++tt_fq_n;
    }
    if (tt_n > 0) rec.avg_travel_time = tt_sum / static_cast<double>(tt_n);
    if (tt_fq_n > 0) rec.fq_avg_travel_time = tt_fq / static_cast<double>(tt_fq_n);
    return rec;
}

AgentConfig resolved_agent_config(const ExperimentConfig& config) {
    AgentConfig acfg = config.controller.agent;
    if (config.controller.type == "single-dqn") {
        acfg.ensemble_size = 1;
        acfg.in_target = 1;
        acfg.utd_ratio = 1;
    }
    acfg.dims.front() = observation_dim(config.sim);
    acfg.validate();
    return acfg;
}

int decision_count(const ExperimentConfig& config) {
    return static_cast<int>(std::floor(config.effective_horizon() / 5.0 + kEps));
}

RunResult result_from(const TrafficEnv& env, std::uint64_t seed, const std::string& label,
                      std::vector<double> queued, double reward_sum) {
    RunResult res;
    res.metrics = metrics_from_sim(env.sim(), seed, label);
    res.queue_curve = rolling_mean(queued, kCurveWindow);
    res.queued_per_decision = std::move(queued);
    res.reward_sum = reward_sum;
    return res;
}

}  // namespace

RunResult run_single(const ExperimentConfig& config, std::uint64_t seed,
                     const std::string& label) {
    const FlowSpec flow = resolve_flow(config);
    const int decisions = decision_count(config);
    TrafficEnv env(config.sim, flow, seed, config.weights);

    if (config.controller.is_relight_family()) {
        EnsembleAgent agent(resolved_agent_config(config), seed);
        const EpisodeStats stats = train_episode(agent, env, decisions);
        return result_from(env, seed, label, stats.queued, stats.reward_sum);
    }

    std::vector<double> queued;
    queued.reserve(decisions);
    double reward_sum = 0.0;
    if (config.controller.type == "fixed") {
        FixedCycleController ctrl(config.controller.fixed_green_we,
                                  config.controller.fixed_green_ns);
        for (int k = 0; k < decisions; ++k) {
            const Action a = ctrl.act(env.sim().phase(), env.sim().time_in_phase());
            reward_sum += env.step(a).reward.total;
            queued.push_back(env.sim().total_queued());
        }
    } else {  // sotl
        SotlController ctrl(config.controller.sotl, env.action_interval());
        for (int k = 0; k < decisions; ++k) {
            const Action a = ctrl.act(env.sim().queue_lengths(), env.sim().phase(),
                                      env.sim().time_in_phase(), config.sim.lanes_per_approach);
            reward_sum += env.step(a).reward.total;
            queued.push_back(env.sim().total_queued());
        }
    }
    return result_from(env, seed, label, std::move(queued), reward_sum);
}

namespace {

// Trains as run_single does, then optionally replays the frozen greedy
// policy on a fresh environment for deployment-quality metrics.
std::vector<RunResult> run_single_with_eval(const ExperimentConfig& config, std::uint64_t seed) {
    const std::string label = config.controller.type;
    if (!config.controller.is_relight_family() || !config.eval_episode)
        return {run_single(config, seed, label)};

    const FlowSpec flow = resolve_flow(config);
    const int decisions = decision_count(config);
    TrafficEnv env(config.sim, flow, seed, config.weights);
    EnsembleAgent agent(resolved_agent_config(config), seed);
    const EpisodeStats stats = train_episode(agent, env, decisions);

    TrafficEnv eval_env(config.sim, flow, Rng::stream_seed(seed, 33), config.weights);
    const EpisodeStats eval_stats = evaluate_episode(agent, eval_env, decisions);

    return {result_from(env, seed, label, stats.queued, stats.reward_sum),
            result_from(eval_env, seed, label + "-eval", eval_stats.queued,
                        eval_stats.reward_sum)};
}

void sort_results(std::vector<RunResult>& results) {
    std::sort(results.begin(), results.end(), [](const RunResult& a, const RunResult& b) {
        if (a.metrics.controller != b.metrics.controller)
            return a.metrics.controller < b.metrics.controller;
        return a.metrics.seed < b.metrics.seed;
    });
}

void write_manifest(const std::string& path, const ExperimentConfig& config,
                    const nlohmann::json& extra) {
    nlohmann::json j = config.to_json();
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write metrics csv: " + path);
    out << "seed,controller,avg_queue_length,avg_delay,avg_travel_time\n";
    for (const MetricsRecord& r : rows) {
        out << r.seed << ',' << r.controller << ',' << fmt("%.6f", r.avg_queue_length) << ','
            << fmt("%.6f", r.avg_delay) << ',' << fmt("%.6f", r.avg_travel_time) << "\n";
    }
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<RunResult> results;
    for (std::uint64_t seed : config.seeds) {
        auto rows = run_single_with_eval(config, seed);
        for (auto& r : rows) results.push_back(std::move(r));
    }
    sort_results(results);

    fs::create_directories(config.out_dir);
    std::vector<MetricsRecord> rows;
    rows.reserve(results.size());
    for (const RunResult& r : results) rows.push_back(r.metrics);
    write_metrics_csv(config.out_dir + "/metrics.csv", rows);
    write_manifest(config.out_dir + "/manifest.json", config,
                   {{"outputs", {"metrics.csv", "manifest.json"}}});
    return results;
}

void SweepSpec::validate() const {
    if (parameter != "utd" && parameter != "n" && parameter != "m")
        throw std::invalid_argument("sweep parameter must be one of: utd, n, m");
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    base.validate();
    if (!base.controller.is_relight_family())
        throw std::invalid_argument("sweeps apply to the learning controller only");
    for (int v : values) {
        if (parameter == "utd") {
            if (v < 0) throw std::invalid_argument("utd values must be >= 0");
        } else if (v < 1) {
            throw std::invalid_argument("sweep values must be >= 1");
        }
        if (parameter == "m" && v > base.controller.agent.ensemble_size)
            throw std::invalid_argument("m value exceeds ensemble size N");
    }
}

std::vector<RunResult> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<RunResult> results;

    std::vector<std::pair<int, std::string>> labelled;
    for (int v : spec.values) {
        labelled.emplace_back(v, spec.base.controller.type + "(" + spec.parameter + "=" +
                                     std::to_string(v) + ")");
    }

    for (const auto& [value, label] : labelled) {
        ExperimentConfig cfg = spec.base;
        AgentConfig& a = cfg.controller.agent;
        if (spec.parameter == "utd") {
            a.utd_ratio = value;
        } else if (spec.parameter == "n") {
            a.ensemble_size = value;
            a.in_target = std::min(a.in_target, value);
        } else {
            a.in_target = value;
        }
        for (std::uint64_t seed : cfg.seeds) results.push_back(run_single(cfg, seed, label));
    }
    sort_results(results);

    fs::create_directories(spec.base.out_dir);
    std::vector<MetricsRecord> rows;
    for (const RunResult& r : results) rows.push_back(r.metrics);
    write_metrics_csv(spec.base.out_dir + "/metrics.csv", rows);

    // Learning-curve CSV, one row per (value, seed, decision).
    const std::string curve_csv = spec.base.out_dir + "/curves_" + spec.parameter + ".csv";
    {
        std::ofstream out(curve_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + curve_csv);
        out << "parameter,value,seed,decision,queue_rolling_mean\n";
        for (const auto& [value, label] : labelled) {
            for (std::uint64_t seed : spec.base.seeds) {
                const auto it = std::find_if(results.begin(), results.end(),
                                             [&](const RunResult& r) {
                                                 return r.metrics.controller == label &&
                                                        r.metrics.seed == seed;
                                             });
                for (std::size_t k = 0; k < it->queue_curve.size(); ++k)
                    out << spec.parameter << ',' << value << ',' << seed << ',' << k << ','
                        << fmt("%.6f", it->queue_curve[k]) << "\n";
            }
        }
    }

    // One plotted series per value: pointwise median across seeds.
    std::vector<CurveSeries> series;
    for (const auto& [value, label] : labelled) {
        std::vector<const RunResult*> runs;
        for (const RunResult& r : results)
            if (r.metrics.controller == label) runs.push_back(&r);
        if (runs.empty()) continue;
        CurveSeries s;
        s.label = spec.parameter + "=" + std::to_string(value);
        const std::size_t len = runs.front()->queue_curve.size();
        s.values.resize(len);
        std::vector<double> column(runs.size());
        for (std::size_t k = 0; k < len; ++k) {
            for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r]->queue_curve[k];
            std::sort(column.begin(), column.end());
            const std::size_t mid = column.size() / 2;
            s.values[k] = column.size() % 2 == 1
                              ? column[mid]
                              : 0.5 * (column[mid - 1] + column[mid]);
        }
        series.push_back(std::move(s));
    }
    write_curves_svg(spec.base.out_dir + "/curves_" + spec.parameter + ".svg",
                     "Queue length, " + spec.parameter + " sweep",
                     "rolling mean queue (vehicles)", series);

    write_manifest(spec.base.out_dir + "/manifest.json", spec.base,
                   {{"sweep", {{"parameter", spec.parameter}, {"values", spec.values}}},
                    {"outputs",
                     {"metrics.csv", "curves_" + spec.parameter + ".csv",
                      "curves_" + spec.parameter + ".svg", "manifest.json"}}});
    return results;
}

void write_curves_svg(const std::string& path, const std::string& title,
                      const std::string& y_label, const std::vector<CurveSeries>& series) {
    std::size_t max_len = 0;
    for (const CurveSeries& s : series) max_len = std::max(max_len, s.values.size());
    if (series.empty() || max_len == 0) throw std::domain_error("no curves to plot");

    constexpr int kW = 880, kH = 520, kLeft = 70, kRight = 190, kTop = 50, kBottom = 55;
    const int pw = kW - kLeft - kRight;
    const int ph = kH - kTop - kBottom;
    const double xmax = static_cast<double>(std::max<std::size_t>(max_len - 1, 1));
    double ymax = 0.0;
    for (const CurveSeries& s : series)
        for (double v : s.values) ymax = std::max(ymax, v);
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    svg << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
        << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int t = 0; t <= 5; ++t) {
        const double fy = static_cast<double>(t) / 5.0;
        const double y = kTop + ph - fy * ph;
        const double val = fy * ymax;
        svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt("%.1f", y) << "\" x2=\"" << kLeft
            << "\" y2=\"" << fmt("%.1f", y) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt("%.1f", y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt("%.4g", val) << "</text>\n";
        const double fx = static_cast<double>(t) / 5.0;
        const double x = kLeft + fx * pw;
        svg << "<line x1=\"" << fmt("%.1f", x) << "\" y1=\"" << kTop + ph << "\" x2=\""
            << fmt("%.1f", x) << "\" y2=\"" << kTop + ph + 4 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt("%.1f", x) << "\" y=\"" << kTop + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt("%.5g", fx * xmax) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">decision"
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << kTop + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << kTop + ph / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const CurveSeries& s = series[si];
        if (s.values.empty()) continue;
        const char* color = kColors[si % 8];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.values.size(); ++k) {
            const double x = kLeft + (xmax > 0 ? static_cast<double>(k) / xmax : 0.0) * pw;
            const double y = kTop + ph - std::min(s.values[k] / ymax, 1.0) * ph;
            svg << fmt("%.2f", x) << ',' << fmt("%.2f", y) << ' ';
        }
        svg << "\"/>\n";
        const int ly = kTop + 14 + 18 * static_cast<int>(si);
        svg << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << kW - kRight + 36 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kW - kRight + 42 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write svg: " + path);
    out << svg.str();
}

}  // namespace relight
