// Release gate. Each criterion prints exactly one PASS/FAIL line with its
// measured numbers; the exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relight/harness.hpp"

using namespace relight;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Criterion {
    const char* id;
    const char* name;
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------- gradients

Criterion check_gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> dims{5, 6, 2};
    constexpr double kTol = 1e-4;
    constexpr double kH = 1e-4;
    constexpr double kKinkMargin = 1e-3;  // keep every hidden unit off its kink

    Rng rng(101);
    std::uint64_t net_seed = 5000;
    double max_rel = 0.0;
    int done = 0;
    while (done < 50) {
        Mlp net(dims, net_seed++);
        TrainBatch batch;
        for (int i = 0; i < 4; ++i) {
            Observation x(5);
            for (double& v : x) v = rng.uniform() * 2.0 - 1.0;
            batch.inputs.push_back(std::move(x));
            batch.action_indices.push_back(rng.index(2));
            batch.targets.push_back(rng.uniform() * 4.0 - 2.0);
        }
        bool smooth = true;
        for (const Observation& x : batch.inputs)
            smooth = smooth && oracle::forward_trace(dims, net.parameters(), x)
                                       .min_hidden_preact_abs >= kKinkMargin;
        if (!smooth) continue;  // redraw: finite differences would cross a kink

        std::vector<double> analytic;
        net.loss_and_gradient(batch, analytic);
        const std::vector<double> numeric = oracle::fd_gradient(net, batch, kH);
        for (std::size_t p = 0; p < analytic.size(); ++p) {
            const double denom =
                std::max({std::abs(analytic[p]), std::abs(numeric[p]), 1.0});
            max_rel = std::max(max_rel, std::abs(analytic[p] - numeric[p]) / denom);
        }
        ++done;
    }

    const double elapsed = seconds_since(t0);
    const bool pass = max_rel <= kTol && elapsed < 10.0;
    return {"P1", "analytic gradients match finite differences", pass,
            fmt("max rel err %.2e over 50 nets, tol %.0e; %.1f s", max_rel, kTol, elapsed)};
}

// ------------------------------------------------------------ target oracle

Criterion check_target_enumeration() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(202);
    int mismatches = 0;
    int compared = 0;

    for (int trial = 0; trial < 100; ++trial) {
        AgentConfig cfg;
        cfg.ensemble_size = 3;
        cfg.in_target = 1;
        cfg.dims = {4, 6, 2};
        cfg.gamma = rng.uniform();
        cfg.exec = ExecPolicy::Serial;
        EnsembleAgent agent(cfg, 900 + trial);

        std::vector<std::array<double, 2>> online_c, target_c;
        for (int i = 0; i < 3; ++i) {
            online_c.push_back({rng.uniform() * 10.0 - 5.0, rng.uniform() * 10.0 - 5.0});
            target_c.push_back({rng.uniform() * 10.0 - 5.0, rng.uniform() * 10.0 - 5.0});
            agent.online_networks()[i] = oracle::constant_net(cfg.dims, online_c[i][0],
                                                              online_c[i][1]);
            agent.target_networks()[i] = oracle::constant_net(cfg.dims, target_c[i][0],
                                                              target_c[i][1]);
        }

        std::vector<int> subset;
        for (int m = 0; m < 3; ++m)
            if (rng.uniform() < 0.5) subset.push_back(m);
        if (subset.empty()) subset.push_back(rng.index(3));

        std::vector<Transition> batch(4);
        for (Transition& t : batch) {
            t.s = Observation(4, 0.0);
            t.s_next = Observation(4, rng.uniform());
            t.r = rng.uniform() * 20.0 - 10.0;
        }

        const auto y = agent.compute_targets(batch, subset);
        for (std::size_t j = 0; j < batch.size(); ++j) {
            const double expect =
                oracle::enumerate_target(online_c, target_c, subset, batch[j].r, cfg.gamma);
            ++compared;
            if (y[j] != expect) ++mismatches;  // exact: identical arithmetic must agree
        }
    }

    const double elapsed = seconds_since(t0);
    const bool pass = mismatches == 0 && elapsed < 5.0;
    return {"P2", "bootstrap targets match exhaustive enumeration", pass,
            fmt("%d/%d values exactly equal; %.1f s", compared - mismatches, compared,
                elapsed)};
}

// ------------------------------------------------------- subset monotonicity

Criterion check_subset_monotonicity() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(303);
    int violations = 0;
    int compared = 0;

    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(4));
        std::vector<Mlp> online, targets;
        for (int i = 0; i < n; ++i) {
            online.emplace_back(std::vector<int>{5, 6, 2}, 3000 + trial * 16 + i);
            targets.emplace_back(std::vector<int>{5, 6, 2}, 4000 + trial * 16 + i);
        }

        std::vector<int> s2;
        for (int m = 0; m < n; ++m)
            if (rng.uniform() < 0.6) s2.push_back(m);
        if (s2.empty()) s2.push_back(static_cast<int>(rng.index(n)));
        std::vector<int> s1;
        for (int m : s2)
            if (rng.uniform() < 0.6) s1.push_back(m);
        if (s1.empty())
            s1.push_back(s2[static_cast<std::size_t>(rng.index(static_cast<int>(s2.size())))]);

        std::vector<Observation> next(4);
        std::vector<double> rewards(4);
        for (int j = 0; j < 4; ++j) {
            next[j].resize(5);
            for (double& v : next[j]) v = rng.uniform() * 2.0 - 1.0;
            rewards[j] = rng.uniform() * 4.0 - 2.0;
        }

        std::vector<double> y1(4), y2(4);
        double_q_targets(online, targets, s1, next, rewards, 0.8, y1, ExecPolicy::Serial);
        double_q_targets(online, targets, s2, next, rewards, 0.8, y2, ExecPolicy::Serial);
        for (int j = 0; j < 4; ++j) {
            ++compared;
            if (y2[j] > y1[j]) ++violations;  // larger subsets can only lower the min
        }
    }

    const double elapsed = seconds_since(t0);
    const bool pass = violations == 0;
    return {"P3", "bootstrap targets never grow with the subset", pass,
            fmt("%d/%d ordered pairs held; %.1f s", compared - violations, compared, elapsed)};
}

// --------------------------------------------- conservation and FIFO service

FlowSpec random_flow(Rng& rng) {
    FlowSpec f;
    const int n_iv = 1 + static_cast<int>(rng.index(3));
    for (int i = 0; i < n_iv; ++i) {
        FlowInterval iv;
        iv.begin = rng.uniform() * 500.0;
        iv.end = iv.begin + 100.0 + rng.uniform() * 1400.0;
        iv.group = rng.uniform() < 0.5 ? ApproachGroup::WE : ApproachGroup::NS;
        iv.mode = rng.uniform() < 0.5 ? FlowMode::Deterministic : FlowMode::Bernoulli;
        iv.rate = iv.mode == FlowMode::Deterministic ? 0.05 + rng.uniform() * 0.45
                                                     : 0.02 + rng.uniform() * 0.28;
        f.intervals.push_back(iv);
    }
    const int n_arr = static_cast<int>(rng.index(21));
    std::vector<double> times(n_arr);
    for (double& t : times) t = rng.uniform() * 1000.0;
    std::sort(times.begin(), times.end());
    for (double t : times)
        f.arrivals.push_back({t, static_cast<Approach>(rng.index(4))});
    return f;
}

Criterion check_conservation_fifo() {
    const auto t0 = std::chrono::steady_clock::now();
    long conservation_bad = 0;
    long fifo_bad = 0;
    long ticks_checked = 0;

    Rng flow_rng(404);
    for (int run = 0; run < 100; ++run) {
        const FlowSpec flow = random_flow(flow_rng);
        TrafficSim sim(SimConfig{}, flow, 7000 + run);
        Rng policy = Rng::derive(8000 + run, 7);

        std::vector<std::vector<std::int64_t>> prev(12);
        for (int t = 1; t <= 2000; ++t) {
            if (!sim.in_yellow() && policy.uniform() < 0.05) sim.command_signal(true);
            sim.advance_tick();
            ++ticks_checked;

            if (sim.spawned_total() != sim.in_network() + sim.departed_total())
                ++conservation_bad;

            for (int li = 0; li < 12; ++li) {
                const auto& q = sim.lanes()[li].queue;
                std::vector<std::int64_t> cur(q.begin(), q.end());
                const auto& p = prev[li];
                // the old queue may lose at most its head; the rest must
                // stay in order as the new queue's prefix
                std::size_t pops = 0;
                bool ok = false;
                for (; pops <= 1 && pops <= p.size(); ++pops) {
                    const std::size_t survivors = p.size() - pops;
                    if (survivors > cur.size()) continue;
                    bool match = true;
                    for (std::size_t i = 0; i < survivors && match; ++i)
                        match = cur[i] == p[pops + i];
                    if (match) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) ++fifo_bad;
                prev[li] = std::move(cur);
            }
        }
    }

    const double elapsed = seconds_since(t0);
    const bool pass = conservation_bad == 0 && fifo_bad == 0 && elapsed < 30.0;
    return {"P4", "simulator conserves vehicles and serves lanes FIFO", pass,
            fmt("%ld ticks: %ld conservation and %ld ordering violations; %.1f s",
                ticks_checked, conservation_bad, fifo_bad, elapsed)};
}

// --------------------------------------------------------- reward structure

Criterion check_reward_decomposition() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr double kTol = 1e-12;
    const RewardWeights w;

    int checked = 0;
    double max_err = 0.0;
    const char* presets[] = {"equal", "unequal", "switch", "hangzhou", "synthetic"};
    for (int s = 0; s < 5; ++s) {
        FlowSpec flow = flow_preset(presets[s]);
        if (std::string(presets[s]) != "hangzhou") flow = flow.scaled(0.2);
        TrafficEnv env(SimConfig{}, flow, 600 + s, w);
        Rng policy(700 + s);
        for (int k = 0; k < 100; ++k) {
            const StepResult r = env.step(Action{policy.uniform() < 0.3});
            const double expect = w.w1 * r.reward.variance + w.w2 * r.reward.sum_delay +
                                  w.w3 * r.reward.sum_wait_min + w.w4 * r.reward.switched +
                                  w.w5 * r.reward.departed + w.w6 * r.reward.travel_min;
            max_err = std::max(max_err, std::abs(r.reward.total - expect));
            ++checked;
        }
    }

    TrafficEnv empty_keep(SimConfig{}, FlowSpec{}, 1, w);
    const double keep_total = empty_keep.step(Action{false}).reward.total;
    TrafficEnv empty_switch(SimConfig{}, FlowSpec{}, 1, w);
    const double switch_total = empty_switch.step(Action{true}).reward.total;

    const double elapsed = seconds_since(t0);
    const bool pass =
        max_err <= kTol && keep_total == 0.0 && switch_total == -5.0 && checked == 500;
    return {"P5", "reward total equals the weighted component sum", pass,
            fmt("max decomposition err %.1e over %d steps; empty keep %.1f, switch %.1f; %.1f s",
                max_err, checked, keep_total, switch_total, elapsed)};
}

// ------------------------------------------------- end-to-end run shorthand

ExperimentConfig learner_config(const std::string& preset, int n, int m, int g) {
    ExperimentConfig cfg;
    cfg.flow = {FlowSource::Kind::Preset, preset};
    cfg.scale = 0.05;
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.controller.type = "relight";
    cfg.controller.agent.ensemble_size = n;
    cfg.controller.agent.in_target = m;
    cfg.controller.agent.utd_ratio = g;
    return cfg;
}

std::vector<RunResult> run_seeds(const ExperimentConfig& cfg, const std::string& label) {
    std::vector<RunResult> out;
    out.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds) out.push_back(run_single(cfg, seed, label));
    return out;
}

std::vector<double> collect(const std::vector<RunResult>& runs,
                            double MetricsRecord::*field) {
    std::vector<double> out;
    out.reserve(runs.size());
    for (const RunResult& r : runs) out.push_back(r.metrics.*field);
    return out;
}

// --------------------------------------- learned policy vs fixed-cycle plan

Criterion check_learned_vs_fixed() {
    const auto t0 = std::chrono::steady_clock::now();

    const auto learned = run_seeds(learner_config("equal", 10, 4, 20), "relight");
    ExperimentConfig fixed_cfg = learner_config("equal", 1, 1, 0);
    fixed_cfg.controller = ControllerSpec{};
    fixed_cfg.controller.type = "fixed";
    const auto fixed = run_seeds(fixed_cfg, "fixed");

    const double lq = oracle::median(collect(learned, &MetricsRecord::fq_avg_queue_length));
    const double lt = oracle::median(collect(learned, &MetricsRecord::fq_avg_travel_time));
    const double fq = oracle::median(collect(fixed, &MetricsRecord::fq_avg_queue_length));
    const double ft = oracle::median(collect(fixed, &MetricsRecord::fq_avg_travel_time));

    const double elapsed = seconds_since(t0);
    const bool margin = lt <= 0.8 * ft;
    const bool pass = lq < fq && lt < ft && margin && elapsed < 900.0;
    return {"P6", "learned control beats the fixed cycle on equal demand", pass,
            fmt("final-quarter medians, learned vs fixed: queue %.3f vs %.3f, travel %.2f s "
                "vs %.2f s (need both lower and travel <= 0.8x); %.0f s",
                lq, fq, lt, ft, elapsed)};
}

// ----------------------------------------------- ensemble vs single learner

Criterion check_ensemble_vs_single() {
    const auto t0 = std::chrono::steady_clock::now();

    const auto full = run_seeds(learner_config("unequal", 10, 4, 40), "relight");
    const auto single = run_seeds(learner_config("unequal", 1, 1, 40), "single");

    const double full_q = oracle::median(collect(full, &MetricsRecord::fq_avg_queue_length));
    const double single_q =
        oracle::median(collect(single, &MetricsRecord::fq_avg_queue_length));

    const double elapsed = seconds_since(t0);
    const bool pass = full_q <= single_q;
    return {"P7", "10-member ensemble at least matches a single learner", pass,
            fmt("final-quarter median queue: ensemble %.3f vs single %.3f (need <=); %.0f s",
                full_q, single_q, elapsed)};
}

// -------------------------------------------------- update ratio data usage

std::size_t settle_index(const std::vector<double>& curve, double threshold) {
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(curve.begin(), curve.end()) - curve.begin());
    for (std::size_t k = peak; k < curve.size(); ++k)
        if (curve[k] <= threshold) return k;
    return curve.size();  // never settled
}

Criterion check_update_ratio() {
    const auto t0 = std::chrono::steady_clock::now();

    const auto g1 = run_seeds(learner_config("unequal", 10, 4, 1), "g1");
    const auto g20 = run_seeds(learner_config("unequal", 10, 4, 20), "g20");

    std::vector<double> t1, t20;
    for (std::size_t s = 0; s < g1.size(); ++s) {
        const double threshold = g1[s].queue_curve.back();  // what G=1 ends up at
        t1.push_back(static_cast<double>(settle_index(g1[s].queue_curve, threshold)));
        t20.push_back(static_cast<double>(settle_index(g20[s].queue_curve, threshold)));
    }
    const double med1 = oracle::median(t1);
    const double med20 = oracle::median(t20);

    const double elapsed = seconds_since(t0);
    const bool pass = med20 <= 0.5 * med1;
    return {"P8", "40x fewer decisions of data settle with a high update ratio", pass,
            fmt("median decisions to settle below the low-ratio endpoint: %.0f (G=20) vs "
                "%.0f (G=1), need <= 50%%; %.0f s",
                med20, med1, elapsed)};
}

// ------------------------------------------------------------ reproducibility

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Criterion check_reproducibility() {
    const auto t0 = std::chrono::steady_clock::now();

    ExperimentConfig cfg = learner_config("equal", 10, 4, 5);
    cfg.scale = 0.02;
    cfg.seeds = {1, 2};
    cfg.out_dir = "acceptance_out/repro_a";
    run_experiment(cfg);
    cfg.out_dir = "acceptance_out/repro_b";
    run_experiment(cfg);

    const std::string a = slurp("acceptance_out/repro_a/metrics.csv");
    const std::string b = slurp("acceptance_out/repro_b/metrics.csv");

    const double elapsed = seconds_since(t0);
    const bool pass = !a.empty() && a == b;
    return {"P9", "repeated experiments are byte-for-byte identical", pass,
            fmt("metrics.csv %zu bytes, %s; %.0f s", a.size(),
                a == b ? "identical" : "DIFFER", elapsed)};
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(check_gradients());
    std::printf("%s %s: %s (%s)\n", results.back().id, results.back().name,
                results.back().pass ? "PASS" : "FAIL", results.back().detail.c_str());
    std::fflush(stdout);

    Criterion (*checks[])() = {
        check_target_enumeration, check_subset_monotonicity, check_conservation_fifo,
        check_reward_decomposition, check_learned_vs_fixed, check_ensemble_vs_single,
        check_update_ratio, check_reproducibility,
    };
    for (auto check : checks) {
        results.push_back(check());
        std::printf("%s %s: %s (%s)\n", results.back().id, results.back().name,
                    results.back().pass ? "PASS" : "FAIL", results.back().detail.c_str());
        std::fflush(stdout);
    }

    int failed = 0;
    for (const Criterion& c : results) failed += c.pass ? 0 : 1;
    std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
    return failed;
}
