#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "relight/sim.hpp"

namespace relight {

// Flat state vector: [l_i x lanes | w_i x lanes | n_i x lanes | p_c onehot | p_n onehot].
// Lane order is approach-major (N, S, E, W), lane index ascending.
using Observation = std::vector<double>;

inline int observation_dim(const SimConfig& cfg) { return 3 * cfg.entry_lane_count() + 4; }

constexpr int kNumActions = 2;

struct Action {
    bool switch_phase = false;  // a=1 switch, a=0 keep

    int index() const { return switch_phase ? 1 : 0; }
    static Action from_index(int i) { return Action{i != 0}; }
};

struct RewardWeights {
    double w1 = -0.25;  // queue-length variance
    double w2 = -0.25;  // sum of lane delays
    double w3 = -0.25;  // sum of lane waiting times (minutes)
    double w4 = -5.0;   // phase-switch indicator
    double w5 = 1.0;    // vehicles departed in the interval
    double w6 = 1.0;    // their summed travel time (minutes)

    nlohmann::json to_json() const;
    static RewardWeights from_json(const nlohmann::json& j);
};

struct RewardBreakdown {
    double variance = 0.0;      // V, vehicles^2
    double sum_delay = 0.0;     // dimensionless
    double sum_wait_min = 0.0;  // minutes
    double switched = 0.0;      // C in {0,1}
    double departed = 0.0;      // N, vehicles
    double travel_min = 0.0;    // T, minutes
    double total = 0.0;
};

// Population variance of per-lane queue lengths (Var over all entry lanes).
double queue_variance(std::span<const double> lengths);  // throws std::domain_error if empty

Observation observation_from(const TrafficSnapshot& snap);

// Featurizes the current simulator state. Consumes a snapshot, so interval
// departure accounting restarts here; the feature vector itself is a pure
// function of the simulator state.
Observation observe(TrafficSim& sim);

struct StepResult {
    Observation obs;
    RewardBreakdown reward;
};

// MDP adapter running the simulator on a fixed decision cadence (5 s by
// default). A switch action spends 3 s of yellow plus 2 s of the new green
// inside the same interval, so every decision advances exactly
// action_interval seconds.
class TrafficEnv {
public:
    TrafficEnv(SimConfig config, FlowSpec flow, std::uint64_t seed,
               RewardWeights weights = {}, double action_interval = 5.0);

    // Observation of the initial (or current) state.
    Observation observe_state() { return observe(sim_); }

    StepResult step(Action a);

    TrafficSim& sim() { return sim_; }
    const TrafficSim& sim() const { return sim_; }
    const RewardWeights& weights() const { return weights_; }
    double action_interval() const { return action_interval_; }
    int ticks_per_step() const { return ticks_per_step_; }
    int decisions() const { return decisions_; }

private:
    TrafficSim sim_;
    RewardWeights weights_;
    double action_interval_;
    int ticks_per_step_;
    int decisions_ = 0;
};

}  // namespace relight
