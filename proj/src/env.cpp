#include "relight/env.hpp"

#include <cmath>
#include <stdexcept>

namespace relight {

nlohmann::json RewardWeights::to_json() const {
    return nlohmann::json::array({w1, w2, w3, w4, w5, w6});
}

RewardWeights RewardWeights::from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 6)
        throw std::invalid_argument("reward_weights must be an array of 6 numbers");
    RewardWeights w;
    w.w1 = j[0].get<double>();
    w.w2 = j[1].get<double>();
    w.w3 = j[2].get<double>();
    w.w4 = j[3].get<double>();
    w.w5 = j[4].get<double>();
    w.w6 = j[5].get<double>();
    return w;
}

double queue_variance(std::span<const double> lengths) {
    if (lengths.empty()) throw std::domain_error("queue_variance of an empty lane set");
    double mean = 0.0;
    for (double l : lengths) mean += l;
    mean /= static_cast<double>(lengths.size());
    double accum = 0.0;
    for (double l : lengths) accum += (l - mean) * (l - mean);
    return accum / static_cast<double>(lengths.size());
}

Observation observation_from(const TrafficSnapshot& snap) {
    const std::size_t lanes = snap.queue_len.size();
    Observation obs;
    obs.reserve(3 * lanes + 4);
    obs.insert(obs.end(), snap.queue_len.begin(), snap.queue_len.end());
    obs.insert(obs.end(), snap.wait_min.begin(), snap.wait_min.end());
    obs.insert(obs.end(), snap.queued_count.begin(), snap.queued_count.end());
    obs.push_back(snap.phase == Phase::WEG ? 1.0 : 0.0);
    obs.push_back(snap.phase == Phase::NSG ? 1.0 : 0.0);
    obs.push_back(snap.next_phase == Phase::WEG ? 1.0 : 0.0);
    obs.push_back(snap.next_phase == Phase::NSG ? 1.0 : 0.0);
    return obs;
}

Observation observe(TrafficSim& sim) { return observation_from(sim.snapshot()); }

TrafficEnv::TrafficEnv(SimConfig config, FlowSpec flow, std::uint64_t seed,
                       RewardWeights weights, double action_interval)
    : sim_(config, std::move(flow), seed),
      weights_(weights),
      action_interval_(action_interval) {
    const double ratio = action_interval / config.tick;
    ticks_per_step_ = static_cast<int>(std::lround(ratio));
    if (ticks_per_step_ < 1 || std::abs(ratio - ticks_per_step_) > 1e-9)
        throw std::invalid_argument("tick must divide the action interval");
    if (config.yellow_duration >= action_interval)
        throw std::invalid_argument("action interval must cover the yellow plus some green");
}

StepResult TrafficEnv::step(Action a) {
    sim_.command_signal(a.switch_phase);
    for (int k = 0; k < ticks_per_step_; ++k) sim_.advance_tick();

    const TrafficSnapshot snap = sim_.snapshot();
    RewardBreakdown r;
    r.variance = queue_variance(snap.queue_len);
    for (double d : snap.delay) r.sum_delay += d;
    for (double w : snap.wait_min) r.sum_wait_min += w;
    r.switched = a.switch_phase ? 1.0 : 0.0;
    r.departed = static_cast<double>(snap.departed_count);
    r.travel_min = snap.departed_travel_min;
    r.total = weights_.w1 * r.variance + weights_.w2 * r.sum_delay +
              weights_.w3 * r.sum_wait_min + weights_.w4 * r.switched +
              weights_.w5 * r.departed + weights_.w6 * r.travel_min;

    ++decisions_;
    return StepResult{observation_from(snap), r};
}

}  // namespace relight
