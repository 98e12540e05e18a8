#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relight/env.hpp"
#include "relight/kernels.hpp"
#include "relight/mlp.hpp"
#include "relight/rng.hpp"

namespace relight {

struct Transition {
    Observation s;
    Action a;
    double r = 0.0;
    Observation s_next;
};

// Fixed-capacity ring; eviction is oldest-first. Logical index 0 is the
// oldest stored transition.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);  // throws std::domain_error on non-finite fields
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t logical) const;

    // batch_size distinct logical indices, uniform without replacement.
    std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next write slot
    std::size_t size_ = 0;
    std::vector<Transition> data_;
};

struct AgentConfig {
    int ensemble_size = 10;     // N
    int in_target = 4;          // M
    int utd_ratio = 40;         // G
    double gamma = 0.8;
    double epsilon = 0.05;
    double rho = 0.995;
    int batch_size = 20;
    double learning_rate = 0.01;
    std::size_t memory = 1000;
    std::vector<int> dims = {40, 32, 32, 2};
    ExecPolicy exec = ExecPolicy::OpenMp;

    void validate() const;  // throws std::invalid_argument
};

struct UpdateStats {
    bool skipped = false;              // buffer below one batch
    std::vector<double> mean_losses;   // one entry per update iteration
};

struct EpisodeStats {
    std::vector<double> rewards;       // total reward per decision
    std::vector<double> queued;        // total queued vehicles after each decision
    std::vector<int> switched;         // applied action per decision
    std::vector<double> mean_losses;   // mean training loss per decision (0 while buffer fills)
    double reward_sum = 0.0;
};

// N online / N target double-DQN pairs with majority-vote acting and a
// G-fold update loop over random M-subsets of the target ensemble.
class EnsembleAgent {
public:
    EnsembleAgent(AgentConfig config, std::uint64_t master_seed);

    // Majority vote over per-member greedy choices; each member's choice is
    // independently epsilon-randomized when explore is set. Ties keep the
    // current phase.
    Action act(const Observation& obs, bool explore);

    void record(Transition t) { buffer_.push(std::move(t)); }

    // Bootstrap targets for the given transitions using the member subset.
    std::vector<double> compute_targets(const std::vector<Transition>& batch,
                                        std::span<const int> subset) const;

    // G iterations of: sample batch, sample fresh M-subset, compute shared
    // targets, train every online member, soft-update every target.
    UpdateStats update();

    const AgentConfig& config() const { return config_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    std::vector<Mlp>& online_networks() { return online_; }
    const std::vector<Mlp>& online_networks() const { return online_; }
    std::vector<Mlp>& target_networks() { return target_; }
    const std::vector<Mlp>& target_networks() const { return target_; }
    std::int64_t update_iterations() const { return update_iterations_; }

    nlohmann::json checkpoint() const;
    static EnsembleAgent restore(const nlohmann::json& j);

private:
    std::vector<int> sample_subset();

    AgentConfig config_;
    std::uint64_t master_seed_;
    std::vector<Mlp> online_;
    std::vector<Mlp> target_;
    ReplayBuffer buffer_;
    Rng explore_rng_;
    Rng sample_rng_;
    std::int64_t update_iterations_ = 0;
    std::int64_t decisions_ = 0;
};

// Online training loop: act -> step -> record -> update, one iteration per
// environment decision.
EpisodeStats train_episode(EnsembleAgent& agent, TrafficEnv& env, int horizon_steps);

// Frozen-policy episode (explore=false, no recording or updates).
EpisodeStats evaluate_episode(EnsembleAgent& agent, TrafficEnv& env, int horizon_steps);

}  // namespace relight
