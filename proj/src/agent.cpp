#include "relight/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relight {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    data_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
    if (!std::isfinite(t.r)) throw std::domain_error("non-finite reward in transition");
    for (double v : t.s)
        if (!std::isfinite(v)) throw std::domain_error("non-finite state in transition");
    for (double v : t.s_next)
        if (!std::isfinite(v)) throw std::domain_error("non-finite next state in transition");
    if (size_ < capacity_) {
        data_.push_back(std::move(t));
        ++size_;
    } else {
        data_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::at(std::size_t logical) const {
    if (logical >= size_) throw std::out_of_range("replay index out of range");
    // head_ stays 0 until the ring is full, so this covers both regimes.
    return data_[(head_ + logical) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
    if (batch_size > size_) throw std::domain_error("batch larger than buffer contents");
    std::vector<std::size_t> pool(size_);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<std::size_t> out;
    out.reserve(batch_size);
    for (std::size_t k = 0; k < batch_size; ++k) {
        const std::size_t j = k + rng.below(size_ - k);
        std::swap(pool[k], pool[j]);
        out.push_back(pool[k]);
    }
    return out;
}

void AgentConfig::validate() const {
    if (ensemble_size < 1) throw std::invalid_argument("ensemble size N must be >= 1");
    if (in_target < 1 || in_target > ensemble_size)
        throw std::invalid_argument("in-target size M must satisfy 1 <= M <= N");
    if (utd_ratio < 0) throw std::invalid_argument("UTD ratio G must be >= 0");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must lie in [0,1]");
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must lie in [0,1]");
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [0,1]");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
    if (memory == 0) throw std::invalid_argument("memory length must be positive");
    if (dims.size() < 2 || dims.back() != kNumActions)
        throw std::invalid_argument("network must end in one output per action");
}

namespace {
// Substream ids under the master seed. Per-network init streams start at
// kStreamNetBase + i.
constexpr std::uint64_t kStreamExplore = 1;
constexpr std::uint64_t kStreamSampler = 2;
constexpr std::uint64_t kStreamNetBase = 100;
}  // namespace

EnsembleAgent::EnsembleAgent(AgentConfig config, std::uint64_t master_seed)
    : config_(config),
      master_seed_(master_seed),
      buffer_(config.memory),
      explore_rng_(Rng::derive(master_seed, kStreamExplore)),
      sample_rng_(Rng::derive(master_seed, kStreamSampler)) {
    config_.validate();
    online_.reserve(config_.ensemble_size);
    for (int i = 0; i < config_.ensemble_size; ++i)
        online_.emplace_back(config_.dims, Rng::stream_seed(master_seed, kStreamNetBase + i));
    target_ = online_;  // targets start as exact copies
}

Action EnsembleAgent::act(const Observation& obs, bool explore) {
    const int n = config_.ensemble_size;
    std::vector<int> votes(n, 0);

    // Exploration draws happen serially, in member order, before the
    // (possibly parallel) forward passes.
    std::vector<int> forced(n, -1);
    if (explore) {
        for (int i = 0; i < n; ++i) {
            const bool randomize = explore_rng_.uniform() < config_.epsilon;
            const int a = explore_rng_.index(kNumActions);
            if (randomize) forced[i] = a;
        }
    }

    greedy_votes(online_, obs, votes, config_.exec);
    int switch_votes = 0;
    for (int i = 0; i < n; ++i) {
        const int vote = forced[i] >= 0 ? forced[i] : votes[i];
        if (vote == 1) ++switch_votes;
    }
    ++decisions_;
    // Strict majority switches; ties keep the current phase.
    return Action{2 * switch_votes > n};
}

std::vector<double> EnsembleAgent::compute_targets(const std::vector<Transition>& batch,
                                                   std::span<const int> subset) const {
    std::vector<Observation> next_obs;
    std::vector<double> rewards;
    next_obs.reserve(batch.size());
    rewards.reserve(batch.size());
    for (const Transition& t : batch) {
        next_obs.push_back(t.s_next);
        rewards.push_back(t.r);
    }
    std::vector<double> y(batch.size(), 0.0);
    double_q_targets(online_, target_, subset, next_obs, rewards, config_.gamma, y,
                     config_.exec);
    return y;
}

std::vector<int> EnsembleAgent::sample_subset() {
    std::vector<int> pool(config_.ensemble_size);
    std::iota(pool.begin(), pool.end(), 0);
    for (int k = 0; k < config_.in_target; ++k) {
        const int j = k + sample_rng_.index(config_.ensemble_size - k);
        std::swap(pool[k], pool[j]);
    }
    pool.resize(config_.in_target);
    std::sort(pool.begin(), pool.end());
    return pool;
}

UpdateStats EnsembleAgent::update() {
    UpdateStats stats;
    if (buffer_.size() < static_cast<std::size_t>(config_.batch_size)) {
        stats.skipped = true;
        return stats;
    }
    stats.mean_losses.reserve(config_.utd_ratio);
    std::vector<double> losses(config_.ensemble_size, 0.0);

    for (int g = 0; g < config_.utd_ratio; ++g) {
        const auto indices = buffer_.sample_indices(config_.batch_size, sample_rng_);
        const auto subset = sample_subset();

        std::vector<Transition> batch;
        batch.reserve(indices.size());
        for (std::size_t idx : indices) batch.push_back(buffer_.at(idx));

        const auto y = compute_targets(batch, subset);

        TrainBatch train;
        train.inputs.reserve(batch.size());
        train.action_indices.reserve(batch.size());
        for (const Transition& t : batch) {
            train.inputs.push_back(t.s);
            train.action_indices.push_back(t.a.index());
        }
        train.targets = y;

        const double mean_loss =
            train_members(online_, train, config_.learning_rate, losses, config_.exec);
        soft_update_members(target_, online_, config_.rho, config_.exec);
        stats.mean_losses.push_back(mean_loss);
        ++update_iterations_;
    }
    return stats;
}

nlohmann::json EnsembleAgent::checkpoint() const {
    nlohmann::json j;
    j["n"] = config_.ensemble_size;
    j["m"] = config_.in_target;
    j["g"] = config_.utd_ratio;
    j["gamma"] = config_.gamma;
    j["epsilon"] = config_.epsilon;
    j["rho"] = config_.rho;
    j["batch_size"] = config_.batch_size;
    j["learning_rate"] = config_.learning_rate;
    j["memory"] = config_.memory;
    j["dims"] = config_.dims;
    j["seed"] = master_seed_;
    j["update_iterations"] = update_iterations_;
    j["decisions"] = decisions_;
    j["online"] = nlohmann::json::array();
    j["target"] = nlohmann::json::array();
    for (const Mlp& net : online_) j["online"].push_back(net.to_json());
    for (const Mlp& net : target_) j["target"].push_back(net.to_json());
    return j;
}

EnsembleAgent EnsembleAgent::restore(const nlohmann::json& j) {
    AgentConfig cfg;
    cfg.ensemble_size = j.at("n").get<int>();
    cfg.in_target = j.at("m").get<int>();
    cfg.utd_ratio = j.at("g").get<int>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.rho = j.at("rho").get<double>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.memory = j.at("memory").get<std::size_t>();
    cfg.dims = j.at("dims").get<std::vector<int>>();
    EnsembleAgent agent(cfg, j.at("seed").get<std::uint64_t>());
    agent.update_iterations_ = j.at("update_iterations").get<std::int64_t>();
    agent.decisions_ = j.at("decisions").get<std::int64_t>();
    for (int i = 0; i < cfg.ensemble_size; ++i) {
        agent.online_[i] = Mlp::from_json(j.at("online")[i]);
        agent.target_[i] = Mlp::from_json(j.at("target")[i]);
    }
    return agent;
}

namespace {

EpisodeStats run_episode(EnsembleAgent& agent, TrafficEnv& env, int horizon_steps,
                         bool learn) {
    EpisodeStats stats;
    stats.rewards.reserve(horizon_steps);
    stats.queued.reserve(horizon_steps);
    Observation s = env.observe_state();
    for (int step = 0; step < horizon_steps; ++step) {
        const Action a = agent.act(s, learn);
        StepResult res = env.step(a);
        if (learn) {
            agent.record(Transition{s, a, res.reward.total, res.obs});
            const UpdateStats up = agent.update();
            double mean = 0.0;
            for (double l : up.mean_losses) mean += l;
            stats.mean_losses.push_back(up.mean_losses.empty()
                                            ? 0.0
                                            : mean / static_cast<double>(up.mean_losses.size()));
        } else {
            stats.mean_losses.push_back(0.0);
        }
        stats.rewards.push_back(res.reward.total);
        stats.queued.push_back(env.sim().total_queued());
        stats.switched.push_back(a.index());
        stats.reward_sum += res.reward.total;
        s = std::move(res.obs);
    }
    return stats;
}

}  // namespace

EpisodeStats train_episode(EnsembleAgent& agent, TrafficEnv& env, int horizon_steps) {
    return run_episode(agent, env, horizon_steps, true);
}

EpisodeStats evaluate_episode(EnsembleAgent& agent, TrafficEnv& env, int horizon_steps) {
    return run_episode(agent, env, horizon_steps, false);
}

}  // namespace relight
