#include "relight/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace relight {

const char* to_string(ExecPolicy p) { return p == ExecPolicy::Serial ? "serial" : "openmp"; }

namespace {

template <typename F>
void for_each_index(int n, ExecPolicy policy, F&& fn) {
#ifdef _OPENMP
    if (policy == ExecPolicy::OpenMp) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
#else
    (void)policy;
#endif
    for (int i = 0; i < n; ++i) fn(i);
}

int argmax(std::span<const double> q) {
    return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

}  // namespace

void greedy_votes(const std::vector<Mlp>& nets, const Observation& obs,
                  std::span<int> votes, ExecPolicy policy) {
    if (votes.size() != nets.size()) throw std::domain_error("votes span size mismatch");
    for_each_index(static_cast<int>(nets.size()), policy,
                   [&](int i) { votes[i] = argmax(nets[i].forward(obs)); });
}

void double_q_targets(const std::vector<Mlp>& online, const std::vector<Mlp>& targets,
                      std::span<const int> subset,
                      const std::vector<Observation>& next_obs,
                      std::span<const double> rewards, double gamma,
                      std::span<double> y_out, ExecPolicy policy) {
    if (subset.empty()) throw std::domain_error("target subset must be non-empty");
    for (int m : subset)
        if (m < 0 || m >= static_cast<int>(online.size()))
            throw std::domain_error("target subset index out of range");
    if (next_obs.size() != rewards.size() || next_obs.size() != y_out.size())
        throw std::domain_error("target batch size mismatch");

    for_each_index(static_cast<int>(next_obs.size()), policy, [&](int j) {
        double min_q = 0.0;
        bool first = true;
        for (int m : subset) {  // fixed ascending order keeps the min reduction exact
            const auto q_online = online[m].forward(next_obs[j]);
            const int a_max = argmax(q_online);
            const double candidate = targets[m].forward(next_obs[j])[a_max];
            if (first || candidate < min_q) min_q = candidate;
            first = false;
        }
        y_out[j] = rewards[j] + gamma * min_q;
    });
}

double train_members(std::vector<Mlp>& nets, const TrainBatch& batch, double lr,
                     std::span<double> losses, ExecPolicy policy) {
    if (losses.size() != nets.size()) throw std::domain_error("losses span size mismatch");
    for_each_index(static_cast<int>(nets.size()), policy,
                   [&](int i) { losses[i] = nets[i].train_step(batch, lr); });
    double mean = 0.0;
    for (double l : losses) mean += l;
    return nets.empty() ? 0.0 : mean / static_cast<double>(nets.size());
}

void soft_update_members(std::vector<Mlp>& targets, const std::vector<Mlp>& online,
                         double rho, ExecPolicy policy) {
    if (targets.size() != online.size()) throw std::domain_error("ensemble size mismatch");
    for_each_index(static_cast<int>(targets.size()), policy,
                   [&](int i) { soft_update(targets[i], online[i], rho); });
}

}  // namespace relight
