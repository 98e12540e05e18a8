#pragma once

#include <span>
#include <vector>

#include "relight/mlp.hpp"

namespace relight {

// All ensemble-wide loops run through these kernels. Each member's
// arithmetic is self-contained and results are combined in fixed member
// order, so Serial and OpenMp produce bit-identical output.
enum class ExecPolicy { Serial, OpenMp };

const char* to_string(ExecPolicy p);

// Greedy action (argmax of the Q outputs, lowest index on ties) for every
// member, written to votes[i].
void greedy_votes(const std::vector<Mlp>& nets, const Observation& obs,
                  std::span<int> votes, ExecPolicy policy);

// Double-Q bootstrap targets, parallel over transitions:
//   y[j] = rewards[j] + gamma * min_{m in subset}
//            target[m](next_obs[j])[argmax online[m](next_obs[j])]
void double_q_targets(const std::vector<Mlp>& online, const std::vector<Mlp>& targets,
                      std::span<const int> subset,
                      const std::vector<Observation>& next_obs,
                      std::span<const double> rewards, double gamma,
                      std::span<double> y_out, ExecPolicy policy);

// One SGD step on every member against the shared batch; losses[i] gets
// member i's pre-step loss. Returns the mean loss across members.
double train_members(std::vector<Mlp>& nets, const TrainBatch& batch, double lr,
                     std::span<double> losses, ExecPolicy policy);

// Polyak blend of every target toward its online twin.
void soft_update_members(std::vector<Mlp>& targets, const std::vector<Mlp>& online,
                         double rho, ExecPolicy policy);

}  // namespace relight
