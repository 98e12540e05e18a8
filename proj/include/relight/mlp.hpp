#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "relight/env.hpp"

namespace relight {

// Gradients are clipped to this global L2 norm before each descent step.
constexpr double kGradClipNorm = 10.0;

struct TrainBatch {
    std::vector<Observation> inputs;
    std::vector<int> action_indices;  // which Q output each target refers to
    std::vector<double> targets;

    std::size_t size() const { return inputs.size(); }
    void validate(int input_dim, int output_dim) const;
};

// Small feedforward Q-network: rectifier hidden layers, identity output,
// analytic backpropagation, plain SGD. Parameters live in one flat vector
// (per layer: row-major [out x in] weights, then biases) so soft updates,
// checkpoints, and finite-difference probes all see the same layout.
class Mlp {
public:
    Mlp(std::vector<int> dims, std::uint64_t seed);

    const std::vector<int>& dims() const { return dims_; }
    std::uint64_t seed() const { return seed_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    std::size_t parameter_count() const { return params_.size(); }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    std::vector<double> forward(std::span<const double> input) const;

    // Mean squared error of the chosen-action outputs against the targets.
    double batch_loss(const TrainBatch& batch) const;

    // Writes the analytic gradient of batch_loss into grad (resized to
    // parameter_count) and returns the loss.
    double loss_and_gradient(const TrainBatch& batch, std::vector<double>& grad) const;

    // One SGD step with global-norm clipping; returns the pre-step loss.
    double train_step(const TrainBatch& batch, double lr);

    nlohmann::json to_json() const;
    static Mlp from_json(const nlohmann::json& j);

private:
    friend void soft_update(Mlp& target, const Mlp& online, double rho);

    std::vector<int> dims_;
    std::uint64_t seed_;
    std::vector<double> params_;
    std::vector<std::size_t> weight_offset_;  // per layer
    std::vector<std::size_t> bias_offset_;
};

// target <- rho * target + (1 - rho) * online, elementwise.
void soft_update(Mlp& target, const Mlp& online, double rho);

}  // namespace relight
