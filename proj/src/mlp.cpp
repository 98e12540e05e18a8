#include "relight/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "relight/rng.hpp"

namespace relight {

void TrainBatch::validate(int input_dim, int output_dim) const {
    if (inputs.size() != action_indices.size() || inputs.size() != targets.size())
        throw std::domain_error("train batch fields must have equal length");
    for (const auto& x : inputs)
        if (static_cast<int>(x.size()) != input_dim)
            throw std::domain_error("train batch input dimension mismatch");
    for (int a : action_indices)
        if (a < 0 || a >= output_dim) throw std::domain_error("action index out of range");
    for (double y : targets)
        if (!std::isfinite(y)) throw std::domain_error("non-finite training target");
}

Mlp::Mlp(std::vector<int> dims, std::uint64_t seed) : dims_(std::move(dims)), seed_(seed) {
    if (dims_.size() < 2) throw std::invalid_argument("network needs at least two layers");
    for (int d : dims_)
        if (d <= 0) throw std::invalid_argument("layer dimensions must be positive");

    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        weight_offset_.push_back(total);
        total += static_cast<std::size_t>(dims_[l + 1]) * dims_[l];
        bias_offset_.push_back(total);
        total += static_cast<std::size_t>(dims_[l + 1]);
    }
    params_.resize(total);

    // Zero-mean uniform scaled by fan-in, for weights and biases alike.
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const double bound = std::sqrt(1.0 / dims_[l]);
        const std::size_t count =
            static_cast<std::size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
        for (std::size_t k = 0; k < count; ++k)
            params_[weight_offset_[l] + k] = rng.uniform(-bound, bound);
    }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != input_dim())
        throw std::domain_error("input dimension mismatch");
    std::vector<double> act(input.begin(), input.end());
    std::vector<double> next;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const int in = dims_[l];
        const int out = dims_[l + 1];
        const double* w = params_.data() + weight_offset_[l];
        const double* b = params_.data() + bias_offset_[l];
        const bool hidden = (l + 2 < dims_.size());
        next.assign(out, 0.0);
        for (int j = 0; j < out; ++j) {
            double z = b[j];
            const double* row = w + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) z += row[k] * act[k];
            next[j] = hidden ? (z > 0.0 ? z : 0.0) : z;
        }
        act.swap(next);
    }
    return act;
}

double Mlp::batch_loss(const TrainBatch& batch) const {
    batch.validate(input_dim(), output_dim());
    if (batch.size() == 0) return 0.0;
    double loss = 0.0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        const auto q = forward(batch.inputs[s]);
        const double diff = q[batch.action_indices[s]] - batch.targets[s];
        loss += diff * diff;
    }
    return loss / static_cast<double>(batch.size());
}

double Mlp::loss_and_gradient(const TrainBatch& batch, std::vector<double>& grad) const {
    batch.validate(input_dim(), output_dim());
    grad.assign(params_.size(), 0.0);
    if (batch.size() == 0) return 0.0;

    const std::size_t layers = dims_.size() - 1;
    // Per-sample activations, layer by layer (post-rectifier for hidden).
    std::vector<std::vector<double>> act(layers + 1);
    std::vector<double> delta, delta_prev;
    double loss = 0.0;

    for (std::size_t s = 0; s < batch.size(); ++s) {
        act[0].assign(batch.inputs[s].begin(), batch.inputs[s].end());
        for (std::size_t l = 0; l < layers; ++l) {
            const int in = dims_[l];
            const int out = dims_[l + 1];
            const double* w = params_.data() + weight_offset_[l];
            const double* b = params_.data() + bias_offset_[l];
            const bool hidden = (l + 1 < layers);
            act[l + 1].assign(out, 0.0);
            for (int j = 0; j < out; ++j) {
                double z = b[j];
                const double* row = w + static_cast<std::size_t>(j) * in;
                for (int k = 0; k < in; ++k) z += row[k] * act[l][k];
                act[l + 1][j] = hidden ? (z > 0.0 ? z : 0.0) : z;
            }
        }

        // Loss only touches the chosen action's output.
        const int a = batch.action_indices[s];
        const double diff = act[layers][a] - batch.targets[s];
        loss += diff * diff;
        delta.assign(dims_.back(), 0.0);
        delta[a] = 2.0 * diff / static_cast<double>(batch.size());

        for (std::size_t l = layers; l-- > 0;) {
            const int in = dims_[l];
            const int out = dims_[l + 1];
            double* gw = grad.data() + weight_offset_[l];
            double* gb = grad.data() + bias_offset_[l];
            for (int j = 0; j < out; ++j) {
                const double d = delta[j];
                if (d == 0.0) continue;
                double* grow = gw + static_cast<std::size_t>(j) * in;
                for (int k = 0; k < in; ++k) grow[k] += d * act[l][k];
                gb[j] += d;
            }
            if (l == 0) break;
            const double* w = params_.data() + weight_offset_[l];
            delta_prev.assign(in, 0.0);
            for (int j = 0; j < out; ++j) {
                const double d = delta[j];
                if (d == 0.0) continue;
                const double* row = w + static_cast<std::size_t>(j) * in;
                for (int k = 0; k < in; ++k) delta_prev[k] += d * row[k];
            }
            // Rectifier gate of the layer below.
            for (int k = 0; k < in; ++k)
                if (act[l][k] <= 0.0) delta_prev[k] = 0.0;
            delta.swap(delta_prev);
        }
    }
    return loss / static_cast<double>(batch.size());
}

double Mlp::train_step(const TrainBatch& batch, double lr) {
    std::vector<double> grad;
    const double loss = loss_and_gradient(batch, grad);

    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    const double scale = (norm > kGradClipNorm) ? kGradClipNorm / norm : 1.0;

    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= lr * scale * grad[i];
    return loss;
}

void soft_update(Mlp& target, const Mlp& online, double rho) {
    if (target.dims_ != online.dims_) throw std::domain_error("architecture mismatch");
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("rho must lie in [0,1]");
    for (std::size_t i = 0; i < target.params_.size(); ++i)
        target.params_[i] = rho * target.params_[i] + (1.0 - rho) * online.params_[i];
}

nlohmann::json Mlp::to_json() const {
    nlohmann::json j;
    j["dims"] = dims_;
    j["seed"] = seed_;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        nlohmann::json layer;
        nlohmann::json rows = nlohmann::json::array();
        for (int jout = 0; jout < dims_[l + 1]; ++jout) {
            const double* row = params_.data() + weight_offset_[l] +
                                static_cast<std::size_t>(jout) * dims_[l];
            rows.push_back(std::vector<double>(row, row + dims_[l]));
        }
        layer["weights"] = rows;
        const double* b = params_.data() + bias_offset_[l];
        layer["bias"] = std::vector<double>(b, b + dims_[l + 1]);
        layers.push_back(layer);
    }
    j["layers"] = layers;
    return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
    Mlp net(j.at("dims").get<std::vector<int>>(), j.at("seed").get<std::uint64_t>());
    const auto& layers = j.at("layers");
    if (layers.size() != net.dims_.size() - 1)
        throw std::invalid_argument("checkpoint layer count mismatch");
    for (std::size_t l = 0; l + 1 < net.dims_.size(); ++l) {
        const auto& layer = layers[l];
        for (int jout = 0; jout < net.dims_[l + 1]; ++jout) {
            const auto row = layer.at("weights")[jout].get<std::vector<double>>();
            if (static_cast<int>(row.size()) != net.dims_[l])
                throw std::invalid_argument("checkpoint weight shape mismatch");
            std::copy(row.begin(), row.end(),
                      net.params_.begin() + net.weight_offset_[l] +
                          static_cast<std::size_t>(jout) * net.dims_[l]);
        }
        const auto bias = layer.at("bias").get<std::vector<double>>();
        if (static_cast<int>(bias.size()) != net.dims_[l + 1])
            throw std::invalid_argument("checkpoint bias shape mismatch");
        std::copy(bias.begin(), bias.end(), net.params_.begin() + net.bias_offset_[l]);
    }
    return net;
}

}  // namespace relight
