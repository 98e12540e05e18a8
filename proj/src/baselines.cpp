#include "relight/baselines.hpp"

#include <stdexcept>

namespace relight {

FixedCycleController::FixedCycleController(double green_we, double green_ns)
    : green_we_(green_we), green_ns_(green_ns) {
    if (green_we_ <= 0.0 || green_ns_ <= 0.0)
        throw std::invalid_argument("green durations must be positive");
}

Action FixedCycleController::act(Phase current, double time_in_phase) const {
    return Action{time_in_phase >= green_duration(current)};
}

SotlController::SotlController(Params params, double action_interval)
    : params_(params), action_interval_(action_interval) {
    if (params_.theta <= 0.0 || params_.phi_min <= 0.0 || params_.mu <= 0.0)
        throw std::invalid_argument("SOTL parameters must be positive");
}

Action SotlController::act(std::span<const double> queue_lengths, Phase current,
                           double time_in_phase, int lanes_per_approach) {
    double red_queued = 0.0;
    double green_queued = 0.0;
    for (std::size_t i = 0; i < queue_lengths.size(); ++i) {
        const auto approach = static_cast<Approach>(i / lanes_per_approach);
        if (is_green(current, approach))
            green_queued += queue_lengths[i];
        else
            red_queued += queue_lengths[i];
    }

    accumulator_ += red_queued * action_interval_;
    const bool demand_met = accumulator_ >= params_.theta;
    const bool min_green_met = time_in_phase >= params_.phi_min;
    const bool no_platoon_cut = green_queued <= params_.mu;
    if (demand_met && min_green_met && no_platoon_cut) {
        accumulator_ = 0.0;
        return Action{true};
    }
    return Action{false};
}

}  // namespace relight
