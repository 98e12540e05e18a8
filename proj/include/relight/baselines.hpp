#pragma once

#include "relight/env.hpp"

namespace relight {

// Fixed-cycle control: hold each green for its configured duration, then
// switch at the first decision boundary where the duration is met.
class FixedCycleController {
public:
    FixedCycleController(double green_we = 30.0, double green_ns = 30.0);

    Action act(Phase current, double time_in_phase) const;

    double green_duration(Phase p) const { return p == Phase::WEG ? green_we_ : green_ns_; }

private:
    double green_we_;
    double green_ns_;
};

// Self-organizing traffic light: integrate red-side demand over time and
// switch once it crosses theta, provided the green has run at least
// phi_min seconds and at most mu vehicles still demand the green.
class SotlController {
public:
    struct Params {
        double theta = 50.0;    // vehicle-seconds of integrated red demand
        double phi_min = 10.0;  // minimum green, s
        double mu = 3.0;        // green-side demand cutoff, vehicles
    };

    SotlController(Params params, double action_interval = 5.0);

    // Queue lengths in the simulator's lane order; mutates the demand
    // accumulator and resets it when a switch is issued.
    Action act(std::span<const double> queue_lengths, Phase current, double time_in_phase,
               int lanes_per_approach);

    double accumulator() const { return accumulator_; }
    void reset() { accumulator_ = 0.0; }
    const Params& params() const { return params_; }

private:
    Params params_;
    double action_interval_;
    double accumulator_ = 0.0;
};

}  // namespace relight
