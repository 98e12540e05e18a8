#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "relight/flow.hpp"
#include "relight/rng.hpp"

namespace relight {

enum class Phase { WEG = 0, NSG = 1 };

inline Phase toggled(Phase p) { return p == Phase::WEG ? Phase::NSG : Phase::WEG; }

inline bool is_green(Phase p, Approach a) {
    const bool we = (a == Approach::E || a == Approach::W);
    return (p == Phase::WEG) ? we : !we;
}

inline ApproachGroup group_of(Approach a) {
    return (a == Approach::E || a == Approach::W) ? ApproachGroup::WE : ApproachGroup::NS;
}

const char* to_string(Phase p);

constexpr int kNumApproaches = 4;

struct SimConfig {
    double road_length = 150.0;       // m
    int lanes_per_approach = 3;       // entry lanes per direction
    double free_flow_speed = 13.89;   // m/s
    double saturation_headway = 2.0;  // s between queue-head releases per lane
    double yellow_duration = 3.0;     // s, fixed by the signal plan
    double tick = 1.0;                // s

    int entry_lane_count() const { return kNumApproaches * lanes_per_approach; }
    void validate() const;  // throws std::invalid_argument
};

// Thrown when a phase change is commanded while a yellow is running.
struct SwitchInProgress : std::runtime_error {
    SwitchInProgress() : std::runtime_error("signal change already in progress") {}
};

struct Vehicle {
    std::int64_t id = 0;
    Approach approach = Approach::E;
    int lane_index = 0;
    double spawn_time = 0.0;
    double position = 0.0;  // m from approach entry; road_length = stop line
    std::optional<double> queued_since;
    std::optional<double> exit_time;
};

struct Lane {
    Approach approach = Approach::E;
    int index = 0;
    std::deque<std::int64_t> queue;          // FIFO, head departs first
    std::vector<std::int64_t> approaching;   // still driving, join order
    double head_since = 0.0;                 // when the current head reached the head slot
    double last_release = -1e18;

    int total() const { return static_cast<int>(queue.size() + approaching.size()); }
};

// Per-lane aggregates plus interval departure totals. The departure fields
// cover everything departed since the previous snapshot() call.
struct TrafficSnapshot {
    double time = 0.0;
    Phase phase = Phase::WEG;
    bool in_yellow = false;
    Phase next_phase = Phase::NSG;
    std::vector<double> queue_len;     // l_i, vehicles
    std::vector<double> queued_count;  // n_i; equals l_i under point-queue dynamics
    std::vector<double> wait_min;      // w_i, minutes
    std::vector<double> delay;         // d_i in [0,1]
    std::int64_t departed_count = 0;         // N
    double departed_travel_min = 0.0;        // T, minutes
};

struct TickStats {
    double time = 0.0;
    double total_queued = 0.0;
    double mean_delay = 0.0;
    std::int64_t departed = 0;
};

struct DepartureRecord {
    double spawn_time = 0.0;
    double exit_time = 0.0;
};

// Deterministic point-queue microsimulator of one four-way intersection.
//
// Dynamics per tick, in order: queue discharge, free-flow movement of
// approaching vehicles (clamped at the stop line, where they join the
// lane's vertical FIFO queue), demand spawning, then signal bookkeeping.
// A lane's head vehicle is released at time t when its approach is green,
// no yellow is running, t >= head_since + saturation_headway, and
// t >= last_release + saturation_headway.
//
// A handle is single-threaded; independent handles share no state.
class TrafficSim {
public:
    TrafficSim(SimConfig config, FlowSpec flow, std::uint64_t seed);

    void advance_tick();

    // Requests a phase change. No-op for request_switch=false; otherwise a
    // 3 s yellow starts during which no lane discharges, then the phase
    // toggles and time_in_phase resets.
    void command_signal(bool request_switch);

    TrafficSnapshot snapshot();

    // Injects one vehicle at the approach entry, least-occupied lane first.
    // Test and replay hook; flow-driven spawning uses the same path.
    std::int64_t spawn_vehicle(Approach a);

    double time() const { return time_; }
    Phase phase() const { return phase_; }
    bool in_yellow() const { return in_yellow_; }
    double time_in_phase() const { return time_in_phase_; }

    std::int64_t spawned_total() const { return spawned_total_; }
    std::int64_t departed_total() const { return static_cast<std::int64_t>(departures_.size()); }
    std::int64_t in_network() const { return static_cast<std::int64_t>(vehicles_.size()); }
    double total_queued() const;

    const SimConfig& config() const { return config_; }
    const std::vector<Lane>& lanes() const { return lanes_; }
    const Vehicle& vehicle(std::int64_t id) const { return vehicles_.at(id); }
    const std::vector<DepartureRecord>& departures() const { return departures_; }
    const std::vector<TickStats>& tick_trace() const { return tick_trace_; }

    std::vector<double> queue_lengths() const;
    // Spawn times of vehicles still in the network, in lane/queue order.
    std::vector<double> in_network_spawn_times() const;

    int lane_id(Approach a, int index) const {
        return static_cast<int>(a) * config_.lanes_per_approach + index;
    }

private:
    struct IntervalState {
        std::int64_t emitted = 0;  // vehicles emitted so far (drives alternation too)
    };

    void discharge(double now);
    void move_vehicles(double now);
    void spawn_from_flow(double now);
    void settle_signal(double now);
    void record_tick_stats(double now);
    double lane_delay(const Lane& lane) const;
    Approach alternating_approach(ApproachGroup g, std::int64_t k) const;

    SimConfig config_;
    FlowSpec flow_;
    Rng rng_;

    double time_ = 0.0;
    Phase phase_ = Phase::WEG;
    bool in_yellow_ = false;
    double yellow_end_ = 0.0;
    double time_in_phase_ = 0.0;

    std::vector<Lane> lanes_;
    std::unordered_map<std::int64_t, Vehicle> vehicles_;  // in-network only
    std::vector<DepartureRecord> departures_;
    std::vector<TickStats> tick_trace_;

    std::vector<IntervalState> interval_state_;
    std::size_t arrival_cursor_ = 0;

    std::int64_t next_vehicle_id_ = 0;
    std::int64_t spawned_total_ = 0;
    double departed_travel_sum_min_ = 0.0;

    // snapshot() delta markers
    std::int64_t snap_departed_marker_ = 0;
    double snap_travel_marker_min_ = 0.0;
};

}  // namespace relight
