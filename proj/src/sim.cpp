#include "relight/sim.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

namespace {
constexpr double kEps = 1e-9;
}

const char* to_string(Phase p) { return p == Phase::WEG ? "WEG" : "NSG"; }

void SimConfig::validate() const {
    if (!(road_length > 0.0)) throw std::invalid_argument("road_length must be positive");
    if (lanes_per_approach < 1) throw std::invalid_argument("lanes_per_approach must be >= 1");
    if (!(free_flow_speed > 0.0)) throw std::invalid_argument("free_flow_speed must be positive");
    if (!(saturation_headway > 0.0)) throw std::invalid_argument("saturation_headway must be positive");
    if (std::abs(yellow_duration - 3.0) > kEps)
        throw std::invalid_argument("yellow_duration is fixed at 3 s");
    if (!(tick > 0.0)) throw std::invalid_argument("tick must be positive");
}

TrafficSim::TrafficSim(SimConfig config, FlowSpec flow, std::uint64_t seed)
    : config_(config), flow_(std::move(flow)), rng_(Rng::derive(seed, 0)) {
    config_.validate();
    flow_.validate();
    lanes_.reserve(config_.entry_lane_count());
    for (int a = 0; a < kNumApproaches; ++a)
        for (int i = 0; i < config_.lanes_per_approach; ++i)
            lanes_.push_back(Lane{static_cast<Approach>(a), i, {}, {}, 0.0, -1e18});
    interval_state_.assign(flow_.intervals.size(), IntervalState{});
}

Approach TrafficSim::alternating_approach(ApproachGroup g, std::int64_t k) const {
    if (g == ApproachGroup::WE) return (k % 2 == 0) ? Approach::W : Approach::E;
    return (k % 2 == 0) ? Approach::N : Approach::S;
}

std::int64_t TrafficSim::spawn_vehicle(Approach a) {
    // Least-occupied entry lane of the approach, lowest index on ties.
    Lane* best = nullptr;
    for (int i = 0; i < config_.lanes_per_approach; ++i) {
        Lane& lane = lanes_[lane_id(a, i)];
        if (best == nullptr || lane.total() < best->total()) best = &lane;
    }
    const std::int64_t id = next_vehicle_id_++;
    Vehicle v;
    v.id = id;
    v.approach = a;
    v.lane_index = best->index;
    v.spawn_time = time_;
    v.position = 0.0;
    vehicles_.emplace(id, v);
    best->approaching.push_back(id);
    ++spawned_total_;
    return id;
}

void TrafficSim::discharge(double now) {
    if (in_yellow_) return;  // no lane discharges under yellow
    for (Lane& lane : lanes_) {
        if (lane.queue.empty() || !is_green(phase_, lane.approach)) continue;
        if (now + kEps < lane.head_since + config_.saturation_headway) continue;
        if (now + kEps < lane.last_release + config_.saturation_headway) continue;
        const std::int64_t id = lane.queue.front();
        lane.queue.pop_front();
        Vehicle& v = vehicles_.at(id);
        v.exit_time = now;
        departures_.push_back({v.spawn_time, now});
        departed_travel_sum_min_ += (now - v.spawn_time) / 60.0;
        vehicles_.erase(id);
        lane.last_release = now;
        if (!lane.queue.empty()) lane.head_since = now;
    }
}

void TrafficSim::move_vehicles(double now) {
    const double step = config_.free_flow_speed * config_.tick;
    for (Lane& lane : lanes_) {
        std::vector<std::int64_t> still_driving;
        still_driving.reserve(lane.approaching.size());
        for (std::int64_t id : lane.approaching) {
            Vehicle& v = vehicles_.at(id);
            const double next_pos = v.position + step;
            if (next_pos + kEps >= config_.road_length) {
                // Reached the stop line: join the vertical FIFO queue.
                v.position = config_.road_length;
                v.queued_since = now;
                if (lane.queue.empty()) lane.head_since = now;
                lane.queue.push_back(id);
            } else {
                v.position = next_pos;
                still_driving.push_back(id);
            }
        }
        lane.approaching = std::move(still_driving);
    }
}

void TrafficSim::spawn_from_flow(double now) {
    for (std::size_t k = 0; k < flow_.intervals.size(); ++k) {
        const FlowInterval& ivl = flow_.intervals[k];
        IntervalState& st = interval_state_[k];
        if (now <= ivl.begin + kEps) continue;
        if (ivl.mode == FlowMode::Deterministic) {
            const double elapsed = std::min(now, ivl.end) - ivl.begin;
            while (static_cast<double>(st.emitted + 1) <= ivl.rate * elapsed + kEps) {
                spawn_vehicle(alternating_approach(ivl.group, st.emitted));
                ++st.emitted;
            }
        } else {
            if (now > ivl.end + kEps) continue;
            const double p = std::min(ivl.rate * config_.tick, 1.0);
            if (rng_.bernoulli(p)) {
                spawn_vehicle(alternating_approach(ivl.group, st.emitted));
                ++st.emitted;
            }
        }
    }
    while (arrival_cursor_ < flow_.arrivals.size() &&
           flow_.arrivals[arrival_cursor_].t <= now + kEps) {
        spawn_vehicle(flow_.arrivals[arrival_cursor_].approach);
        ++arrival_cursor_;
    }
}

void TrafficSim::settle_signal(double now) {
    if (in_yellow_) {
        if (now + kEps >= yellow_end_) {
            phase_ = toggled(phase_);
            in_yellow_ = false;
            time_in_phase_ = 0.0;
        }
    } else {
        time_in_phase_ += config_.tick;
    }
}

double TrafficSim::lane_delay(const Lane& lane) const {
    // Queued vehicles are stopped; approaching vehicles travel at free flow,
    // so the normalized mean-speed delay reduces to the queued fraction.
    const int total = lane.total();
    if (total == 0) return 0.0;
    return static_cast<double>(lane.queue.size()) / static_cast<double>(total);
}

void TrafficSim::record_tick_stats(double now) {
    TickStats s;
    s.time = now;
    double delay_sum = 0.0;
    for (const Lane& lane : lanes_) {
        s.total_queued += static_cast<double>(lane.queue.size());
        delay_sum += lane_delay(lane);
    }
    s.mean_delay = delay_sum / static_cast<double>(lanes_.size());
    tick_trace_.push_back(s);
}

void TrafficSim::advance_tick() {
    const double now = time_ + config_.tick;
    const std::int64_t departed_before = departed_total();
    time_ = now;
    discharge(now);
    move_vehicles(now);
    spawn_from_flow(now);
    settle_signal(now);
    record_tick_stats(now);
    tick_trace_.back().departed = departed_total() - departed_before;
}

void TrafficSim::command_signal(bool request_switch) {
    if (!request_switch) return;
    if (in_yellow_) throw SwitchInProgress{};
    in_yellow_ = true;
    yellow_end_ = time_ + config_.yellow_duration;
}

TrafficSnapshot TrafficSim::snapshot() {
    TrafficSnapshot snap;
    snap.time = time_;
    snap.phase = phase_;
    snap.in_yellow = in_yellow_;
    snap.next_phase = toggled(phase_);
    const int n = config_.entry_lane_count();
    snap.queue_len.resize(n);
    snap.queued_count.resize(n);
    snap.wait_min.resize(n);
    snap.delay.resize(n);
    for (int i = 0; i < n; ++i) {
        const Lane& lane = lanes_[i];
        snap.queue_len[i] = static_cast<double>(lane.queue.size());
        snap.queued_count[i] = snap.queue_len[i];
        double wait_s = 0.0;
        for (std::int64_t id : lane.queue) wait_s += time_ - *vehicles_.at(id).queued_since;
        snap.wait_min[i] = wait_s / 60.0;
        snap.delay[i] = lane_delay(lane);
    }
    snap.departed_count = departed_total() - snap_departed_marker_;
    snap.departed_travel_min = departed_travel_sum_min_ - snap_travel_marker_min_;
    snap_departed_marker_ = departed_total();
    snap_travel_marker_min_ = departed_travel_sum_min_;
    return snap;
}

double TrafficSim::total_queued() const {
    double q = 0.0;
    for (const Lane& lane : lanes_) q += static_cast<double>(lane.queue.size());
    return q;
}

std::vector<double> TrafficSim::queue_lengths() const {
    std::vector<double> out;
    out.reserve(lanes_.size());
    for (const Lane& lane : lanes_) out.push_back(static_cast<double>(lane.queue.size()));
    return out;
}

std::vector<double> TrafficSim::in_network_spawn_times() const {
    std::vector<double> out;
    out.reserve(vehicles_.size());
    for (const Lane& lane : lanes_) {
        for (std::int64_t id : lane.queue) out.push_back(vehicles_.at(id).spawn_time);
        for (std::int64_t id : lane.approaching) out.push_back(vehicles_.at(id).spawn_time);
    }
    return out;
}

}  // namespace relight
