#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace relight {

enum class Approach { N = 0, S = 1, E = 2, W = 3 };
enum class ApproachGroup { WE, NS };
enum class FlowMode { Deterministic, Bernoulli };

const char* to_string(Approach a);
const char* to_string(ApproachGroup g);
const char* to_string(FlowMode m);
Approach approach_from_string(const std::string& s);

// One demand interval for an approach group. In deterministic mode a
// vehicle is emitted each time rate * elapsed crosses an integer; in
// bernoulli mode each tick draws at most one arrival for the group with
// probability rate * tick (capped at 1).
struct FlowInterval {
    double begin = 0.0;  // s
    double end = 0.0;    // s, exclusive of begin: begin < end
    ApproachGroup group = ApproachGroup::WE;
    FlowMode mode = FlowMode::Deterministic;
    double rate = 0.0;  // vehicles/s for the whole group
};

// Explicit single arrival, replayed exactly at time t.
struct ExplicitArrival {
    double t = 0.0;
    Approach approach = Approach::E;
};

struct FlowSpec {
    std::vector<FlowInterval> intervals;
    std::vector<ExplicitArrival> arrivals;  // kept sorted by t

    void validate() const;  // throws std::invalid_argument
    bool empty() const { return intervals.empty() && arrivals.empty(); }

    // Interval endpoints multiplied by f; rates and explicit arrival times
    // untouched, so demand intensity is preserved while the horizon shrinks.
    FlowSpec scaled(double f) const;

    nlohmann::json to_json() const;
    static FlowSpec from_json(const nlohmann::json& j);
    static FlowSpec load_file(const std::string& path);
    void save_file(const std::string& path) const;
};

// Shipped demand programs: "switch", "equal", "unequal", "synthetic"
// (all deterministic-mode, paper-scale horizons) plus "hangzhou"
// (bernoulli arrivals, 0.514 cars/s total over 3600 s).
FlowSpec flow_preset(const std::string& name);
std::vector<std::string> flow_preset_names();

}  // namespace relight
