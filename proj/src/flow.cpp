#include "relight/flow.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace relight {

const char* to_string(Approach a) {
    switch (a) {
        case Approach::N: return "N";
        case Approach::S: return "S";
        case Approach::E: return "E";
        case Approach::W: return "W";
    }
    return "?";
}

const char* to_string(ApproachGroup g) {
    return g == ApproachGroup::WE ? "WE" : "NS";
}

const char* to_string(FlowMode m) {
    return m == FlowMode::Deterministic ? "deterministic" : "bernoulli";
}

Approach approach_from_string(const std::string& s) {
    if (s == "N") return Approach::N;
    if (s == "S") return Approach::S;
    if (s == "E") return Approach::E;
    if (s == "W") return Approach::W;
    throw std::invalid_argument("unknown approach '" + s + "'");
}

namespace {

ApproachGroup group_from_string(const std::string& s) {
    if (s == "WE") return ApproachGroup::WE;
    if (s == "NS") return ApproachGroup::NS;
    throw std::invalid_argument("unknown approach group '" + s + "'");
}

FlowMode mode_from_string(const std::string& s) {
    if (s == "deterministic") return FlowMode::Deterministic;
    if (s == "bernoulli") return FlowMode::Bernoulli;
    throw std::invalid_argument("unknown flow mode '" + s + "'");
}

}  // namespace

void FlowSpec::validate() const {
    for (const auto& iv : intervals) {
        if (!(iv.begin < iv.end))
            throw std::invalid_argument("flow interval must have begin < end");
        if (iv.rate < 0.0)
            throw std::invalid_argument("flow interval rate must be >= 0");
    }
    for (const auto& a : arrivals) {
        if (a.t < 0.0)
            throw std::invalid_argument("explicit arrival time must be >= 0");
    }
    if (!std::is_sorted(arrivals.begin(), arrivals.end(),
                        [](const ExplicitArrival& x, const ExplicitArrival& y) { return x.t < y.t; }))
        throw std::invalid_argument("explicit arrivals must be sorted by time");
}

FlowSpec FlowSpec::scaled(double f) const {
    if (f <= 0.0) throw std::invalid_argument("flow scale must be positive");
    FlowSpec out = *this;
    for (auto& iv : out.intervals) {
        iv.begin *= f;
        iv.end *= f;
    }
    return out;
}

nlohmann::json FlowSpec::to_json() const {
    nlohmann::json j;
    j["intervals"] = nlohmann::json::array();
    for (const auto& iv : intervals) {
        j["intervals"].push_back({{"begin", iv.begin},
                                  {"end", iv.end},
                                  {"group", to_string(iv.group)},
                                  {"mode", to_string(iv.mode)},
                                  {"rate", iv.rate}});
    }
    if (!arrivals.empty()) {
        j["arrivals"] = nlohmann::json::array();
        for (const auto& a : arrivals)
            j["arrivals"].push_back({{"t", a.t}, {"approach", to_string(a.approach)}});
    }
    return j;
}

FlowSpec FlowSpec::from_json(const nlohmann::json& j) {
    FlowSpec spec;
    for (const auto& e : j.value("intervals", nlohmann::json::array())) {
        FlowInterval iv;
        iv.begin = e.at("begin").get<double>();
        iv.end = e.at("end").get<double>();
        iv.group = group_from_string(e.at("group").get<std::string>());
        iv.mode = mode_from_string(e.value("mode", std::string("deterministic")));
        iv.rate = e.at("rate").get<double>();
        spec.intervals.push_back(iv);
    }
    for (const auto& e : j.value("arrivals", nlohmann::json::array())) {
        ExplicitArrival a;
        a.t = e.at("t").get<double>();
        a.approach = approach_from_string(e.at("approach").get<std::string>());
        spec.arrivals.push_back(a);
    }
    std::stable_sort(spec.arrivals.begin(), spec.arrivals.end(),
                     [](const ExplicitArrival& x, const ExplicitArrival& y) { return x.t < y.t; });
    spec.validate();
    return spec;
}

FlowSpec FlowSpec::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open flow file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

void FlowSpec::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write flow file: " + path);
    out << to_json().dump(2) << "\n";
}

namespace {

FlowInterval iv(double begin, double end, ApproachGroup g, double rate,
                FlowMode mode = FlowMode::Deterministic) {
    return FlowInterval{begin, end, g, mode, rate};
}

}  // namespace

FlowSpec flow_preset(const std::string& name) {
    // Rates are window totals divided by window duration.
    FlowSpec spec;
    if (name == "switch") {
        spec.intervals = {iv(0, 36000, ApproachGroup::WE, 14400.0 / 36000.0),
                          iv(36000, 72000, ApproachGroup::NS, 14400.0 / 36000.0)};
    } else if (name == "equal") {
        spec.intervals = {iv(0, 72000, ApproachGroup::WE, 2400.0 / 72000.0),
                          iv(0, 72000, ApproachGroup::NS, 2400.0 / 72000.0)};
    } else if (name == "unequal") {
        spec.intervals = {iv(0, 72000, ApproachGroup::WE, 14400.0 / 72000.0),
                          iv(0, 72000, ApproachGroup::NS, 2400.0 / 72000.0)};
    } else if (name == "synthetic") {
        // switch, then equal, then unequal, back to back.
        spec.intervals = {iv(0, 36000, ApproachGroup::WE, 14400.0 / 36000.0),
                          iv(36000, 72000, ApproachGroup::NS, 14400.0 / 36000.0),
                          iv(72000, 144000, ApproachGroup::WE, 2400.0 / 72000.0),
                          iv(72000, 144000, ApproachGroup::NS, 2400.0 / 72000.0),
                          iv(144000, 216000, ApproachGroup::WE, 14400.0 / 72000.0),
                          iv(144000, 216000, ApproachGroup::NS, 2400.0 / 72000.0)};
    } else if (name == "hangzhou") {
        // 0.514 cars/s for the whole intersection, split evenly across groups.
        spec.intervals = {iv(0, 3600, ApproachGroup::WE, 0.257, FlowMode::Bernoulli),
                          iv(0, 3600, ApproachGroup::NS, 0.257, FlowMode::Bernoulli)};
    } else {
        throw std::invalid_argument("unknown flow preset '" + name + "'");
    }
    return spec;
}

std::vector<std::string> flow_preset_names() {
    return {"switch", "equal", "unequal", "synthetic", "hangzhou"};
}

}  // namespace relight
