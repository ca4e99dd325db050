#pragma once

#include <vector>

#include "evacsim/types.hpp"

namespace evacsim {

// A hazard source spreading outward along the graph at a known speed.
struct HazardFront {
    NodeId origin = 0;
    double onset_s = 0.0;
    double speed_mps = 0.0;
    // Empty = spread along every edge; otherwise only the listed edges carry
    // the hazard (directional propagation).
    std::vector<EdgeId> permitted_edges;

    bool operator==(const HazardFront&) const = default;
};

struct HazardState {
    std::vector<HazardFront> fronts;
    // Earliest time the hazard reaches each node; +inf if never.
    std::vector<double> reach_time;

    bool operator==(const HazardState&) const = default;
};

// Time-varying ship inclination scaling traversal times.
struct InclinationSchedule {
    struct Interval {
        double start_s = 0.0;
        double angle_deg = 0.0;

        bool operator==(const Interval&) const = default;
    };
    std::vector<Interval> intervals;  // sorted by start, first start = 0
    double theta_max_deg = 40.0;
    double floor = 0.1;

    bool empty() const { return intervals.empty(); }

    bool operator==(const InclinationSchedule&) const = default;
};

// reach_time[v] = min over fronts of onset + geodesic meters(origin, v)/speed.
// Zero-speed fronts reach only their origin (at onset).
std::vector<double> compute_reach_times(const EvacGraph& graph,
                                        const std::vector<HazardFront>& fronts);

HazardState make_hazard_state(const EvacGraph& graph,
                              std::vector<HazardFront> fronts);

// {v : reach_time[v] <= t}, ascending.
std::vector<NodeId> blocked_nodes(const HazardState& state, double t);

// Same set as a stamped mask for the routing layer.
BlockedSet blocked_mask(const HazardState& state, double t,
                        std::size_t node_count, std::int64_t version);

// m = max(floor, 1 - theta/theta_max), clamped to [floor, 1]. Realized
// traversal times are divided by m at traversal start. Empty schedule -> 1.
double inclination_multiplier(const InclinationSchedule& schedule, double t);

}  // namespace evacsim
