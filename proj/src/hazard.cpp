#include "evacsim/hazard.hpp"

#include <algorithm>
#include <queue>

#include "evacsim/errors.hpp"

namespace evacsim {

namespace {

// Single-source shortest paths in the length metric, optionally restricted
// to a subset of edges.
std::vector<double> geodesic_meters(const EvacGraph& graph, NodeId origin,
                                    const std::vector<EdgeId>& permitted) {
    std::vector<std::uint8_t> allowed;
    if (!permitted.empty()) {
        allowed.assign(graph.edge_count(), 0);
        for (EdgeId e : permitted) {
            if (e < allowed.size()) allowed[e] = 1;
        }
    }
    std::vector<double> dist(graph.node_count(), kInfTime);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[origin] = 0.0;
    heap.emplace(0.0, origin);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const auto& [eid, u] : graph.adjacency[v]) {
            if (!allowed.empty() && !allowed[eid]) continue;
            const double nd = d + graph.edges[eid].length_m;
            if (nd < dist[u]) {
                dist[u] = nd;
                heap.emplace(nd, u);
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<double> compute_reach_times(
    const EvacGraph& graph, const std::vector<HazardFront>& fronts) {
    std::vector<double> reach(graph.node_count(), kInfTime);
    for (const HazardFront& f : fronts) {
        if (f.origin >= graph.node_count()) {
            throw ValidationError("hazard origin out of range");
        }
        reach[f.origin] = std::min(reach[f.origin], f.onset_s);
        if (!(f.speed_mps > 0)) continue;
        const auto meters = geodesic_meters(graph, f.origin, f.permitted_edges);
        for (NodeId v = 0; v < graph.node_count(); ++v) {
            if (meters[v] == kInfTime) continue;
            reach[v] = std::min(reach[v], f.onset_s + meters[v] / f.speed_mps);
        }
    }
    return reach;
}

HazardState make_hazard_state(const EvacGraph& graph,
                              std::vector<HazardFront> fronts) {
    HazardState state;
    state.reach_time = compute_reach_times(graph, fronts);
    state.fronts = std::move(fronts);
    return state;
}

std::vector<NodeId> blocked_nodes(const HazardState& state, double t) {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < state.reach_time.size(); ++v) {
        if (state.reach_time[v] <= t) out.push_back(v);
    }
    return out;
}

BlockedSet blocked_mask(const HazardState& state, double t,
                        std::size_t node_count, std::int64_t version) {
    BlockedSet b = BlockedSet::none(node_count);
    b.version = version;
    for (NodeId v = 0; v < state.reach_time.size() && v < node_count; ++v) {
        if (state.reach_time[v] <= t) b.mask[v] = 1;
    }
    return b;
}

double inclination_multiplier(const InclinationSchedule& schedule, double t) {
    if (schedule.intervals.empty()) return 1.0;
    double angle = schedule.intervals.front().angle_deg;
    for (const auto& iv : schedule.intervals) {
        if (iv.start_s <= t) {
            angle = iv.angle_deg;
        } else {
            break;
        }
    }
    if (!(schedule.theta_max_deg > 0)) return schedule.floor;
    const double m = 1.0 - angle / schedule.theta_max_deg;
    return std::clamp(m, schedule.floor, 1.0);
}

}  // namespace evacsim
