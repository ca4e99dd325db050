#include "evacsim/routing.hpp"

#include <queue>

#include "evacsim/errors.hpp"

namespace evacsim {

namespace {

std::vector<double> dijkstra_to_exit(const EvacGraph& graph,
                                     const BlockedSet& blocked,
                                     bool worst_case) {
    std::vector<double> dist(graph.node_count(), kInfTime);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[graph.exit] = 0.0;
    heap.emplace(0.0, graph.exit);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const auto& [eid, u] : graph.adjacency[v]) {
            if (blocked.contains(u)) continue;
            const Edge& e = graph.edges[eid];
            const double w = worst_case ? e.tau_wc : e.tau_typ;
            const double nd = d + w;
            if (nd < dist[u]) {
                dist[u] = nd;
                heap.emplace(nd, u);
            }
        }
    }
    return dist;
}

}  // namespace

DistanceMaps compute_distance_maps(const EvacGraph& graph,
                                   const BlockedSet& blocked) {
    if (blocked.contains(graph.exit)) {
        throw ExitBlocked("exit node is in the blocked set");
    }
    DistanceMaps maps;
    maps.worst = dijkstra_to_exit(graph, blocked, true);
    maps.typical = dijkstra_to_exit(graph, blocked, false);
    maps.blocked_version = blocked.version;
    // Blocked nodes themselves are never routed through or from.
    for (NodeId v = 0; v < graph.node_count(); ++v) {
        if (blocked.contains(v)) {
            maps.worst[v] = kInfTime;
            maps.typical[v] = kInfTime;
        }
    }
    return maps;
}

double congestion_adjusted_typical(const Edge& edge,
                                   const InformationView& view) {
    const auto& occ = view.snapshot.edge_occupancy;
    const double occupancy =
        edge.id < occ.size() ? static_cast<double>(occ[edge.id]) : 0.0;
    return edge.tau_typ * (1.0 + occupancy / edge.concurrency_capacity);
}

Recommendation next_hop(const EvacGraph& graph, const DistanceMaps& maps,
                        NodeId v, double budget, const InformationView& view,
                        const RoutingOptions& options) {
    const BlockedSet* blocked = view.snapshot.blocked.get();

    bool any_unblocked = false;
    bool best_is_feasible = false;
    double best_score = kInfTime;
    NodeId best_next = 0;
    EdgeId best_edge = 0;

    for (const auto& [eid, u] : graph.adjacency[v]) {
        if (blocked != nullptr && blocked->contains(u)) continue;
        any_unblocked = true;
        const Edge& e = graph.edges[eid];

        const double wc_bound = options.wc_scale * (e.tau_wc + maps.worst[u]);
        const bool feasible = wc_bound <= budget + options.feasibility_eps;

        double score;
        if (feasible) {
            const double tau_hat = options.congestion_aware
                                       ? congestion_adjusted_typical(e, view)
                                       : e.tau_typ;
            score = tau_hat + maps.typical[u];
        } else {
            score = wc_bound;
        }

        const bool better =
            (feasible && !best_is_feasible) ||
            (feasible == best_is_feasible &&
             (score < best_score || (score == best_score && u < best_next)));
        if (better) {
            best_is_feasible = feasible;
            best_score = score;
            best_next = u;
            best_edge = eid;
        }
    }

    Recommendation rec;
    if (!any_unblocked) {
        rec.verdict = Verdict::trapped;
        return rec;
    }
    rec.verdict = Verdict::go;
    rec.next = best_next;
    rec.edge = best_edge;
    rec.deadline_at_risk = !best_is_feasible;
    if (best_is_feasible) {
        rec.estimated_typical_remaining = best_score;
    } else {
        const Edge& e = graph.edges[best_edge];
        rec.estimated_typical_remaining = e.tau_typ + maps.typical[best_next];
    }
    return rec;
}

double update_budget(double budget, double elapsed) {
    return budget - elapsed;
}

}  // namespace evacsim
