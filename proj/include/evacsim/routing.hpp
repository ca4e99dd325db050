#pragma once

#include <cstdint>
#include <vector>

#include "evacsim/info_delay.hpp"
#include "evacsim/types.hpp"

namespace evacsim {

// Single-destination shortest times to the exit over the non-blocked
// subgraph: worst (tau_wc weights) bounds the deadline guarantee, typical
// (tau_typ weights) drives the delay-minimizing objective. Unreachable
// nodes hold +inf. Immutable once computed.
struct DistanceMaps {
    std::vector<double> worst;
    std::vector<double> typical;
    std::int64_t blocked_version = 0;
};

enum class Verdict : std::uint8_t { go, wait, trapped };

struct Recommendation {
    Verdict verdict = Verdict::trapped;
    NodeId next = 0;   // valid when verdict == go
    EdgeId edge = 0;   // valid when verdict == go
    bool deadline_at_risk = false;
    double estimated_typical_remaining = kInfTime;
};

struct RoutingOptions {
    // Occupancy term in the typical estimate; disabling it makes guidance
    // ignore congestion entirely.
    bool congestion_aware = true;
    // Scales the worst-case bound in feasibility checks (strict inclination
    // mode passes 1/m here); 1 = plan against the nominal worst case.
    double wc_scale = 1.0;
    // Absolute slack absorbing float-associativity noise when a budget sits
    // exactly on the worst-case bound.
    double feasibility_eps = 1e-9;
};

// Exact Dijkstra on both weight sets, excluding blocked nodes.
// Throws ExitBlocked if the exit itself is blocked.
DistanceMaps compute_distance_maps(const EvacGraph& graph,
                                   const BlockedSet& blocked);

// tau_typ * (1 + occupancy/capacity), occupancy read from the (possibly
// stale) view.
double congestion_adjusted_typical(const Edge& edge,
                                   const InformationView& view);

// The deadline-aware next-hop policy. Among neighbors that are not blocked
// in the view and whose worst-case bound fits the budget, picks the one
// minimizing the congestion-adjusted typical estimate; with no feasible
// neighbor falls back to the minimal worst-case bound and flags the
// deadline at risk; trapped when every neighbor is blocked. Ties break
// toward the smallest node id.
Recommendation next_hop(const EvacGraph& graph, const DistanceMaps& maps,
                        NodeId v, double budget, const InformationView& view,
                        const RoutingOptions& options = {});

// budget - elapsed; negative results mark a deadline miss and are kept.
double update_budget(double budget, double elapsed);

}  // namespace evacsim
