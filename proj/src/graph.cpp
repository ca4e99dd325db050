#include "evacsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>

#include "evacsim/errors.hpp"

namespace evacsim {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::cabin: return "cabin";
        case NodeKind::corridor: return "corridor";
        case NodeKind::lobby: return "lobby";
        case NodeKind::restaurant: return "restaurant";
        case NodeKind::stair_landing: return "stair_landing";
        case NodeKind::exit: return "exit";
    }
    return "?";
}

const char* to_string(EdgeKind kind) {
    return kind == EdgeKind::passageway ? "passageway" : "staircase";
}

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
    if (s == "cabin") return NodeKind::cabin;
    if (s == "corridor") return NodeKind::corridor;
    if (s == "lobby") return NodeKind::lobby;
    if (s == "restaurant") return NodeKind::restaurant;
    if (s == "stair_landing") return NodeKind::stair_landing;
    if (s == "exit") return NodeKind::exit;
    return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from_string(const std::string& s) {
    if (s == "passageway") return EdgeKind::passageway;
    if (s == "staircase") return EdgeKind::staircase;
    return std::nullopt;
}

DeadlineBudget compute_deadline(double t_s, double t_a, double t_el) {
    if (t_s < 0 || t_a < 0 || t_el < 0) {
        throw NegativeDeadline("deadline components must be non-negative");
    }
    if (t_s < t_a + t_el) {
        throw NegativeDeadline("T_S < T_A + T_EL leaves no evacuation time");
    }
    DeadlineBudget b;
    b.t_s = t_s;
    b.t_a = t_a;
    b.t_el = t_el;
    b.t_d = t_s - t_a - t_el;
    return b;
}

std::pair<double, double> edge_times(double length_m, double typical_mps,
                                     double worst_case_mps) {
    if (!(length_m > 0)) {
        throw InvalidSpeed("edge length must be positive");
    }
    if (!(worst_case_mps > 0) || !(typical_mps > 0) ||
        worst_case_mps > typical_mps) {
        throw InvalidSpeed("speeds must satisfy 0 < worst_case <= typical");
    }
    return {length_m / typical_mps, length_m / worst_case_mps};
}

int default_edge_capacity(EdgeKind kind, double length_m) {
    const double factor = kind == EdgeKind::passageway ? 0.8 : 0.4;
    const int cap = static_cast<int>(std::lround(length_m * factor));
    return std::max(1, cap);
}

int default_node_capacity(NodeKind kind) {
    switch (kind) {
        case NodeKind::cabin: return 2;
        case NodeKind::corridor: return 8;
        case NodeKind::lobby: return 20;
        case NodeKind::restaurant: return 8;
        case NodeKind::stair_landing: return 10;
        case NodeKind::exit: return kUnboundedCapacity;
    }
    return 1;
}

void EvacGraph::finalize() {
    for (const Edge& e : edges) {
        if (e.a >= nodes.size() || e.b >= nodes.size()) {
            throw ValidationError("edge " + std::to_string(e.id) +
                                  " references a node out of range");
        }
    }
    adjacency.assign(nodes.size(), {});
    for (Edge& e : edges) {
        const auto [typ, wc] =
            edge_times(e.length_m, speeds.typical_mps, speeds.worst_case_mps);
        e.tau_typ = typ;
        e.tau_wc = wc;
        adjacency[e.a].emplace_back(e.id, e.b);
        if (e.b != e.a) {
            adjacency[e.b].emplace_back(e.id, e.a);
        }
    }
}

std::vector<std::string> validate(const EvacGraph& graph) {
    std::vector<std::string> out;
    const auto note = [&out](std::string msg) { out.push_back(std::move(msg)); };

    // Node invariants.
    std::size_t exits = 0;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const Node& n = graph.nodes[i];
        if (n.id != static_cast<NodeId>(i)) {
            note("node ids not dense: slot " + std::to_string(i) + " holds id " +
                 std::to_string(n.id));
        }
        if (n.kind == NodeKind::exit) {
            ++exits;
        } else if (n.capacity < 1) {
            note("node " + std::to_string(n.id) + " capacity below 1");
        }
    }
    if (exits == 0) {
        note("no exit node");
    } else if (exits > 1) {
        note("multiple exit nodes (" + std::to_string(exits) + ")");
    }
    if (graph.exit >= graph.nodes.size() ||
        (exits >= 1 && graph.nodes[graph.exit].kind != NodeKind::exit)) {
        note("graph.exit does not point at the exit node");
    }

    // Edge invariants.
    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        const Edge& e = graph.edges[i];
        const std::string tag = "edge " + std::to_string(e.id);
        if (e.id != static_cast<EdgeId>(i)) {
            note("edge ids not dense: slot " + std::to_string(i) + " holds id " +
                 std::to_string(e.id));
        }
        if (e.a >= graph.nodes.size() || e.b >= graph.nodes.size()) {
            note(tag + " references a node out of range");
            continue;
        }
        if (e.a == e.b) {
            note(tag + " is a self-loop");
        }
        if (!(e.length_m > 0)) {
            note(tag + " length not positive");
        }
        if (e.concurrency_capacity < 1) {
            note(tag + " concurrency capacity below 1");
        }
        if (!(e.tau_typ > 0) || e.tau_typ > e.tau_wc) {
            note(tag + " typical exceeds worst-case");
        }
        const auto pair = std::minmax(e.a, e.b);
        if (!seen.insert({pair.first, pair.second}).second) {
            note("duplicate edge between " + std::to_string(pair.first) + " and " +
                 std::to_string(pair.second));
        }
        const int deck_a = graph.nodes[e.a].deck;
        const int deck_b = graph.nodes[e.b].deck;
        if (e.kind == EdgeKind::staircase) {
            if (std::abs(deck_a - deck_b) != 1) {
                note(tag + " staircase does not link adjacent decks");
            }
        } else if (deck_a != deck_b) {
            note(tag + " passageway spans decks");
        }
    }

    // Reachability: every non-exit node must have a path to the exit.
    if (exits == 1 && graph.exit < graph.nodes.size() &&
        graph.adjacency.size() == graph.nodes.size()) {
        std::vector<std::uint8_t> reached(graph.nodes.size(), 0);
        std::deque<NodeId> queue{graph.exit};
        reached[graph.exit] = 1;
        while (!queue.empty()) {
            const NodeId v = queue.front();
            queue.pop_front();
            for (const auto& [eid, u] : graph.adjacency[v]) {
                if (!reached[u]) {
                    reached[u] = 1;
                    queue.push_back(u);
                }
            }
        }
        for (const Node& n : graph.nodes) {
            if (!reached[n.id]) {
                note("node " + std::to_string(n.id) + " cannot reach exit");
            }
        }
    }
    return out;
}

}  // namespace evacsim
