#include "evacsim/layout.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "evacsim/errors.hpp"
#include "evacsim/graph.hpp"
#include "evacsim/rng.hpp"

namespace evacsim {

namespace {

constexpr double kSpineSegmentLen = 6.0;
constexpr double kCrossPassageLen = 8.0;
constexpr double kCabinAccessLen = 3.0;
constexpr double kZoneGridLen = 4.0;
// Steep single-file companionways: capacity 1 under the default law, so
// every stair flight is a distinct lane whose queue is priced at the
// junction it descends from.
constexpr double kStairLen = 1.4;
constexpr double kLandingFanLen = 4.0;
constexpr double kVestibuleLen = 3.0;
constexpr double kExitLobbyLen = 5.0;
constexpr double kExitSpineLen = 6.0;
constexpr double kShortcutLen = 5.0;

struct Builder {
    EvacGraph graph;
    std::set<std::pair<NodeId, NodeId>> pairs;

    NodeId add_node(NodeKind kind, int deck, double x, double y) {
        Node n;
        n.id = static_cast<NodeId>(graph.nodes.size());
        n.kind = kind;
        n.deck = deck;
        n.capacity = default_node_capacity(kind);
        n.position = {x, y};
        graph.nodes.push_back(n);
        return n.id;
    }

    bool has_edge(NodeId a, NodeId b) const {
        return pairs.count(std::minmax(a, b)) != 0;
    }

    void add_edge(NodeId a, NodeId b, EdgeKind kind, double length) {
        Edge e;
        e.id = static_cast<EdgeId>(graph.edges.size());
        e.a = a;
        e.b = b;
        e.kind = kind;
        e.length_m = length;
        e.concurrency_capacity = default_edge_capacity(kind, length);
        graph.edges.push_back(e);
        pairs.insert(std::minmax(a, b));
    }
};

// Row-major grid zone with right/down connections; returns the node ids.
std::vector<NodeId> add_grid_zone(Builder& b, NodeKind kind, int deck, int count,
                                  int rows, double x0, double y0) {
    const int cols = (count + rows - 1) / rows;
    std::vector<NodeId> ids;
    ids.reserve(count);
    for (int i = 0; i < count; ++i) {
        const int r = i / cols;
        const int c = i % cols;
        ids.push_back(b.add_node(kind, deck, x0 + c * kZoneGridLen,
                                 y0 + r * kZoneGridLen));
    }
    for (int i = 0; i < count; ++i) {
        const int r = i / cols;
        const int c = i % cols;
        if (c + 1 < cols && i + 1 < count && (i + 1) / cols == r) {
            b.add_edge(ids[i], ids[i + 1], EdgeKind::passageway, kZoneGridLen);
        }
        if (i + cols < count) {
            b.add_edge(ids[i], ids[i + cols], EdgeKind::passageway, kZoneGridLen);
        }
    }
    return ids;
}

}  // namespace

int structural_node_count(const LayoutSpec& spec) {
    return spec.decks * 2 * spec.spine_length + spec.restaurant_nodes +
           spec.lobby_nodes + 2 * spec.stairs + 1;
}

int cabins_for_target_nodes(const LayoutSpec& spec, int target_nodes) {
    const int base = structural_node_count(spec);
    const int remaining = target_nodes - base;
    if (remaining < 0 || remaining % spec.decks != 0) {
        throw InfeasibleLayout(
            "cannot hit " + std::to_string(target_nodes) + " nodes: structure uses " +
            std::to_string(base) + " and cabins come in multiples of " +
            std::to_string(spec.decks));
    }
    return remaining / spec.decks;
}

EvacGraph generate_layout(const LayoutSpec& spec) {
    if (spec.decks < 1) {
        throw InfeasibleLayout("need at least one deck");
    }
    if (spec.stairs < spec.decks - 1) {
        throw InfeasibleLayout("need at least decks-1 staircases to connect decks");
    }
    if (spec.decks == 1 && spec.stairs > 0) {
        throw InfeasibleLayout("staircases need two decks");
    }
    if (spec.cabins_per_deck < 0 || spec.spine_length < 2 ||
        spec.restaurant_nodes < 1 || spec.lobby_nodes < 2) {
        throw InfeasibleLayout("layout dimensions out of range");
    }

    Builder b;
    const int P = spec.spine_length;
    const int bottom_deck = 2;
    const int top_deck = bottom_deck + spec.decks - 1;

    // Spinal corridors: port (y=0) and starboard (y=10) chains plus cross
    // passages, per deck.
    std::vector<std::vector<NodeId>> port(spec.decks), stbd(spec.decks);
    for (int d = 0; d < spec.decks; ++d) {
        const int deck = bottom_deck + d;
        for (int i = 0; i < P; ++i) {
            port[d].push_back(b.add_node(NodeKind::corridor, deck, i * kSpineSegmentLen, 0.0));
        }
        for (int i = 0; i < P; ++i) {
            stbd[d].push_back(b.add_node(NodeKind::corridor, deck, i * kSpineSegmentLen, 10.0));
        }
        for (int i = 0; i + 1 < P; ++i) {
            b.add_edge(port[d][i], port[d][i + 1], EdgeKind::passageway, kSpineSegmentLen);
            b.add_edge(stbd[d][i], stbd[d][i + 1], EdgeKind::passageway, kSpineSegmentLen);
        }
        for (int i = 0; i < P; ++i) {
            b.add_edge(port[d][i], stbd[d][i], EdgeKind::passageway, kCrossPassageLen);
        }
    }

    // Cabins flank both corridors outboard.
    for (int d = 0; d < spec.decks; ++d) {
        const int deck = bottom_deck + d;
        for (int j = 0; j < spec.cabins_per_deck; ++j) {
            const bool starboard = (j % 2) != 0;
            const int idx = (j / 2) % P;
            const NodeId corridor = starboard ? stbd[d][idx] : port[d][idx];
            const double y = starboard ? 13.0 : -3.0;
            const NodeId cabin =
                b.add_node(NodeKind::cabin, deck, idx * kSpineSegmentLen, y);
            b.add_edge(cabin, corridor, EdgeKind::passageway, kCabinAccessLen);
        }
    }

    // Restaurant zone aft on the top deck.
    const auto restaurant =
        add_grid_zone(b, NodeKind::restaurant, top_deck, spec.restaurant_nodes, 5,
                      P * kSpineSegmentLen + 4.0, 2.0);
    b.add_edge(restaurant.front(), port[spec.decks - 1][P - 1],
               EdgeKind::passageway, kZoneGridLen);
    b.add_edge(restaurant.back(), stbd[spec.decks - 1][P - 1],
               EdgeKind::passageway, kZoneGridLen);

    // Lobby forward on the exit deck.
    const auto lobby = add_grid_zone(b, NodeKind::lobby, bottom_deck,
                                     spec.lobby_nodes, 2, -4.0 * 6.0, 2.0);
    b.add_edge(lobby.front(), port[0][0], EdgeKind::passageway, kZoneGridLen);
    b.add_edge(lobby.back(), stbd[0][0], EdgeKind::passageway, kZoneGridLen);

    // Stair towers: each adjacent deck pair gets one junction mid-spine from
    // which its staircase lanes descend in parallel, so lane queues are
    // visible and priced right at the junction. Each lane lands on its own
    // landing fanning into the lower spine; the remaining landing nodes are
    // vestibule rooms off the junctions. Sides alternate per deck pair.
    {
        const int pairs = std::max(1, spec.decks - 1);
        std::vector<int> lanes(pairs, 0);
        for (int k = 0; k < spec.stairs; ++k) lanes[k % pairs]++;
        const int pos = P / 2;
        int vestibules_left = spec.stairs;  // node budget is 2 per staircase
        for (int pair = 0; pair + 1 < spec.decks; ++pair) {
            const bool starboard = (pair % 2) != 0;
            const auto& hi_spine = starboard ? stbd[pair + 1] : port[pair + 1];
            const auto& lo_spine = starboard ? stbd[pair] : port[pair];
            const NodeId junction = hi_spine[pos];
            const double y = starboard ? 11.5 : -1.5;
            for (int k = 0; k < lanes[pair]; ++k) {
                const NodeId landing =
                    b.add_node(NodeKind::stair_landing, bottom_deck + pair,
                               (pos + k) * kSpineSegmentLen, y);
                b.add_edge(junction, landing, EdgeKind::staircase, kStairLen);
                b.add_edge(landing, lo_spine[pos], EdgeKind::passageway, kLandingFanLen);
                if (pos + 1 < P) {
                    b.add_edge(landing, lo_spine[pos + 1], EdgeKind::passageway,
                               kLandingFanLen);
                }
            }
            if (lanes[pair] > 0) {
                const NodeId vestibule =
                    b.add_node(NodeKind::stair_landing, bottom_deck + pair + 1,
                               pos * kSpineSegmentLen, y + (starboard ? 1.5 : -1.5));
                b.add_edge(vestibule, junction, EdgeKind::passageway, kVestibuleLen);
                --vestibules_left;
            }
        }
        // Leftover landing-budget nodes become extra vestibules along spines.
        for (int i = 0; i < vestibules_left; ++i) {
            const int deck_idx = i % spec.decks;
            const int at = (3 + 5 * i) % P;
            const NodeId room =
                b.add_node(NodeKind::stair_landing, bottom_deck + deck_idx,
                           at * kSpineSegmentLen, -1.5);
            b.add_edge(room, port[deck_idx][at], EdgeKind::passageway, kVestibuleLen);
        }
    }

    // Single exit forward of the lobby on the lowest passenger deck, with a
    // wide muster front: every lobby node and the forward spine columns
    // connect to it directly.
    const NodeId exit_node = b.add_node(NodeKind::exit, bottom_deck, -5.0 * 6.0, 5.0);
    b.graph.exit = exit_node;
    for (NodeId ln : lobby) {
        b.add_edge(exit_node, ln, EdgeKind::passageway, kExitLobbyLen);
    }
    for (int i = 0; i < std::min(3, P); ++i) {
        b.add_edge(exit_node, port[0][i], EdgeKind::passageway, kExitSpineLen);
        b.add_edge(exit_node, stbd[0][i], EdgeKind::passageway, kExitSpineLen);
    }

    // Shortcut passages between same-deck nodes two hops apart, seed-chosen,
    // until the passageway count hits the target.
    b.graph.finalize();
    int passageways = 0;
    for (const Edge& e : b.graph.edges) {
        passageways += (e.kind == EdgeKind::passageway);
    }
    const int target = spec.passageway_target >= 0
                           ? spec.passageway_target
                           : passageways + (7 * passageways) / 17;
    if (passageways > target) {
        throw InfeasibleLayout("base structure already has " +
                               std::to_string(passageways) +
                               " passageways, above the target of " +
                               std::to_string(target));
    }

    std::set<std::pair<NodeId, NodeId>> candidate_set;
    const auto eligible = [&](NodeId v) {
        const NodeKind kind = b.graph.nodes[v].kind;
        return kind != NodeKind::cabin && kind != NodeKind::exit;
    };
    for (NodeId v = 0; v < b.graph.node_count(); ++v) {
        if (!eligible(v)) continue;
        const auto& adj = b.graph.adjacency[v];
        for (std::size_t i = 0; i < adj.size(); ++i) {
            for (std::size_t j = i + 1; j < adj.size(); ++j) {
                const NodeId u = adj[i].second;
                const NodeId w = adj[j].second;
                if (u == w || !eligible(u) || !eligible(w)) continue;
                if (b.graph.nodes[u].deck != b.graph.nodes[w].deck) continue;
                if (b.has_edge(u, w)) continue;
                candidate_set.insert(std::minmax(u, w));
            }
        }
    }
    std::vector<std::pair<NodeId, NodeId>> candidates(candidate_set.begin(),
                                                      candidate_set.end());
    Rng rng = Rng::stream(spec.seed, 0x5C);
    rng.shuffle(candidates);
    for (const auto& [u, w] : candidates) {
        if (passageways >= target) break;
        if (b.has_edge(u, w)) continue;
        b.add_edge(u, w, EdgeKind::passageway, kShortcutLen);
        ++passageways;
    }
    if (passageways < target) {
        throw InfeasibleLayout("only " + std::to_string(passageways) +
                               " passageways possible, target " +
                               std::to_string(target));
    }

    b.graph.finalize();
    return std::move(b.graph);
}

EvacGraph generate_layout(int decks, int cabins_per_deck, int stairs,
                          std::uint64_t seed) {
    LayoutSpec spec;
    spec.decks = decks;
    spec.cabins_per_deck = cabins_per_deck;
    spec.stairs = stairs;
    spec.seed = seed;
    return generate_layout(spec);
}

}  // namespace evacsim
