#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evacsim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr double kInfTime = std::numeric_limits<double>::infinity();

// Sentinel capacity for the exit node: placement and transit never cap it.
inline constexpr int kUnboundedCapacity = std::numeric_limits<int>::max();

enum class NodeKind : std::uint8_t {
    cabin,
    corridor,
    lobby,
    restaurant,
    stair_landing,
    exit,
};

enum class EdgeKind : std::uint8_t {
    passageway,
    staircase,
};

const char* to_string(NodeKind kind);
const char* to_string(EdgeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& s);
std::optional<EdgeKind> edge_kind_from_string(const std::string& s);

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::corridor;
    int deck = 2;
    int capacity = 1;
    std::optional<std::pair<double, double>> position;  // meters, reporting only

    bool operator==(const Node&) const = default;
};

struct Edge {
    EdgeId id = 0;
    NodeId a = 0;
    NodeId b = 0;  // unordered endpoints
    EdgeKind kind = EdgeKind::passageway;
    double length_m = 1.0;
    int concurrency_capacity = 1;
    // Derived from length and the graph speeds; never stored in files.
    double tau_typ = 0.0;
    double tau_wc = 0.0;

    NodeId other_end(NodeId from) const { return from == a ? b : a; }

    bool operator==(const Edge&) const = default;
};

struct Speeds {
    double typical_mps = 0.67;
    double worst_case_mps = 0.067;

    bool operator==(const Speeds&) const = default;
};

// T_D = T_S - T_A - T_EL, all in seconds.
struct DeadlineBudget {
    double t_s = 0.0;
    double t_a = 0.0;
    double t_el = 0.0;
    double t_d = 0.0;

    bool operator==(const DeadlineBudget&) const = default;
};

// Dense node mask identifying hazard-blocked nodes, stamped with a version
// so distance maps can be matched to the blocked set they were computed for.
struct BlockedSet {
    std::vector<std::uint8_t> mask;
    std::int64_t version = 0;

    static BlockedSet none(std::size_t node_count) {
        BlockedSet b;
        b.mask.assign(node_count, 0);
        return b;
    }
    static BlockedSet of(std::size_t node_count, std::initializer_list<NodeId> ids) {
        BlockedSet b = none(node_count);
        for (NodeId v : ids) b.mask[v] = 1;
        return b;
    }

    bool contains(NodeId v) const {
        return v < mask.size() && mask[v] != 0;
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto m : mask) n += (m != 0);
        return n;
    }

    bool operator==(const BlockedSet&) const = default;
};

// Immutable after load/generation; safely shareable across concurrent runs.
struct EvacGraph {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    // adjacency[v] -> (edge id, neighbor), in edge-id order.
    std::vector<std::vector<std::pair<EdgeId, NodeId>>> adjacency;
    NodeId exit = 0;
    Speeds speeds;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }

    // Rebuilds adjacency and the derived tau values. Requires endpoints in
    // range; semantic invariants are checked by validate().
    void finalize();

    bool operator==(const EvacGraph&) const = default;
};

}  // namespace evacsim
