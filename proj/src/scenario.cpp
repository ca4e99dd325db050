#include "evacsim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evacsim/errors.hpp"
#include "evacsim/graph.hpp"
#include "evacsim/rng.hpp"

namespace evacsim {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ParseError(std::string("unknown key '") + key + "' in " + where);
        }
    }
}

const json& require(const json& obj, const char* key, const char* where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(std::string("missing key '") + key + "' in " + where);
    }
    return *it;
}

double as_number(const json& v, const char* what) {
    if (!v.is_number()) {
        throw ParseError(std::string(what) + " must be a number");
    }
    return v.get<double>();
}

std::uint64_t as_u64(const json& v, const char* what) {
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ParseError(std::string(what) + " must be an integer");
    }
    return v.get<std::uint64_t>();
}

int as_int(const json& v, const char* what) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ParseError(std::string(what) + " must be an integer");
    }
    return v.get<int>();
}

std::string as_string(const json& v, const char* what) {
    if (!v.is_string()) {
        throw ParseError(std::string(what) + " must be a string");
    }
    return v.get<std::string>();
}

InclinationSchedule parse_inclination(const json& obj) {
    reject_unknown_keys(obj, "inclination",
                        {"theta_max_deg", "floor", "intervals", "period_s", "angles"});
    InclinationSchedule s;
    if (obj.contains("theta_max_deg")) {
        s.theta_max_deg = as_number(obj["theta_max_deg"], "theta_max_deg");
    }
    if (obj.contains("floor")) {
        s.floor = as_number(obj["floor"], "floor");
    }
    if (!(s.floor > 0) || s.floor > 1) {
        throw ParseError("inclination floor must be in (0, 1]");
    }
    const bool has_intervals = obj.contains("intervals");
    const bool has_periodic = obj.contains("period_s") || obj.contains("angles");
    if (has_intervals && has_periodic) {
        throw ParseError("inclination takes either intervals or period_s+angles");
    }
    if (has_intervals) {
        for (const auto& iv : obj["intervals"]) {
            reject_unknown_keys(iv, "inclination interval", {"start_s", "angle_deg"});
            s.intervals.push_back({as_number(require(iv, "start_s", "interval"), "start_s"),
                                   as_number(require(iv, "angle_deg", "interval"), "angle_deg")});
        }
    } else if (has_periodic) {
        if (!obj.contains("period_s") || !obj.contains("angles")) {
            throw ParseError("periodic inclination needs both period_s and angles");
        }
        const double period = as_number(obj["period_s"], "period_s");
        if (!(period > 0)) throw ParseError("period_s must be positive");
        double t = 0.0;
        for (const auto& a : obj["angles"]) {
            s.intervals.push_back({t, as_number(a, "angle")});
            t += period;
        }
    }
    for (std::size_t i = 0; i < s.intervals.size(); ++i) {
        if (s.intervals[i].angle_deg < 0) {
            throw ParseError("inclination angles must be non-negative");
        }
        if (i == 0 && s.intervals[i].start_s != 0.0) {
            throw ParseError("first inclination interval must start at 0");
        }
        if (i > 0 && s.intervals[i].start_s <= s.intervals[i - 1].start_s) {
            throw ParseError("inclination intervals must be sorted by start");
        }
    }
    return s;
}

DelayConfig parse_delay(const json& obj) {
    reject_unknown_keys(obj, "delay", {"pod", "pod_per_node"});
    DelayConfig d;
    const bool scalar = obj.contains("pod");
    const bool per_node = obj.contains("pod_per_node");
    if (scalar == per_node) {
        throw ParseError("delay takes exactly one of pod or pod_per_node");
    }
    const auto check = [](double p) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ParseError("pod values must lie in [0, 1]");
        }
        return p;
    };
    if (scalar) {
        d.default_pod = check(as_number(obj["pod"], "pod"));
    } else {
        for (const auto& [key, value] : obj["pod_per_node"].items()) {
            const double p = check(as_number(value, "pod_per_node entry"));
            if (key == "default") {
                d.default_pod = p;
            } else {
                std::size_t used = 0;
                unsigned long id = 0;
                try {
                    id = std::stoul(key, &used);
                } catch (const std::exception&) {
                    throw ParseError("pod_per_node key '" + key + "' is not a node id");
                }
                if (used != key.size()) {
                    throw ParseError("pod_per_node key '" + key + "' is not a node id");
                }
                d.per_node[static_cast<NodeId>(id)] = p;
            }
        }
    }
    return d;
}

}  // namespace

const char* to_string(PlacementPolicy policy) {
    switch (policy) {
        case PlacementPolicy::all_nodes: return "all";
        case PlacementPolicy::cabins: return "cabins";
        case PlacementPolicy::restaurant: return "restaurant";
        case PlacementPolicy::split_half: return "split";
    }
    return "?";
}

std::optional<PlacementPolicy> placement_from_string(const std::string& s) {
    if (s == "all") return PlacementPolicy::all_nodes;
    if (s == "cabins") return PlacementPolicy::cabins;
    if (s == "restaurant") return PlacementPolicy::restaurant;
    if (s == "split") return PlacementPolicy::split_half;
    return std::nullopt;
}

std::uint64_t SimConfig::digest(const EvacGraph& graph) const {
    Fnv1a h;
    const auto add = [&h](const auto& value) { h.update(&value, sizeof(value)); };
    h.update(name);
    add(scenario_seed);
    add(speeds.typical_mps);
    add(speeds.worst_case_mps);
    add(deadline.t_d);
    for (const auto& f : hazard_fronts) {
        add(f.origin);
        add(f.onset_s);
        add(f.speed_mps);
    }
    for (const auto& iv : inclination.intervals) {
        add(iv.start_s);
        add(iv.angle_deg);
    }
    add(inclination.theta_max_deg);
    add(inclination.floor);
    add(delay.default_pod);
    for (NodeId v = 0; v < graph.node_count(); ++v) {
        const auto it = delay.per_node.find(v);
        if (it != delay.per_node.end()) {
            add(v);
            add(it->second);
        }
    }
    add(delay.freeze_per_run);
    add(placement);
    add(passengers);
    add(traversal_mode);
    add(jitter_sigma);
    add(wait_quantum_s);
    add(time_cap_factor);
    add(congestion_aware);
    add(bypass_delay_layer);
    add(strict_inclination_wc);
    add(budget_init);
    const std::size_t nodes = graph.node_count();
    const std::size_t edges = graph.edge_count();
    add(nodes);
    add(edges);
    return h.digest();
}

std::pair<EvacGraph, SimConfig> parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("scenario root must be an object");
    }
    reject_unknown_keys(doc, "scenario",
                        {"meta", "speeds", "deadline", "nodes", "edges", "hazard",
                         "inclination", "delay", "placement"});

    EvacGraph graph;
    SimConfig config;

    const json& meta = require(doc, "meta", "scenario");
    reject_unknown_keys(meta, "meta", {"name", "seed"});
    config.name = as_string(require(meta, "name", "meta"), "meta.name");
    config.scenario_seed = as_u64(require(meta, "seed", "meta"), "meta.seed");

    const json& speeds = require(doc, "speeds", "scenario");
    reject_unknown_keys(speeds, "speeds", {"typical_mps", "worst_case_mps"});
    graph.speeds.typical_mps =
        as_number(require(speeds, "typical_mps", "speeds"), "typical_mps");
    graph.speeds.worst_case_mps =
        as_number(require(speeds, "worst_case_mps", "speeds"), "worst_case_mps");
    config.speeds = graph.speeds;

    const json& deadline = require(doc, "deadline", "scenario");
    reject_unknown_keys(deadline, "deadline", {"t_s_s", "t_a_s", "t_el_s"});
    config.deadline =
        compute_deadline(as_number(require(deadline, "t_s_s", "deadline"), "t_s_s"),
                         as_number(require(deadline, "t_a_s", "deadline"), "t_a_s"),
                         as_number(require(deadline, "t_el_s", "deadline"), "t_el_s"));

    const json& nodes = require(doc, "nodes", "scenario");
    if (!nodes.is_array()) throw ParseError("nodes must be an array");
    graph.nodes.resize(nodes.size());
    std::vector<std::uint8_t> node_seen(nodes.size(), 0);
    for (const auto& jn : nodes) {
        reject_unknown_keys(jn, "node", {"id", "kind", "deck", "capacity", "x", "y"});
        Node n;
        const std::uint64_t id = as_u64(require(jn, "id", "node"), "node.id");
        if (id >= nodes.size() || node_seen[id]) {
            throw ValidationError("node ids must be dense and unique from 0");
        }
        node_seen[id] = 1;
        n.id = static_cast<NodeId>(id);
        const std::string kind = as_string(require(jn, "kind", "node"), "node.kind");
        const auto parsed_kind = node_kind_from_string(kind);
        if (!parsed_kind) throw ParseError("unknown node kind '" + kind + "'");
        n.kind = *parsed_kind;
        n.deck = as_int(require(jn, "deck", "node"), "node.deck");
        n.capacity = jn.contains("capacity")
                         ? as_int(jn["capacity"], "node.capacity")
                         : default_node_capacity(n.kind);
        if (jn.contains("x") != jn.contains("y")) {
            throw ParseError("node position needs both x and y");
        }
        if (jn.contains("x")) {
            n.position = {as_number(jn["x"], "node.x"), as_number(jn["y"], "node.y")};
        }
        graph.nodes[n.id] = n;
        if (n.kind == NodeKind::exit) graph.exit = n.id;
    }

    const json& edges = require(doc, "edges", "scenario");
    if (!edges.is_array()) throw ParseError("edges must be an array");
    graph.edges.resize(edges.size());
    std::vector<std::uint8_t> edge_seen(edges.size(), 0);
    for (const auto& je : edges) {
        reject_unknown_keys(je, "edge", {"id", "a", "b", "kind", "length_m", "capacity"});
        Edge e;
        const std::uint64_t id = as_u64(require(je, "id", "edge"), "edge.id");
        if (id >= edges.size() || edge_seen[id]) {
            throw ValidationError("edge ids must be dense and unique from 0");
        }
        edge_seen[id] = 1;
        e.id = static_cast<EdgeId>(id);
        e.a = static_cast<NodeId>(as_u64(require(je, "a", "edge"), "edge.a"));
        e.b = static_cast<NodeId>(as_u64(require(je, "b", "edge"), "edge.b"));
        const std::string kind = as_string(require(je, "kind", "edge"), "edge.kind");
        const auto parsed_kind = edge_kind_from_string(kind);
        if (!parsed_kind) throw ParseError("unknown edge kind '" + kind + "'");
        e.kind = *parsed_kind;
        e.length_m = as_number(require(je, "length_m", "edge"), "edge.length_m");
        e.concurrency_capacity = je.contains("capacity")
                                     ? as_int(je["capacity"], "edge.capacity")
                                     : default_edge_capacity(e.kind, e.length_m);
        graph.edges[e.id] = e;
    }

    if (doc.contains("hazard")) {
        const json& hazard = doc["hazard"];
        reject_unknown_keys(hazard, "hazard", {"fronts"});
        for (const auto& jf : require(hazard, "fronts", "hazard")) {
            reject_unknown_keys(jf, "hazard front", {"origin", "onset_s", "speed_mps"});
            HazardFront f;
            f.origin = static_cast<NodeId>(
                as_u64(require(jf, "origin", "front"), "front.origin"));
            f.onset_s = as_number(require(jf, "onset_s", "front"), "front.onset_s");
            f.speed_mps = as_number(require(jf, "speed_mps", "front"), "front.speed_mps");
            if (f.onset_s < 0 || f.speed_mps < 0) {
                throw ParseError("hazard onset and speed must be non-negative");
            }
            config.hazard_fronts.push_back(std::move(f));
        }
    }

    if (doc.contains("inclination")) {
        config.inclination = parse_inclination(doc["inclination"]);
    }

    config.delay = parse_delay(require(doc, "delay", "scenario"));

    const json& placement = require(doc, "placement", "scenario");
    reject_unknown_keys(placement, "placement", {"policy", "passengers"});
    const std::string policy =
        as_string(require(placement, "policy", "placement"), "placement.policy");
    const auto parsed_policy = placement_from_string(policy);
    if (!parsed_policy) {
        throw ParseError("unknown placement policy '" + policy + "'");
    }
    config.placement = *parsed_policy;
    if (placement.contains("passengers")) {
        config.passengers = as_int(placement["passengers"], "placement.passengers");
    }

    graph.finalize();
    const auto violations = validate(graph);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "scenario violates " << violations.size() << " invariant(s):";
        for (const auto& v : violations) msg << "\n  - " << v;
        throw ValidationError(msg.str());
    }
    for (const auto& [node, pod] : config.delay.per_node) {
        if (node >= graph.node_count()) {
            throw ValidationError("pod_per_node references unknown node " +
                                  std::to_string(node));
        }
    }
    for (const auto& f : config.hazard_fronts) {
        if (f.origin >= graph.node_count()) {
            throw ValidationError("hazard origin references unknown node " +
                                  std::to_string(f.origin));
        }
    }
    return {std::move(graph), std::move(config)};
}

std::pair<EvacGraph, SimConfig> load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string scenario_to_json(const EvacGraph& graph, const SimConfig& config) {
    json doc;
    doc["meta"] = {{"name", config.name}, {"seed", config.scenario_seed}};
    doc["speeds"] = {{"typical_mps", graph.speeds.typical_mps},
                     {"worst_case_mps", graph.speeds.worst_case_mps}};
    doc["deadline"] = {{"t_s_s", config.deadline.t_s},
                       {"t_a_s", config.deadline.t_a},
                       {"t_el_s", config.deadline.t_el}};
    doc["nodes"] = json::array();
    for (const Node& n : graph.nodes) {
        json jn = {{"id", n.id},
                   {"kind", to_string(n.kind)},
                   {"deck", n.deck},
                   {"capacity", n.capacity}};
        if (n.position) {
            jn["x"] = n.position->first;
            jn["y"] = n.position->second;
        }
        doc["nodes"].push_back(std::move(jn));
    }
    doc["edges"] = json::array();
    for (const Edge& e : graph.edges) {
        doc["edges"].push_back({{"id", e.id},
                                {"a", e.a},
                                {"b", e.b},
                                {"kind", to_string(e.kind)},
                                {"length_m", e.length_m},
                                {"capacity", e.concurrency_capacity}});
    }
    if (!config.hazard_fronts.empty()) {
        json fronts = json::array();
        for (const auto& f : config.hazard_fronts) {
            fronts.push_back({{"origin", f.origin},
                              {"onset_s", f.onset_s},
                              {"speed_mps", f.speed_mps}});
        }
        doc["hazard"] = {{"fronts", std::move(fronts)}};
    }
    if (!config.inclination.empty()) {
        json intervals = json::array();
        for (const auto& iv : config.inclination.intervals) {
            intervals.push_back({{"start_s", iv.start_s}, {"angle_deg", iv.angle_deg}});
        }
        doc["inclination"] = {{"theta_max_deg", config.inclination.theta_max_deg},
                              {"floor", config.inclination.floor},
                              {"intervals", std::move(intervals)}};
    }
    if (config.delay.per_node.empty()) {
        doc["delay"] = {{"pod", config.delay.default_pod}};
    } else {
        json per_node;
        per_node["default"] = config.delay.default_pod;
        for (NodeId v = 0; v < graph.node_count(); ++v) {
            const auto it = config.delay.per_node.find(v);
            if (it != config.delay.per_node.end()) {
                per_node[std::to_string(v)] = it->second;
            }
        }
        doc["delay"] = {{"pod_per_node", std::move(per_node)}};
    }
    json placement = {{"policy", to_string(config.placement)}};
    if (config.placement != PlacementPolicy::all_nodes) {
        placement["passengers"] = config.passengers;
    }
    doc["placement"] = std::move(placement);
    return doc.dump(2) + "\n";
}

void save_scenario(const std::filesystem::path& path, const EvacGraph& graph,
                   const SimConfig& config) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write scenario file: " + path.string());
    }
    out << scenario_to_json(graph, config);
    if (!out) {
        throw IoError("failed writing scenario file: " + path.string());
    }
}

}  // namespace evacsim
