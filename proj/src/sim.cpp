#include "evacsim/sim.hpp"

#include <algorithm>
#include <cstdio>

#include "evacsim/errors.hpp"
#include "evacsim/graph.hpp"

namespace evacsim {

namespace {

// Absorbs float-associativity noise when a budget sits exactly on the
// worst-case bound (sums associate differently in Dijkstra and the walk).
constexpr double kDeadlineEps = 1e-9;

const char* kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::hazard_update: return "hazard_update";
        case EventKind::inclination_update: return "inclination_update";
        case EventKind::snapshot_tick: return "snapshot_tick";
        case EventKind::edge_exit: return "edge_exit";
        case EventKind::decision: return "decision";
    }
    return "?";
}

}  // namespace

const char* to_string(EvacueeState state) {
    switch (state) {
        case EvacueeState::waiting: return "waiting";
        case EvacueeState::moving: return "moving";
        case EvacueeState::evacuated: return "evacuated";
        case EvacueeState::deadline_missed_evacuated: return "deadline_missed_evacuated";
        case EvacueeState::casualty: return "casualty";
        case EvacueeState::trapped: return "trapped";
    }
    return "?";
}

std::vector<Evacuee> place_evacuees(const EvacGraph& graph,
                                    PlacementPolicy policy, int n,
                                    double initial_budget, Rng& rng) {
    std::vector<NodeId> origins;

    const auto draw_from = [&](NodeKind kind, int count) {
        std::vector<NodeId> slots;
        for (const Node& node : graph.nodes) {
            if (node.kind != kind) continue;
            for (int s = 0; s < node.capacity; ++s) slots.push_back(node.id);
        }
        if (count > static_cast<int>(slots.size())) {
            throw CapacityExceeded(std::string(to_string(kind)) + " capacity " +
                                   std::to_string(slots.size()) +
                                   " cannot hold " + std::to_string(count));
        }
        rng.shuffle(slots);
        origins.insert(origins.end(), slots.begin(), slots.begin() + count);
    };

    switch (policy) {
        case PlacementPolicy::all_nodes:
            for (const Node& node : graph.nodes) {
                if (node.kind != NodeKind::exit) origins.push_back(node.id);
            }
            break;
        case PlacementPolicy::cabins:
            draw_from(NodeKind::cabin, n);
            break;
        case PlacementPolicy::restaurant:
            draw_from(NodeKind::restaurant, n);
            break;
        case PlacementPolicy::split_half:
            draw_from(NodeKind::cabin, (n + 1) / 2);
            draw_from(NodeKind::restaurant, n / 2);
            break;
    }

    std::vector<Evacuee> out(origins.size());
    for (std::size_t i = 0; i < origins.size(); ++i) {
        Evacuee& e = out[i];
        e.id = static_cast<int>(i);
        e.origin = origins[i];
        e.at_node = origins[i];
        e.budget = initial_budget;
    }
    return out;
}

double realized_traversal_time(const Edge& edge,
                               const InclinationSchedule& schedule, double t,
                               TraversalMode mode, double sigma, Rng& rng) {
    double base = edge.tau_typ;
    switch (mode) {
        case TraversalMode::typical:
            break;
        case TraversalMode::worst_case:
            base = edge.tau_wc;
            break;
        case TraversalMode::lognormal_jitter:
            base = std::clamp(edge.tau_typ * std::exp(sigma * rng.normal()),
                              edge.tau_typ, edge.tau_wc);
            break;
    }
    return base / inclination_multiplier(schedule, t);
}

SimEngine::SimEngine(const EvacGraph& graph, const SimConfig& config,
                     std::uint64_t seed)
    : graph_(graph),
      cfg_(config),
      seed_(seed),
      rng_place_(Rng::stream(seed, 1)),
      rng_stale_(Rng::stream(seed, 2)),
      rng_move_(Rng::stream(seed, 3)) {
    if (cfg_.placement != PlacementPolicy::all_nodes && cfg_.passengers <= 0) {
        throw ConfigError("placement policy needs a positive passenger count");
    }
    if (!(cfg_.wait_quantum_s > 0)) {
        throw ConfigError("wait_quantum_s must be positive");
    }
    if (!(cfg_.time_cap_factor > 0)) {
        throw ConfigError("time_cap_factor must be positive");
    }

    hazard_ = make_hazard_state(graph_, cfg_.hazard_fronts);
    for (double r : hazard_.reach_time) {
        if (r != kInfTime && r >= 0) hazard_times_.push_back(r);
    }
    std::sort(hazard_times_.begin(), hazard_times_.end());
    hazard_times_.erase(std::unique(hazard_times_.begin(), hazard_times_.end()),
                        hazard_times_.end());

    blocked_ = std::make_shared<const BlockedSet>(
        BlockedSet::none(graph_.node_count()));
    edges_rt_.assign(graph_.edge_count(), {});
    node_occ_.assign(graph_.node_count(), 0);

    double initial_budget = cfg_.deadline.t_d;
    agents_ = place_evacuees(graph_, cfg_.placement, cfg_.passengers,
                             initial_budget, rng_place_);
    if (cfg_.budget_init == BudgetInit::worst_case_distance) {
        const auto maps = compute_distance_maps(
            graph_, blocked_mask(hazard_, 0.0, graph_.node_count(), 0));
        for (Evacuee& e : agents_) e.budget = maps.worst[e.origin];
    }
    for (const Evacuee& e : agents_) node_occ_[e.at_node]++;

    double max_budget = cfg_.deadline.t_d;
    for (const Evacuee& e : agents_) {
        if (e.budget != kInfTime) max_budget = std::max(max_budget, e.budget);
    }
    time_cap_ = cfg_.time_cap_factor * max_budget;

    if (cfg_.delay.freeze_per_run) {
        frozen_stale_.resize(graph_.node_count());
        for (NodeId v = 0; v < graph_.node_count(); ++v) {
            frozen_stale_[v] = sample_staleness(cfg_.delay.pod_for(v), rng_stale_);
        }
    }
}

void SimEngine::schedule(Event ev) {
    ev.seq = next_seq_++;
    events_.push(ev);
}

void SimEngine::ensure_tick(double t) {
    if (ticks_scheduled_.insert(t).second) {
        Event ev;
        ev.t = t;
        ev.kind = EventKind::snapshot_tick;
        schedule(ev);
    }
}

void SimEngine::schedule_decision(int agent, double t) {
    ensure_tick(t);
    Event ev;
    ev.t = t;
    ev.kind = EventKind::decision;
    ev.evacuee = agent;
    schedule(ev);
}

void SimEngine::trace_line(double t, const char* kind, int agent,
                           std::uint64_t place, const std::string& detail) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.6f,%s,%d,%llu,", t, kind, agent,
                  static_cast<unsigned long long>(place));
    std::string line(buf);
    line += detail;
    trace_hash_.update(line);
    trace_hash_.update("\n", 1);
    if (cfg_.record_trace) trace_.push_back(std::move(line));
}

Snapshot SimEngine::build_snapshot(double t) const {
    Snapshot snap;
    snap.t = t;
    snap.edge_occupancy.resize(graph_.edge_count());
    for (EdgeId e = 0; e < graph_.edge_count(); ++e) {
        snap.edge_occupancy[e] = edges_rt_[e].committed();
    }
    snap.node_occupancy = node_occ_;
    snap.blocked = blocked_;
    snap.blocked_version = blocked_version_;
    return snap;
}

double SimEngine::prune_watermark() const {
    double w = kInfTime;
    for (const Evacuee& e : agents_) {
        if (e.state == EvacueeState::waiting || e.state == EvacueeState::moving) {
            w = std::min(w, e.previous_decision_epoch);
        }
    }
    return w;
}

const DistanceMaps& SimEngine::maps_for(const Snapshot& snap) {
    const auto it = maps_cache_.find(snap.blocked_version);
    if (it != maps_cache_.end()) return it->second;
    const BlockedSet empty = BlockedSet::none(graph_.node_count());
    const BlockedSet& blocked = snap.blocked ? *snap.blocked : empty;
    auto [ins, ok] = maps_cache_.emplace(snap.blocked_version,
                                         compute_distance_maps(graph_, blocked));
    return ins->second;
}

void SimEngine::settle_budget(Evacuee& agent, double t) {
    agent.budget = update_budget(agent.budget, t - agent.budget_anchor_t);
    agent.budget_anchor_t = t;
}

void SimEngine::mark_casualty(Evacuee& agent) {
    if (agent.queued) {
        auto& fifo = edges_rt_[agent.on_edge].fifo;
        fifo.erase(std::find(fifo.begin(), fifo.end(), agent.id));
        agent.queued = false;
    } else {
        node_occ_[agent.at_node]--;
    }
    agent.state = EvacueeState::casualty;
}

void SimEngine::handle_hazard_update(double t) {
    BlockedSet next = blocked_mask(hazard_, t, graph_.node_count(), 0);
    if (next.mask == blocked_->mask) return;
    next.version = ++blocked_version_;

    std::vector<NodeId> newly;
    for (NodeId v = 0; v < graph_.node_count(); ++v) {
        if (next.mask[v] && !blocked_->mask[v]) newly.push_back(v);
    }
    blocked_ = std::make_shared<const BlockedSet>(std::move(next));

    for (Evacuee& agent : agents_) {
        if (agent.state != EvacueeState::waiting) continue;
        if (std::binary_search(newly.begin(), newly.end(), agent.at_node)) {
            mark_casualty(agent);
        }
    }
    trace_line(t, kind_name(EventKind::hazard_update), -1, newly.size(),
               "version=" + std::to_string(blocked_version_));

    // A blocked exit ends the evacuation: nobody can be routed anywhere.
    if (blocked_->contains(graph_.exit)) exit_blocked_ = true;
}

void SimEngine::handle_snapshot_tick(double t) {
    epoch_snap_ = build_snapshot(t);
    epoch_snap_valid_ = true;
    if (!cfg_.bypass_delay_layer) {
        store_.record(epoch_snap_);
        store_.prune(prune_watermark());
    }
    trace_line(t, kind_name(EventKind::snapshot_tick), -1, 0, "epoch");
}

void SimEngine::enter_edge(Evacuee& agent, const Edge& edge, double t) {
    settle_budget(agent, t);
    if (agent.queued) {
        agent.queued = false;
    } else {
        node_occ_[agent.at_node]--;
    }
    agent.state = EvacueeState::moving;
    agent.on_edge = edge.id;
    agent.dest_node = edge.other_end(agent.at_node);
    edges_rt_[edge.id].on_count++;

    const double dt =
        realized_traversal_time(edge, cfg_.inclination, t, cfg_.traversal_mode,
                                cfg_.jitter_sigma, rng_move_);
    Event ev;
    ev.t = t + dt;
    ev.kind = EventKind::edge_exit;
    ev.evacuee = agent.id;
    ev.edge = edge.id;
    schedule(ev);
    // Arrivals re-decide immediately; make sure their epoch snapshot exists
    // before any same-instant movement is processed.
    ensure_tick(ev.t);
}

void SimEngine::finish(Evacuee& agent, double t) {
    agent.state = agent.budget < -kDeadlineEps
                      ? EvacueeState::deadline_missed_evacuated
                      : EvacueeState::evacuated;
    agent.evac_time = t;
}

void SimEngine::handle_edge_exit(double t, int agent_id, EdgeId edge_id) {
    Evacuee& agent = agents_[agent_id];
    EdgeRuntime& rt = edges_rt_[edge_id];
    rt.on_count--;

    // Freed slot admits the queue head at this instant.
    if (!rt.fifo.empty()) {
        const int next_id = rt.fifo.front();
        rt.fifo.pop_front();
        enter_edge(agents_[next_id], graph_.edges[edge_id], t);
    }

    settle_budget(agent, t);
    agent.at_node = agent.dest_node;
    std::string detail = "arrive=" + std::to_string(agent.at_node);
    if (agent.at_node == graph_.exit) {
        finish(agent, t);
        detail = agent.state == EvacueeState::evacuated ? "evacuated"
                                                        : "deadline_missed";
    } else {
        agent.state = EvacueeState::waiting;
        node_occ_[agent.at_node]++;
        schedule_decision(agent.id, t);
    }
    trace_line(t, kind_name(EventKind::edge_exit), agent.id, edge_id, detail);
}

void SimEngine::handle_decision(double t, int agent_id) {
    Evacuee& agent = agents_[agent_id];
    if (agent.state != EvacueeState::waiting || agent.queued) return;

    settle_budget(agent, t);

    const double pod_v = cfg_.delay.pod_for(agent.at_node);
    bool stale = false;
    const Snapshot* snap = &epoch_snap_;
    if (!cfg_.bypass_delay_layer) {
        if (cfg_.delay.freeze_per_run) {
            stale = frozen_stale_[agent.at_node] != 0;
            snap = stale ? &store_.lookup(agent.previous_decision_epoch)
                         : &store_.lookup(t);
        } else {
            const InformationView sampled = get_view(
                store_, agent.previous_decision_epoch, t, pod_v, rng_stale_);
            stale = sampled.stale;
            snap = &sampled.snapshot;
        }
    }
    const InformationView view{*snap, stale};
    agent.previous_decision_epoch = t;

    RoutingOptions options;
    options.congestion_aware = cfg_.congestion_aware;
    if (cfg_.strict_inclination_wc) {
        options.wc_scale = 1.0 / inclination_multiplier(cfg_.inclination, t);
    }
    const DistanceMaps& maps = maps_for(*snap);
    const Recommendation rec =
        next_hop(graph_, maps, agent.at_node, agent.budget, view, options);

    char detail[96];
    switch (rec.verdict) {
        case Verdict::trapped:
            node_occ_[agent.at_node]--;
            agent.state = EvacueeState::trapped;
            std::snprintf(detail, sizeof(detail), "trapped stale=%d", stale ? 1 : 0);
            break;
        case Verdict::wait:
            schedule_decision(agent.id, t + cfg_.wait_quantum_s);
            std::snprintf(detail, sizeof(detail), "wait stale=%d", stale ? 1 : 0);
            break;
        case Verdict::go: {
            if (blocked_->contains(rec.next)) {
                // Stale view recommended a node the hazard has reached; the
                // evacuee discovers this on attempted entry and re-queries.
                schedule_decision(agent.id, t + cfg_.wait_quantum_s);
                std::snprintf(detail, sizeof(detail),
                              "blocked_wait next=%u stale=%d", rec.next,
                              stale ? 1 : 0);
                break;
            }
            const Edge& edge = graph_.edges[rec.edge];
            EdgeRuntime& rt = edges_rt_[edge.id];
            if (rt.on_count < edge.concurrency_capacity) {
                enter_edge(agent, edge, t);
                std::snprintf(detail, sizeof(detail),
                              "go next=%u edge=%u risk=%d stale=%d", rec.next,
                              rec.edge, rec.deadline_at_risk ? 1 : 0,
                              stale ? 1 : 0);
            } else {
                node_occ_[agent.at_node]--;
                agent.queued = true;
                agent.on_edge = edge.id;
                agent.dest_node = edge.other_end(agent.at_node);
                rt.fifo.push_back(agent.id);
                std::snprintf(detail, sizeof(detail),
                              "queue edge=%u risk=%d stale=%d", rec.edge,
                              rec.deadline_at_risk ? 1 : 0, stale ? 1 : 0);
            }
            break;
        }
    }
    trace_line(t, kind_name(EventKind::decision), agent.id, agent.at_node,
               detail);
}

void SimEngine::audit() const {
    const auto fail = [](const std::string& what) {
        throw AuditFailure("conservation audit: " + what);
    };

    std::vector<std::int32_t> node_expect(graph_.node_count(), 0);
    std::vector<int> moving_expect(graph_.edge_count(), 0);
    std::vector<int> queued_expect(graph_.edge_count(), 0);
    std::size_t live = 0, terminal = 0;

    for (const Evacuee& e : agents_) {
        const bool completed = e.state == EvacueeState::evacuated ||
                               e.state == EvacueeState::deadline_missed_evacuated;
        if (completed != !std::isnan(e.evac_time)) {
            fail("evac_time set inconsistently for evacuee " + std::to_string(e.id));
        }
        switch (e.state) {
            case EvacueeState::waiting:
                ++live;
                if (e.queued) {
                    queued_expect[e.on_edge]++;
                } else {
                    node_expect[e.at_node]++;
                }
                break;
            case EvacueeState::moving:
                ++live;
                if (e.queued) fail("moving evacuee flagged queued");
                moving_expect[e.on_edge]++;
                break;
            default:
                ++terminal;
                break;
        }
    }
    if (live + terminal != agents_.size()) {
        fail("state counts do not sum to total");
    }

    for (NodeId v = 0; v < graph_.node_count(); ++v) {
        if (node_expect[v] != node_occ_[v]) {
            fail("node " + std::to_string(v) + " occupancy " +
                 std::to_string(node_occ_[v]) + " != " +
                 std::to_string(node_expect[v]) + " agents present");
        }
    }
    std::vector<std::uint8_t> seen(agents_.size(), 0);
    for (EdgeId e = 0; e < graph_.edge_count(); ++e) {
        const EdgeRuntime& rt = edges_rt_[e];
        if (rt.on_count != moving_expect[e]) {
            fail("edge " + std::to_string(e) + " on-count " +
                 std::to_string(rt.on_count) + " != " +
                 std::to_string(moving_expect[e]) + " moving agents");
        }
        if (static_cast<int>(rt.fifo.size()) != queued_expect[e]) {
            fail("edge " + std::to_string(e) + " queue length mismatch");
        }
        for (int id : rt.fifo) {
            const Evacuee& a = agents_.at(id);
            if (seen[id]++) fail("evacuee " + std::to_string(id) + " queued twice");
            if (a.state != EvacueeState::waiting || !a.queued || a.on_edge != e) {
                fail("queue member " + std::to_string(id) + " inconsistent");
            }
        }
    }
}

RunResult SimEngine::run() {
    if (ran_) throw ConfigError("SimEngine::run is single-shot");
    ran_ = true;

    for (double t : hazard_times_) {
        Event ev;
        ev.t = t;
        ev.kind = EventKind::hazard_update;
        schedule(ev);
    }
    for (std::size_t i = 1; i < cfg_.inclination.intervals.size(); ++i) {
        Event ev;
        ev.t = cfg_.inclination.intervals[i].start_s;
        ev.kind = EventKind::inclination_update;
        schedule(ev);
    }
    for (const Evacuee& agent : agents_) {
        schedule_decision(agent.id, 0.0);
    }

    bool capped = false;
    while (!events_.empty()) {
        const Event ev = events_.top();
        events_.pop();
        if (ev.t > time_cap_) {
            capped = true;
            break;
        }
        now_ = ev.t;
        switch (ev.kind) {
            case EventKind::hazard_update:
                handle_hazard_update(ev.t);
                break;
            case EventKind::inclination_update:
                trace_line(ev.t, kind_name(ev.kind), -1, 0, "angle_change");
                break;
            case EventKind::snapshot_tick:
                handle_snapshot_tick(ev.t);
                break;
            case EventKind::edge_exit:
                handle_edge_exit(ev.t, ev.evacuee, ev.edge);
                break;
            case EventKind::decision:
                handle_decision(ev.t, ev.evacuee);
                break;
        }
        ++events_processed_;
        if (cfg_.audit_every_event) audit();
        if (exit_blocked_) {
            capped = true;
            break;
        }
    }

    if (capped) {
        for (Evacuee& agent : agents_) {
            if (agent.state == EvacueeState::waiting ||
                agent.state == EvacueeState::moving) {
                if (agent.state == EvacueeState::waiting) {
                    if (agent.queued) {
                        auto& fifo = edges_rt_[agent.on_edge].fifo;
                        fifo.erase(std::find(fifo.begin(), fifo.end(), agent.id));
                        agent.queued = false;
                    } else {
                        node_occ_[agent.at_node]--;
                    }
                } else {
                    edges_rt_[agent.on_edge].on_count--;
                }
                agent.state = EvacueeState::trapped;
            }
        }
    }
    audit();

    RunResult result;
    result.total = static_cast<int>(agents_.size());
    result.seed = seed_;
    result.config_digest = cfg_.digest(graph_);
    result.events_processed = events_processed_;
    double sum = 0.0;
    for (const Evacuee& agent : agents_) {
        result.outcomes.push_back(
            {agent.id, agent.origin, agent.state, agent.evac_time});
        switch (agent.state) {
            case EvacueeState::evacuated:
                result.evacuated++;
                sum += agent.evac_time;
                break;
            case EvacueeState::deadline_missed_evacuated:
                result.deadline_missed++;
                sum += agent.evac_time;
                break;
            case EvacueeState::casualty:
                result.casualty++;
                break;
            case EvacueeState::trapped:
                result.trapped++;
                break;
            default:
                throw AuditFailure("live evacuee at end of run");
        }
    }
    if (result.completed() > 0) {
        result.mean_evac_time_s = sum / result.completed();
    }
    result.trace_hash = trace_hash_.digest();
    result.trace = std::move(trace_);
    return result;
}

RunResult run(const EvacGraph& graph, const SimConfig& config,
              std::uint64_t seed) {
    SimEngine engine(graph, config, seed);
    return engine.run();
}

}  // namespace evacsim
