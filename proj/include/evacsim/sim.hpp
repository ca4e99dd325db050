#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "evacsim/hazard.hpp"
#include "evacsim/info_delay.hpp"
#include "evacsim/routing.hpp"
#include "evacsim/scenario.hpp"
#include "evacsim/types.hpp"

namespace evacsim {

enum class EvacueeState : std::uint8_t {
    waiting,
    moving,
    evacuated,
    deadline_missed_evacuated,
    casualty,
    trapped,
};

const char* to_string(EvacueeState state);

struct Evacuee {
    int id = 0;
    NodeId origin = 0;
    NodeId at_node = 0;    // current/last node (departure node while moving)
    NodeId dest_node = 0;  // far endpoint while moving
    EdgeId on_edge = 0;    // valid while moving or queued
    bool queued = false;
    EvacueeState state = EvacueeState::waiting;
    double budget = 0.0;
    double budget_anchor_t = 0.0;  // budget is exact as of this time
    double previous_decision_epoch = 0.0;
    double evac_time = std::numeric_limits<double>::quiet_NaN();
};

// Processed in (t, kind, sequence) order; the kind order below is the
// tie-break priority at equal timestamps.
enum class EventKind : std::uint8_t {
    hazard_update = 0,
    inclination_update = 1,
    snapshot_tick = 2,
    edge_exit = 3,
    decision = 4,
};

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::decision;
    std::int64_t seq = 0;
    std::int32_t evacuee = -1;
    EdgeId edge = 0;
};

struct EvacueeOutcome {
    int id = 0;
    NodeId origin = 0;
    EvacueeState state = EvacueeState::waiting;
    double evac_time = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
    std::vector<EvacueeOutcome> outcomes;
    int total = 0;
    int evacuated = 0;
    int deadline_missed = 0;  // completed after the budget ran out
    int casualty = 0;
    int trapped = 0;
    // Mean over completions (evacuated + deadline_missed); NaN if none.
    double mean_evac_time_s = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
    std::uint64_t trace_hash = 0;
    std::size_t events_processed = 0;
    std::vector<std::string> trace;  // populated when record_trace

    int completed() const { return evacuated + deadline_missed; }
};

// Initial placement. all_nodes puts one evacuee on every non-exit node and
// ignores n; the others draw uniformly over eligible capacity slots.
// Throws CapacityExceeded when n does not fit.
std::vector<Evacuee> place_evacuees(const EvacGraph& graph,
                                    PlacementPolicy policy, int n,
                                    double initial_budget, Rng& rng);

// Base sample in [tau_typ, tau_wc] divided by the inclination multiplier at
// traversal start.
double realized_traversal_time(const Edge& edge,
                               const InclinationSchedule& schedule, double t,
                               TraversalMode mode, double sigma, Rng& rng);

// One evacuation run: a single logical thread over one event queue.
// Deterministic in (graph, config, seed).
class SimEngine {
public:
    struct EdgeRuntime {
        int on_count = 0;        // currently traversing
        std::deque<int> fifo;    // queued entrants, front enters next
        int committed() const { return on_count + static_cast<int>(fifo.size()); }
    };

    SimEngine(const EvacGraph& graph, const SimConfig& config,
              std::uint64_t seed);

    RunResult run();

    // Introspection for tests.
    const std::vector<Evacuee>& evacuees() const { return agents_; }
    const std::vector<EdgeRuntime>& edge_runtime() const { return edges_rt_; }
    const SnapshotStore& store() const { return store_; }
    double now() const { return now_; }

    // Conservation audit; throws AuditFailure on any inconsistency.
    void audit() const;

    // Fault-injection hook for audit tests.
    void debug_bump_edge_occupancy(EdgeId e, int delta) {
        edges_rt_.at(e).on_count += delta;
    }

private:
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t) return a.t > b.t;
            if (a.kind != b.kind) return a.kind > b.kind;
            return a.seq > b.seq;
        }
    };

    void schedule(Event ev);
    void schedule_decision(int agent, double t);
    void ensure_tick(double t);
    void handle_hazard_update(double t);
    void handle_snapshot_tick(double t);
    void handle_edge_exit(double t, int agent_id, EdgeId edge);
    void handle_decision(double t, int agent_id);
    void enter_edge(Evacuee& agent, const Edge& edge, double t);
    void settle_budget(Evacuee& agent, double t);
    void finish(Evacuee& agent, double t);
    void mark_casualty(Evacuee& agent);
    Snapshot build_snapshot(double t) const;
    const DistanceMaps& maps_for(const Snapshot& snap);
    double prune_watermark() const;
    void trace_line(double t, const char* kind, int agent, std::uint64_t place,
                    const std::string& detail);

    const EvacGraph& graph_;
    const SimConfig& cfg_;
    std::uint64_t seed_ = 0;

    Rng rng_place_;
    Rng rng_stale_;
    Rng rng_move_;

    double now_ = 0.0;
    double time_cap_ = 0.0;
    std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
    std::int64_t next_seq_ = 0;

    std::vector<Evacuee> agents_;
    std::vector<EdgeRuntime> edges_rt_;
    std::vector<std::int32_t> node_occ_;  // live waiting, not queued
    std::shared_ptr<const BlockedSet> blocked_;
    std::int64_t blocked_version_ = 0;
    HazardState hazard_;
    std::vector<double> hazard_times_;  // distinct finite reach times
    bool exit_blocked_ = false;

    SnapshotStore store_;
    Snapshot epoch_snap_;
    bool epoch_snap_valid_ = false;
    std::set<double> ticks_scheduled_;
    std::unordered_map<std::int64_t, DistanceMaps> maps_cache_;
    std::vector<std::uint8_t> frozen_stale_;

    Fnv1a trace_hash_;
    std::vector<std::string> trace_;
    std::size_t events_processed_ = 0;
    bool ran_ = false;
};

// Convenience wrapper: build the engine, run it, return the result.
RunResult run(const EvacGraph& graph, const SimConfig& config,
              std::uint64_t seed);

}  // namespace evacsim
