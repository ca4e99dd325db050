#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <unordered_map>
#include <vector>

#include "evacsim/rng.hpp"
#include "evacsim/types.hpp"

namespace evacsim {

// Timestamped global state as the guidance system sees it. Edge occupancy
// counts everyone committed to the edge (traversing plus FIFO-queued), so a
// fresh view prices queues and a stale view mis-prices them.
struct Snapshot {
    double t = 0.0;
    std::vector<std::int32_t> edge_occupancy;
    std::vector<std::int32_t> node_occupancy;
    std::shared_ptr<const BlockedSet> blocked;
    std::int64_t blocked_version = 0;

    bool operator==(const Snapshot& o) const {
        return t == o.t && edge_occupancy == o.edge_occupancy &&
               node_occupancy == o.node_occupancy &&
               blocked_version == o.blocked_version &&
               ((blocked == nullptr) == (o.blocked == nullptr)) &&
               (blocked == nullptr || *blocked == *o.blocked);
    }
};

// What a routing decision gets to see: a snapshot plus whether it is lagged.
struct InformationView {
    const Snapshot& snapshot;
    bool stale = false;
};

// Per-node probability that a decision is served one step stale.
struct DelayConfig {
    double default_pod = 0.0;
    std::unordered_map<NodeId, double> per_node;
    // Sample IL once per node per run instead of per decision.
    bool freeze_per_run = false;

    double pod_for(NodeId v) const {
        const auto it = per_node.find(v);
        return it == per_node.end() ? default_pod : it->second;
    }
};

// Time-ordered snapshot history with retention covering every live
// evacuee's previous decision epoch. Owned by a single run.
class SnapshotStore {
public:
    // Appends; throws NonMonotonicTime unless t exceeds the last timestamp.
    void record(Snapshot snap);

    // Latest snapshot with timestamp <= t; throws MissingSnapshot if
    // retention was violated (internal bug).
    const Snapshot& lookup(double t) const;

    // Drops snapshots no longer reachable by lookup(t) for any t >= watermark
    // (keeps the latest snapshot at or before the watermark).
    void prune(double watermark);

    std::size_t size() const { return snaps_.size(); }
    bool empty() const { return snaps_.empty(); }
    double latest_time() const;

private:
    std::deque<Snapshot> snaps_;
};

// IL = 1 with probability pod_v. Deterministic given the rng state.
bool sample_staleness(double pod_v, Rng& rng);

// Serves the view for a decision at decision_time by an evacuee whose
// previous decision epoch was previous_epoch (0 for first decisions). Fresh
// -> snapshot at decision_time; stale -> snapshot at previous_epoch.
InformationView get_view(const SnapshotStore& store, double previous_epoch,
                         double decision_time, double pod_v, Rng& rng);

}  // namespace evacsim
