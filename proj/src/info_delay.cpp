#include "evacsim/info_delay.hpp"

#include <algorithm>
#include <string>

#include "evacsim/errors.hpp"

namespace evacsim {

void SnapshotStore::record(Snapshot snap) {
    if (!snaps_.empty() && snap.t <= snaps_.back().t) {
        throw NonMonotonicTime("snapshot at t=" + std::to_string(snap.t) +
                               " not after t=" + std::to_string(snaps_.back().t));
    }
    snaps_.push_back(std::move(snap));
}

const Snapshot& SnapshotStore::lookup(double t) const {
    const auto it = std::upper_bound(
        snaps_.begin(), snaps_.end(), t,
        [](double lhs, const Snapshot& s) { return lhs < s.t; });
    if (it == snaps_.begin()) {
        throw MissingSnapshot("no snapshot at or before t=" + std::to_string(t));
    }
    return *std::prev(it);
}

void SnapshotStore::prune(double watermark) {
    while (snaps_.size() >= 2 && snaps_[1].t <= watermark) {
        snaps_.pop_front();
    }
}

double SnapshotStore::latest_time() const {
    return snaps_.empty() ? -kInfTime : snaps_.back().t;
}

bool sample_staleness(double pod_v, Rng& rng) {
    return rng.bernoulli(pod_v);
}

InformationView get_view(const SnapshotStore& store, double previous_epoch,
                         double decision_time, double pod_v, Rng& rng) {
    if (sample_staleness(pod_v, rng)) {
        return {store.lookup(previous_epoch), true};
    }
    return {store.lookup(decision_time), false};
}

}  // namespace evacsim
