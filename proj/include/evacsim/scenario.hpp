#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "evacsim/hazard.hpp"
#include "evacsim/info_delay.hpp"
#include "evacsim/types.hpp"

namespace evacsim {

enum class PlacementPolicy : std::uint8_t {
    all_nodes,
    cabins,
    restaurant,
    split_half,
};

enum class TraversalMode : std::uint8_t {
    typical,
    lognormal_jitter,
    worst_case,
};

// Budget initialization: the normal deadline, or per-origin worst-case
// distance (used by the guarantee tests).
enum class BudgetInit : std::uint8_t { deadline, worst_case_distance };

const char* to_string(PlacementPolicy policy);
std::optional<PlacementPolicy> placement_from_string(const std::string& s);

struct SimConfig {
    std::string name;
    std::uint64_t scenario_seed = 0;  // generation provenance from meta.seed
    Speeds speeds;
    DeadlineBudget deadline;
    std::vector<HazardFront> hazard_fronts;
    InclinationSchedule inclination;  // empty -> multiplier 1
    DelayConfig delay;
    PlacementPolicy placement = PlacementPolicy::all_nodes;
    int passengers = 0;  // required for cabins/restaurant/split_half

    // Engine knobs, not part of the scenario file.
    TraversalMode traversal_mode = TraversalMode::lognormal_jitter;
    double jitter_sigma = 0.1;
    double wait_quantum_s = 5.0;   // re-decision delay on blocked discovery
    double time_cap_factor = 4.0;  // run ends at time_cap_factor * T_D
    bool congestion_aware = true;
    bool audit_every_event = false;
    bool bypass_delay_layer = false;
    bool record_trace = false;
    bool strict_inclination_wc = false;
    BudgetInit budget_init = BudgetInit::deadline;

    // FNV digest of the run-relevant configuration.
    std::uint64_t digest(const EvacGraph& graph) const;
};

// Parses and validates a scenario file. Throws ParseError on malformed
// input (including unknown keys), ValidationError when graph invariants
// fail, IoError when the file cannot be read.
std::pair<EvacGraph, SimConfig> load_scenario(const std::filesystem::path& path);

// Same, from an in-memory JSON document.
std::pair<EvacGraph, SimConfig> parse_scenario(const std::string& text);

// Serializes graph + config back to the scenario schema (taus never stored).
std::string scenario_to_json(const EvacGraph& graph, const SimConfig& config);
void save_scenario(const std::filesystem::path& path, const EvacGraph& graph,
                   const SimConfig& config);

}  // namespace evacsim
