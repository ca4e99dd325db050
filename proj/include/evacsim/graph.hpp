#pragma once

#include <string>
#include <utility>
#include <vector>

#include "evacsim/types.hpp"

namespace evacsim {

// T_D = T_S - T_A - T_EL. Throws NegativeDeadline if T_S < T_A + T_EL.
DeadlineBudget compute_deadline(double t_s, double t_a, double t_el);

// (tau_typ, tau_wc) = (length/typical, length/worst_case).
// Throws InvalidSpeed unless 0 < worst_case <= typical and length > 0.
std::pair<double, double> edge_times(double length_m, double typical_mps,
                                     double worst_case_mps);

// Returns one human-readable string per violated invariant; empty iff the
// graph is well-formed. Violations are data, not errors.
std::vector<std::string> validate(const EvacGraph& graph);

// Default concurrency capacity when a scenario omits it.
int default_edge_capacity(EdgeKind kind, double length_m);

// Default node capacity by kind (cabins 2, exit unbounded).
int default_node_capacity(NodeKind kind);

}  // namespace evacsim
