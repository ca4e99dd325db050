#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "evacsim/scenario.hpp"
#include "evacsim/sim.hpp"
#include "evacsim/types.hpp"

namespace evacsim {

struct SweepSpec {
    std::vector<double> pod_values;
    int runs_per_point = 100;
    PlacementPolicy placement = PlacementPolicy::all_nodes;
    int passengers = 0;
    std::uint64_t base_seed = 0;
};

struct AggregateStats {
    double mean = 0.0;
    double stddev = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// One sweep point: the per-run mean evacuation times plus outcome tallies.
struct PointResult {
    double pod = 0.0;
    std::vector<double> run_means;
    long completed = 0;
    long deadline_missed = 0;
    long trapped = 0;
    long casualty = 0;
};

struct MetricsRow {
    double pod = 0.0;
    int n_runs = 0;
    double mean_s = 0.0;
    double std_s = 0.0;
    double ci_lo_s = 0.0;
    double ci_hi_s = 0.0;
    double ratio = 0.0;
    double ratio_ci_lo = 0.0;
    double ratio_ci_hi = 0.0;
};

struct MetricsTable {
    std::vector<MetricsRow> rows;     // sorted by pod
    std::vector<PointResult> points;  // per-run raw means retained
    std::uint64_t base_seed = 0;
};

// Student-t 97.5% quantile for the given degrees of freedom.
double t_quantile_975(int dof);

// Upper one-sided t quantile (1 - alpha) for paired tests.
double t_quantile_one_sided(int dof, double alpha);

// Sample mean, n-1 std, and mean +- t * std/sqrt(n). Throws
// InsufficientSamples for fewer than two samples.
AggregateStats aggregate(const std::vector<double>& samples);

// Spearman rank correlation (average ranks on ties).
double spearman_rho(std::span<const double> x, std::span<const double> y);

// One-sided paired t statistic for mean(after - before) > 0.
double paired_t_statistic(std::span<const double> before,
                          std::span<const double> after);

// Runs `runs` simulations at the given pod override; run i uses seed
// base_seed + i. Placement and every stochastic draw re-randomize per run.
PointResult run_point(const EvacGraph& graph, const SimConfig& config,
                      double pod, int runs, std::uint64_t base_seed);

// Ratio vs the baseline row plus a bootstrap percentile CI (2000 resamples).
// Throws MissingBaseline when no row matches baseline_pod.
void performance_ratio(MetricsTable& table, double baseline_pod = 0.0);

// Full experiment: run_point per pod value, aggregate, ratios. The spec's
// placement/passengers override the scenario's. Points may run concurrently;
// output is identical regardless of completion order.
MetricsTable sweep(const EvacGraph& graph, const SimConfig& config,
                   const SweepSpec& spec);

// CSV with the exact header
// pod,n_runs,mean_s,std_s,ci_lo_s,ci_hi_s,ratio,ratio_ci_lo,ratio_ci_hi
// rows sorted by pod, six decimals. Throws IoError; empty tables refused.
void export_csv(const MetricsTable& table, const std::filesystem::path& path);

// Two whitespace-separated series files: time_vs_pod.dat and
// ratio_vs_pod.dat (pod, value, ci_lo, ci_hi).
void export_plotdata(const MetricsTable& table,
                     const std::filesystem::path& dir);

// Worker cap for parallel runs: EVACSIM_THREADS, else hardware concurrency.
unsigned worker_count();

}  // namespace evacsim
