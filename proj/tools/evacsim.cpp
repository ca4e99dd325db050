#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evacsim/errors.hpp"
#include "evacsim/graph.hpp"
#include "evacsim/harness.hpp"
#include "evacsim/layout.hpp"
#include "evacsim/scenario.hpp"
#include "evacsim/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

struct CommonRunArgs {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string placement = "all";
    int passengers = 0;
    std::string out_dir;
};

evacsim::PlacementPolicy parse_placement(const std::string& s) {
    const auto policy = evacsim::placement_from_string(s);
    if (!policy) {
        throw evacsim::ConfigError("unknown placement '" + s +
                                   "' (expected all|cabins|restaurant|split)");
    }
    return *policy;
}

void apply_placement(evacsim::SimConfig& config, const CommonRunArgs& args,
                     bool passengers_given) {
    config.placement = parse_placement(args.placement);
    if (passengers_given) config.passengers = args.passengers;
    if (config.placement != evacsim::PlacementPolicy::all_nodes &&
        config.passengers <= 0) {
        throw evacsim::ConfigError("--passengers is required for placement '" +
                                   args.placement + "'");
    }
}

int cmd_validate(const std::string& scenario_path) {
    const auto [graph, config] = evacsim::load_scenario(scenario_path);
    // load_scenario throws on violations; re-run for the report line.
    const auto violations = evacsim::validate(graph);
    std::printf("ok: %zu nodes, %zu edges, exit=%u, T_D=%.1f s\n",
                graph.node_count(), graph.edge_count(), graph.exit,
                config.deadline.t_d);
    return violations.empty() ? kExitOk : kExitValidation;
}

int cmd_gen_layout(int decks, int stairs, int target_nodes, std::uint64_t seed,
                   const std::string& out_path) {
    evacsim::LayoutSpec spec;
    spec.decks = decks;
    spec.stairs = stairs;
    spec.seed = seed;
    spec.cabins_per_deck = evacsim::cabins_for_target_nodes(spec, target_nodes);
    const evacsim::EvacGraph graph = evacsim::generate_layout(spec);

    evacsim::SimConfig config;
    config.name = "synthetic-" + std::to_string(decks) + "d-" +
                  std::to_string(target_nodes) + "n";
    config.scenario_seed = seed;
    config.speeds = graph.speeds;
    config.deadline = evacsim::compute_deadline(3600.0, 300.0, 1500.0);
    config.placement = evacsim::PlacementPolicy::all_nodes;
    evacsim::save_scenario(out_path, graph, config);

    int passageways = 0, staircases = 0;
    for (const auto& e : graph.edges) {
        (e.kind == evacsim::EdgeKind::passageway ? passageways : staircases)++;
    }
    std::printf("wrote %s: %zu nodes, %d passageways, %d staircases\n",
                out_path.c_str(), graph.node_count(), passageways, staircases);
    return kExitOk;
}

int cmd_run(const CommonRunArgs& args, bool passengers_given, double pod,
            int runs, bool trace) {
    auto [graph, config] = evacsim::load_scenario(args.scenario);
    apply_placement(config, args, passengers_given);
    config.delay.default_pod = pod;
    config.delay.per_node.clear();
    config.record_trace = trace;

    const std::filesystem::path out_dir(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    const auto runs_path = out_dir / "runs.csv";
    std::ofstream runs_csv(runs_path);
    if (!runs_csv) throw evacsim::IoError("cannot write " + runs_path.string());
    runs_csv << "run,seed,mean_s,evacuated,deadline_missed,trapped,casualty,"
                "trace_hash\n";
    for (int i = 0; i < runs; ++i) {
        const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(i);
        const evacsim::RunResult r = evacsim::run(graph, config, seed);
        char buf[192];
        std::snprintf(buf, sizeof(buf), "%d,%llu,%.6f,%d,%d,%d,%d,%016llx\n", i,
                      static_cast<unsigned long long>(seed), r.mean_evac_time_s,
                      r.evacuated, r.deadline_missed, r.trapped, r.casualty,
                      static_cast<unsigned long long>(r.trace_hash));
        runs_csv << buf;
        if (trace) {
            const auto trace_path =
                out_dir / ("trace_" + std::to_string(i) + ".csv");
            std::ofstream tf(trace_path);
            if (!tf) throw evacsim::IoError("cannot write " + trace_path.string());
            tf << "t,kind,evacuee,place,detail\n";
            for (const auto& line : r.trace) tf << line << "\n";
        }
        std::printf("run %d seed %llu: mean %.2f s, %d/%d evacuated (%d missed, "
                    "%d trapped, %d casualties)\n",
                    i, static_cast<unsigned long long>(seed), r.mean_evac_time_s,
                    r.completed(), r.total, r.deadline_missed, r.trapped,
                    r.casualty);
    }
    if (!runs_csv) throw evacsim::IoError("failed writing " + runs_path.string());
    return kExitOk;
}

int cmd_sweep(const CommonRunArgs& args, bool passengers_given,
              const std::string& pods_csv, int runs) {
    auto [graph, config] = evacsim::load_scenario(args.scenario);
    apply_placement(config, args, passengers_given);

    evacsim::SweepSpec spec;
    spec.runs_per_point = runs;
    spec.placement = config.placement;
    spec.passengers = config.passengers;
    spec.base_seed = args.seed;
    std::size_t pos = 0;
    while (pos < pods_csv.size()) {
        const std::size_t comma = pods_csv.find(',', pos);
        const std::string tok =
            pods_csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            spec.pod_values.push_back(v);
        } catch (const std::exception&) {
            throw evacsim::ConfigError("bad pod value '" + tok + "' in --pods");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }

    const evacsim::MetricsTable table = evacsim::sweep(graph, config, spec);

    const std::filesystem::path out_dir(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    evacsim::export_csv(table, out_dir / "sweep.csv");
    evacsim::export_plotdata(table, out_dir);

    for (const auto& row : table.rows) {
        std::printf("pod %.2f: mean %.2f s (std %.2f, 95%% CI [%.2f, %.2f]), "
                    "ratio %.3f [%.3f, %.3f]\n",
                    row.pod, row.mean_s, row.std_s, row.ci_lo_s, row.ci_hi_s,
                    row.ratio, row.ratio_ci_lo, row.ratio_ci_hi);
    }
    std::printf("wrote %s\n", (out_dir / "sweep.csv").c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ship-evacuation simulator: deadline-aware guidance under "
                 "information delay"};
    app.require_subcommand(1);

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    std::string validate_scenario;
    validate_cmd->add_option("--scenario", validate_scenario, "Scenario JSON")
        ->required();

    // gen-layout
    auto* gen_cmd =
        app.add_subcommand("gen-layout", "Generate a synthetic ship scenario");
    int gen_decks = 3, gen_stairs = 5, gen_target_nodes = 346;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen_cmd->add_option("--decks", gen_decks, "Passenger decks");
    gen_cmd->add_option("--stairs", gen_stairs, "Staircase segments");
    gen_cmd->add_option("--target-nodes", gen_target_nodes, "Total node count");
    gen_cmd->add_option("--seed", gen_seed, "Generation seed")->required();
    gen_cmd->add_option("--out", gen_out, "Output scenario path")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "Run simulations at one pod");
    CommonRunArgs run_args;
    double run_pod = 0.0;
    int run_runs = 1;
    bool run_trace = false;
    run_cmd->add_option("--scenario", run_args.scenario, "Scenario JSON")->required();
    run_cmd->add_option("--pod", run_pod, "Probability of delay")->required();
    run_cmd->add_option("--runs", run_runs, "Number of runs");
    run_cmd->add_option("--seed", run_args.seed, "Base seed")->required();
    auto* run_placement =
        run_cmd->add_option("--placement", run_args.placement,
                            "all|cabins|restaurant|split");
    auto* run_passengers =
        run_cmd->add_option("--passengers", run_args.passengers, "Evacuee count");
    run_cmd->add_option("--out", run_args.out_dir, "Output directory")->required();
    run_cmd->add_flag("--trace", run_trace, "Write event traces");
    (void)run_placement;

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "PoD sweep with statistics");
    CommonRunArgs sweep_args;
    std::string sweep_pods;
    int sweep_runs = 100;
    sweep_cmd->add_option("--scenario", sweep_args.scenario, "Scenario JSON")
        ->required();
    sweep_cmd->add_option("--pods", sweep_pods, "Comma-separated pod values")
        ->required();
    sweep_cmd->add_option("--runs", sweep_runs, "Runs per pod value");
    sweep_cmd->add_option("--seed", sweep_args.seed, "Base seed")->required();
    sweep_cmd->add_option("--placement", sweep_args.placement,
                          "all|cabins|restaurant|split");
    auto* sweep_passengers = sweep_cmd->add_option(
        "--passengers", sweep_args.passengers, "Evacuee count");
    sweep_cmd->add_option("--out", sweep_args.out_dir, "Output directory")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(validate_scenario);
        }
        if (gen_cmd->parsed()) {
            return cmd_gen_layout(gen_decks, gen_stairs, gen_target_nodes,
                                  gen_seed, gen_out);
        }
        if (run_cmd->parsed()) {
            return cmd_run(run_args, run_passengers->count() > 0, run_pod,
                           run_runs, run_trace);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep_args, sweep_passengers->count() > 0,
                             sweep_pods, sweep_runs);
        }
    } catch (const evacsim::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const evacsim::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const evacsim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const evacsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
