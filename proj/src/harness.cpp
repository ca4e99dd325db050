#include "evacsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "evacsim/errors.hpp"
#include "evacsim/rng.hpp"

namespace evacsim {

namespace {

constexpr int kBootstrapResamples = 2000;

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

std::vector<double> ranks_of(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Deterministic bootstrap seed per (base_seed, pod) pair.
std::uint64_t bootstrap_seed(std::uint64_t base_seed, double pod) {
    return base_seed ^ (std::bit_cast<std::uint64_t>(pod) * 0x9e3779b97f4a7c15ULL);
}

}  // namespace

unsigned worker_count() {
    if (const char* env = std::getenv("EVACSIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

double t_quantile_975(int dof) {
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.975);
}

double t_quantile_one_sided(int dof, double alpha) {
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 1.0 - alpha);
}

AggregateStats aggregate(const std::vector<double>& samples) {
    if (samples.size() < 2) {
        throw InsufficientSamples("aggregate needs at least 2 samples, got " +
                                  std::to_string(samples.size()));
    }
    for (double s : samples) {
        if (std::isnan(s)) {
            throw InsufficientSamples("aggregate received a NaN sample");
        }
    }
    AggregateStats out;
    const std::size_t n = samples.size();
    out.mean = mean_of(samples);
    double ss = 0.0;
    for (double s : samples) ss += (s - out.mean) * (s - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    const double half =
        t_quantile_975(static_cast<int>(n) - 1) * out.stddev / std::sqrt(n);
    out.ci_lo = out.mean - half;
    out.ci_hi = out.mean + half;
    return out;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InsufficientSamples("spearman needs two equal-length series");
    }
    const auto rx = ranks_of(x);
    const auto ry = ranks_of(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

double paired_t_statistic(std::span<const double> before,
                          std::span<const double> after) {
    if (before.size() != after.size() || before.size() < 2) {
        throw InsufficientSamples("paired test needs two equal-length series");
    }
    const std::size_t n = before.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = after[i] - before[i];
    const double md = mean_of(diff);
    double ss = 0.0;
    for (double d : diff) ss += (d - md) * (d - md);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) return md > 0 ? kInfTime : (md < 0 ? -kInfTime : 0.0);
    return md / (sd / std::sqrt(static_cast<double>(n)));
}

PointResult run_point(const EvacGraph& graph, const SimConfig& config,
                      double pod, int runs, std::uint64_t base_seed) {
    PointResult point;
    point.pod = pod;
    point.run_means.assign(runs, 0.0);

    SimConfig run_cfg = config;
    run_cfg.delay.default_pod = pod;
    run_cfg.delay.per_node.clear();

    std::vector<long> missed(runs), trapped(runs), casualty(runs), completed(runs);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    const auto body = [&]() {
        for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
            if (failed.load()) return;
            try {
                const RunResult r = run(graph, run_cfg, base_seed + i);
                if (r.completed() == 0 && r.total > 0) {
                    throw ConfigError("no evacuee completed");
                }
                point.run_means[i] = r.total > 0 ? r.mean_evac_time_s : 0.0;
                completed[i] = r.completed();
                missed[i] = r.deadline_missed;
                trapped[i] = r.trapped;
                casualty[i] = r.casualty;
            } catch (const std::exception& e) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failed.exchange(true)) {
                    failure = "run " + std::to_string(i) + " (seed " +
                              std::to_string(base_seed + i) + "): " + e.what();
                }
            }
        }
    };

    const unsigned workers =
        std::min<unsigned>(worker_count(), static_cast<unsigned>(runs));
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw ConfigError("sweep point pod=" + std::to_string(pod) +
                                         " failed: " + failure);

    for (int i = 0; i < runs; ++i) {
        point.completed += completed[i];
        point.deadline_missed += missed[i];
        point.trapped += trapped[i];
        point.casualty += casualty[i];
    }
    return point;
}

void performance_ratio(MetricsTable& table, double baseline_pod) {
    const PointResult* baseline = nullptr;
    for (const auto& p : table.points) {
        if (p.pod == baseline_pod) baseline = &p;
    }
    if (baseline == nullptr) {
        throw MissingBaseline("no pod=" + std::to_string(baseline_pod) +
                              " point in table");
    }
    const double base_mean = mean_of(baseline->run_means);

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        MetricsRow& row = table.rows[r];
        const PointResult& point = table.points[r];
        if (&point == baseline) {
            row.ratio = 1.0;
            row.ratio_ci_lo = 1.0;
            row.ratio_ci_hi = 1.0;
            continue;
        }
        row.ratio = mean_of(point.run_means) / base_mean;

        Rng rng(bootstrap_seed(table.base_seed, point.pod));
        std::vector<double> ratios(kBootstrapResamples);
        const auto resample_mean = [&rng](const std::vector<double>& xs) {
            double sum = 0.0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                sum += xs[rng.below(xs.size())];
            }
            return sum / xs.size();
        };
        for (int b = 0; b < kBootstrapResamples; ++b) {
            ratios[b] = resample_mean(point.run_means) /
                        resample_mean(baseline->run_means);
        }
        std::sort(ratios.begin(), ratios.end());
        const auto rank = [&](double q) {
            const auto idx = static_cast<std::size_t>(
                std::ceil(q * kBootstrapResamples)) - 1;
            return ratios[std::min<std::size_t>(idx, ratios.size() - 1)];
        };
        row.ratio_ci_lo = rank(0.025);
        row.ratio_ci_hi = rank(0.975);
    }
}

MetricsTable sweep(const EvacGraph& graph, const SimConfig& config,
                   const SweepSpec& spec) {
    if (spec.pod_values.empty()) {
        throw ConfigError("sweep needs at least one pod value");
    }
    for (double p : spec.pod_values) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("pod values must lie in [0, 1]");
        }
    }
    if (spec.runs_per_point < 2) {
        throw InsufficientSamples("sweep needs runs_per_point >= 2");
    }

    SimConfig cfg = config;
    cfg.placement = spec.placement;
    cfg.passengers = spec.passengers;

    MetricsTable table;
    table.base_seed = spec.base_seed;
    std::vector<double> pods = spec.pod_values;
    std::sort(pods.begin(), pods.end());
    pods.erase(std::unique(pods.begin(), pods.end()), pods.end());

    for (double pod : pods) {
        PointResult point =
            run_point(graph, cfg, pod, spec.runs_per_point, spec.base_seed);
        const AggregateStats stats = aggregate(point.run_means);
        MetricsRow row;
        row.pod = pod;
        row.n_runs = spec.runs_per_point;
        row.mean_s = stats.mean;
        row.std_s = stats.stddev;
        row.ci_lo_s = stats.ci_lo;
        row.ci_hi_s = stats.ci_hi;
        table.rows.push_back(row);
        table.points.push_back(std::move(point));
    }
    if (std::find(pods.begin(), pods.end(), 0.0) != pods.end()) {
        performance_ratio(table, 0.0);
    }
    return table;
}

void export_csv(const MetricsTable& table, const std::filesystem::path& path) {
    if (table.rows.empty()) {
        throw IoError("refusing to export an empty metrics table");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "pod,n_runs,mean_s,std_s,ci_lo_s,ci_hi_s,ratio,ratio_ci_lo,ratio_ci_hi\n";
    for (const MetricsRow& row : table.rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%.6f,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", row.pod,
                      row.n_runs, row.mean_s, row.std_s, row.ci_lo_s,
                      row.ci_hi_s, row.ratio, row.ratio_ci_lo, row.ratio_ci_hi);
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void export_plotdata(const MetricsTable& table,
                     const std::filesystem::path& dir) {
    if (table.rows.empty()) {
        throw IoError("refusing to export an empty metrics table");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto write_series = [&](const char* name, auto value, auto lo, auto hi) {
        const auto path = dir / name;
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << "# pod value ci_lo ci_hi\n";
        for (const MetricsRow& row : table.rows) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f\n", row.pod,
                          value(row), lo(row), hi(row));
            out << buf;
        }
        if (!out) throw IoError("failed writing " + path.string());
    };
    write_series(
        "time_vs_pod.dat", [](const MetricsRow& r) { return r.mean_s; },
        [](const MetricsRow& r) { return r.ci_lo_s; },
        [](const MetricsRow& r) { return r.ci_hi_s; });
    write_series(
        "ratio_vs_pod.dat", [](const MetricsRow& r) { return r.ratio; },
        [](const MetricsRow& r) { return r.ratio_ci_lo; },
        [](const MetricsRow& r) { return r.ratio_ci_hi; });
}

}  // namespace evacsim
