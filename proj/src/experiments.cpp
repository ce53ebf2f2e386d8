#include "descent/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace descent {

namespace {

struct RunResult {
    StopReason stop = StopReason::MaxIterations;
    std::string klass; // terminal class for converged runs, "" otherwise
    bool saddle = false;
    Vec terminal;
    double terminal_f = 0.0;
    long iterations = 0;
};

RunResult one_run(const Objective& obj, const SweepConfig& cfg,
                  const BacktrackParams& params, const Vec& x0) {
    RunResult res;
    Trace trace = run(obj, x0, cfg.rule, params, cfg.run_config);
    res.stop = trace.stop_reason;
    res.iterations = trace.records.back().n;
    if (trace.stop_reason == StopReason::GradientTolerance) {
        res.terminal = trace.records.back().x;
        res.terminal_f = trace.records.back().f;
        try {
            const CriticalPointClass c = classify_critical_point(
                obj, res.terminal, cfg.run_config.grad_tol, cfg.classify_eig_tol);
            res.klass = to_string(c.kind);
            res.saddle = c.kind == CriticalKind::Saddle ||
                         c.kind == CriticalKind::GeneralisedSaddle;
        } catch (const Error&) {
            res.klass = ""; // non-C^2 terminal: counted as unclassified
        }
    }
    return res;
}

} // namespace

SweepReport sweep(const SweepConfig& cfg, int n_threads) {
    if (cfg.n_runs < 1) throw ConfigError("sweep: n_runs must be >= 1");
    cfg.init_box.validate(false); // a degenerate box (single point) is a legal probe
    cfg.run_config.validate();
    if (n_threads < 1) n_threads = 1;

    const Objective obj = corpus_get(cfg.objective, cfg.objective_params);
    if (obj.dim != cfg.init_box.dim())
        throw ConfigError("sweep: init box dimension does not match the objective");

    SweepReport report;
    report.config = cfg;

    std::mt19937_64 rng(cfg.seed);
    BacktrackParams params = cfg.params;
    if (cfg.random_params) {
        // One draw per sweep: the triple is fixed before any run iterates.
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double lo = std::log(cfg.ranges.delta0_lo), hi = std::log(cfg.ranges.delta0_hi);
        params.delta0 = std::exp(lo + (hi - lo) * u01(rng));
        params.alpha = cfg.ranges.alpha_lo +
                       (cfg.ranges.alpha_hi - cfg.ranges.alpha_lo) * u01(rng);
        params.beta = cfg.ranges.beta_lo +
                      (cfg.ranges.beta_hi - cfg.ranges.beta_lo) * u01(rng);
    }
    params.validate();
    report.effective_params = params;

    std::vector<Vec> inits(cfg.n_runs);
    for (long i = 0; i < cfg.n_runs; ++i) inits[i] = cfg.init_box.sample(rng);

    std::vector<RunResult> results(cfg.n_runs);
    auto work = [&](long begin, long end) {
        for (long i = begin; i < end; ++i)
            results[i] = one_run(obj, cfg, params, inits[i]);
    };
    if (n_threads == 1 || cfg.n_runs < 2 * n_threads) {
        work(0, cfg.n_runs);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (cfg.n_runs + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const long b = t * chunk, e = std::min<long>(cfg.n_runs, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }

    double iter_sum = 0.0;
    for (const RunResult& r : results) {
        iter_sum += double(r.iterations);
        switch (r.stop) {
            case StopReason::GradientTolerance:
                if (r.klass.empty()) {
                    ++report.unclassified;
                } else {
                    ++report.class_counts[r.klass];
                    if (r.saddle) ++report.saddle_hits;
                }
                report.converged_terminals.push_back({r.terminal, r.terminal_f});
                break;
            case StopReason::Diverged: ++report.diverged; break;
            case StopReason::MaxIterations: ++report.nonconverged; break;
            case StopReason::StepCollapse: ++report.step_collapsed; break;
            case StopReason::LeftBox: ++report.left_box; break;
        }
    }
    report.mean_iterations = iter_sum / double(cfg.n_runs);
    return report;
}

std::vector<Basin> basin_statistics(const SweepReport& report, double cluster_radius) {
    if (!(cluster_radius > 0.0))
        throw ConfigError("basin_statistics: cluster_radius must be positive");
    // Greedy assignment against the first member of each cluster keeps the
    // grouping deterministic; the reported representative is the centroid.
    std::vector<Vec> anchors, coord_sums;
    std::vector<Basin> basins;
    std::vector<double> f_sums;
    for (const auto& t : report.converged_terminals) {
        bool placed = false;
        for (std::size_t b = 0; b < basins.size(); ++b) {
            if ((t.x - anchors[b]).norm() <= cluster_radius) {
                ++basins[b].count;
                f_sums[b] += t.f;
                coord_sums[b] += t.x;
                placed = true;
                break;
            }
        }
        if (!placed) {
            anchors.push_back(t.x);
            coord_sums.push_back(t.x);
            basins.push_back({t.x, 1, 0.0});
            f_sums.push_back(t.f);
        }
    }
    for (std::size_t b = 0; b < basins.size(); ++b) {
        basins[b].mean_f = f_sums[b] / double(basins[b].count);
        basins[b].representative = coord_sums[b] / double(basins[b].count);
    }
    std::sort(basins.begin(), basins.end(), [](const Basin& a, const Basin& b) {
        if (a.count != b.count) return a.count > b.count;
        return std::lexicographical_compare(a.representative.begin(), a.representative.end(),
                                            b.representative.begin(), b.representative.end());
    });
    return basins;
}

} // namespace descent
