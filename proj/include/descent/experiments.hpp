#pragma once

#include <cstdint>
#include <map>

#include "descent/analysis.hpp"
#include "descent/corpus.hpp"
#include "descent/smoothrate.hpp"

namespace descent {

/// Sampling ranges for the "random choices of delta0, alpha, beta"
/// protocol: delta0 log-uniform, alpha and beta uniform. Drawn once per
/// sweep, before any run.
struct ParamRanges {
    double delta0_lo = 1e-2, delta0_hi = 1.0;
    double alpha_lo = 0.1, alpha_hi = 0.9;
    double beta_lo = 0.1, beta_hi = 0.9;
};

struct SweepConfig {
    std::string objective = "double_well";
    Params objective_params;
    Rule rule;
    BacktrackParams params;
    bool random_params = false; // draw (delta0, alpha, beta) from ranges
    ParamRanges ranges;
    Box init_box;
    long n_runs = 1000;
    std::uint64_t seed = 0;
    RunConfig run_config;
    double classify_eig_tol = 1e-6;
};

struct SweepReport {
    SweepConfig config;              // echo
    BacktrackParams effective_params; // after the random draw, if any

    std::map<std::string, long> class_counts; // converged runs by terminal class
    long saddle_hits = 0;   // terminal class Saddle or GeneralisedSaddle
    long unclassified = 0;  // converged, Hessian refused at the terminal
    long diverged = 0;
    long nonconverged = 0;  // iteration cap
    long step_collapsed = 0;
    long left_box = 0;      // continuous rule only
    double mean_iterations = 0.0;

    struct Terminal {
        Vec x;
        double f = 0.0;
    };
    std::vector<Terminal> converged_terminals;

    long total() const {
        long conv = unclassified;
        for (const auto& [k, v] : class_counts) conv += v;
        return conv + diverged + nonconverged + step_collapsed + left_box;
    }
};

/// Random-restart sweep: n_runs initial points drawn uniformly from the
/// init box with the seeded generator; per-run failures are counted, never
/// fatal. Deterministic given the config (including across n_threads).
SweepReport sweep(const SweepConfig& cfg, int n_threads = 1);

struct Basin {
    Vec representative; // centroid of the cluster's members
    long count = 0;
    double mean_f = 0.0;
};

/// Greedy clustering of converged terminals at cluster_radius (anchored on
/// first members, so grouping is deterministic), sorted by count
/// (descending), then by representative coordinates.
std::vector<Basin> basin_statistics(const SweepReport& report, double cluster_radius);

} // namespace descent
