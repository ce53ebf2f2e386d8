#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "descent/objective.hpp"

namespace descent {

struct SmoothRate; // smoothrate.hpp

struct BacktrackParams {
    double delta0 = 1.0;     // initial / maximal step
    double alpha = 0.5;      // Armijo coefficient, in (0,1)
    double beta = 0.5;       // ladder ratio, in (0,1)
    int max_halvings = 60;   // cap on m in beta^m * delta0

    void validate() const;
};

/// Step sizes live on the geometric ladder {beta^m * delta0}. All rules
/// compute them through this one function so ladder values compare
/// bit-for-bit across rules and oracles.
inline double ladder_step(const BacktrackParams& p, int m) {
    return std::pow(p.beta, m) * p.delta0;
}

// Caution for callers picking tolerances: once alpha * d * ||g||^2 drops
// below one ulp of f(x), the Armijo comparison is rounding noise and the
// search can exhaust its ladder. Keep grad_tol above that shell
// (roughly sqrt(eps * |f|) gradients) for objectives with f != 0 at the
// minimum.

struct StepOutcome {
    Vec next;
    double step_size = 0.0;
    int backtracks = 0;
    // The realized sufficient-decrease inequality: lhs = f(next) - f(x),
    // rhs = the decrease the rule guarantees (-alpha*step*||g||^2 for the
    // Armijo family, -(1-alpha)*step*||g||^2 for gd_new). Standard GD
    // reports the Armijo pair without guaranteeing it.
    double armijo_lhs = 0.0;
    double armijo_rhs = 0.0;
};

struct RunConfig {
    long max_iters = 100000;
    double grad_tol = 1e-8;
    double divergence_radius = 1e8;
    long record_every = 1;

    void validate() const;
};

enum class StopReason { GradientTolerance, MaxIterations, Diverged, StepCollapse, LeftBox };

std::string to_string(StopReason r);

struct TraceRecord {
    long n = 0;
    Vec x;
    double f = 0.0;
    double grad_norm = 0.0;
    double step_size = 0.0; // step taken from this iterate; 0 on the terminal record
    int backtracks = 0;
};

struct Trace {
    std::vector<TraceRecord> records;
    StopReason stop_reason = StopReason::MaxIterations;
    std::string context; // detail for StepCollapse / LeftBox stops
};

// --- step rules -------------------------------------------------------------

/// x - delta * grad f(x) with a constant step. No descent guarantee.
StepOutcome standard_gd_step(const Objective& obj, const Vec& x, double delta);

/// Largest ladder step satisfying the Armijo condition
/// f(x - d g) - f(x) <= -alpha d ||g||^2 (non-strict).
StepOutcome armijo_backtrack(const Objective& obj, const Vec& x, const BacktrackParams& p);

/// Armijo search warm-started at prev_step: climbs the ladder while the
/// next-larger step (capped at delta0) still satisfies Armijo, otherwise
/// backtracks until it holds.
StepOutcome two_way_backtrack(const Objective& obj, const Vec& x, double prev_step,
                              const BacktrackParams& p);

/// Largest ladder step d with d < alpha/L(x) and d ||g|| < r(x) (both
/// strict), using the objective's Lipschitz field.
double delta_hat(const Objective& obj, const Vec& x, const BacktrackParams& p);

/// x - delta_hat(x) * grad f(x); verifies the guaranteed decrease
/// f(next) - f(x) <= -(1-alpha) delta_hat ||g||^2 and throws
/// InvariantError on violation (an invalid Lipschitz field).
StepOutcome gd_new_step(const Objective& obj, const Vec& x, const BacktrackParams& p);

struct MomentumStep {
    StepOutcome outcome;
    Vec velocity; // state for the next call
};

/// Heavy-ball update with the backtracking step size: candidate
/// v' = gamma*velocity + d*g accepted only if it keeps the Armijo decrease,
/// else falls back to the pure backtracking step.
MomentumStep momentum_backtracking_step(const Objective& obj, const Vec& x,
                                        const Vec& velocity, double gamma,
                                        const BacktrackParams& p);

/// As momentum, but the velocity update uses the gradient at the
/// look-ahead point x - gamma*velocity.
MomentumStep nag_backtracking_step(const Objective& obj, const Vec& x,
                                   const Vec& velocity, double gamma,
                                   const BacktrackParams& p);

// --- run driver -------------------------------------------------------------

enum class RuleKind { Standard, Backtracking, TwoWay, GdNew, MomentumBt, NagBt, Continuous };

RuleKind rule_from_string(const std::string& s);
std::string to_string(RuleKind k);

/// True for rules that guarantee a sufficient-decrease inequality per step.
bool is_backtracking_family(RuleKind k);

struct Rule {
    RuleKind kind = RuleKind::Backtracking;
    double gamma = 0.9;               // momentum / NAG coefficient, in [0,1)
    const SmoothRate* rate = nullptr; // required for RuleKind::Continuous
};

/// Iterate the rule from x0 until the gradient tolerance, the iteration cap,
/// the divergence radius, a step collapse, or (continuous rule) box exit.
/// Records every record_every-th iterate plus the terminal one.
Trace run(const Objective& obj, const Vec& x0, const Rule& rule,
          const BacktrackParams& p, const RunConfig& rc);

} // namespace descent
