#include "descent/steppers.hpp"

#include <cmath>

#include "descent/smoothrate.hpp"

namespace descent {

void BacktrackParams::validate() const {
    if (!(delta0 > 0.0)) throw ConfigError("delta0 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
    if (max_halvings < 1) throw ConfigError("max_halvings must be >= 1");
}

void RunConfig::validate() const {
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");
    if (!(divergence_radius > 0.0)) throw ConfigError("divergence_radius must be positive");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::GradientTolerance: return "GradientTolerance";
        case StopReason::MaxIterations: return "MaxIterations";
        case StopReason::Diverged: return "Diverged";
        case StopReason::StepCollapse: return "StepCollapse";
        case StopReason::LeftBox: return "LeftBox";
    }
    return "?";
}

namespace {

Vec checked_grad(const Objective& obj, const Vec& x, const char* where) {
    Vec g = obj.grad(x);
    if (!g.allFinite())
        throw EvaluationError(std::string(where) + ": non-finite gradient");
    return g;
}

// Armijo test at ladder index m; fills the outcome on success.
bool try_armijo(const Objective& obj, const Vec& x, double fx, const Vec& g,
                double g2, const BacktrackParams& p, int m, StepOutcome& out) {
    const double d = ladder_step(p, m);
    Vec next = x - d * g;
    const double lhs = obj.f(next) - fx;
    const double rhs = -p.alpha * d * g2;
    if (lhs <= rhs) { // non-strict, per the displayed condition

        out.next = std::move(next);
        out.step_size = d;
        out.armijo_lhs = lhs;
        out.armijo_rhs = rhs;
        return true;
    }
    return false;
}

} // namespace

StepOutcome standard_gd_step(const Objective& obj, const Vec& x, double delta) {
    if (!(delta > 0.0)) throw ConfigError("standard_gd_step: delta must be positive");
    require_finite(x, "standard_gd_step");
    const Vec g = checked_grad(obj, x, "standard_gd_step");
    StepOutcome out;
    out.next = x - delta * g;
    out.step_size = delta;
    out.backtracks = 0;
    out.armijo_lhs = obj.f(out.next) - obj.f(x);
    out.armijo_rhs = -delta * g.squaredNorm(); // realized inequality only
    return out;
}

StepOutcome armijo_backtrack(const Objective& obj, const Vec& x, const BacktrackParams& p) {
    p.validate();
    require_finite(x, "armijo_backtrack");
    const Vec g = checked_grad(obj, x, "armijo_backtrack");
    const double g2 = g.squaredNorm();
    const double fx = obj.f(x);
    StepOutcome out;
    for (int m = 0; m <= p.max_halvings; ++m) {
        if (try_armijo(obj, x, fx, g, g2, p, m, out)) {
            out.backtracks = m;
            return out;
        }
    }
    throw StepCollapseError("armijo_backtrack: no ladder step within " +
                            std::to_string(p.max_halvings) + " halvings satisfies Armijo");
}

StepOutcome two_way_backtrack(const Objective& obj, const Vec& x, double prev_step,
                              const BacktrackParams& p) {
    p.validate();
    if (!(prev_step > 0.0 && prev_step <= p.delta0))
        throw ConfigError("two_way_backtrack: prev_step must lie in (0, delta0]");
    require_finite(x, "two_way_backtrack");
    const Vec g = checked_grad(obj, x, "two_way_backtrack");
    const double g2 = g.squaredNorm();
    const double fx = obj.f(x);

    // Walk the ladder by integer index starting from the index nearest
    // prev_step; m = 0 is the delta0 cap.
    int m = static_cast<int>(std::lround(std::log(prev_step / p.delta0) / std::log(p.beta)));
    m = std::max(m, 0);

    StepOutcome out;
    if (try_armijo(obj, x, fx, g, g2, p, m, out)) {
        while (m > 0 && try_armijo(obj, x, fx, g, g2, p, m - 1, out)) --m;
        out.backtracks = 0;
        return out;
    }
    int halvings = 0;
    while (m < p.max_halvings) {
        ++m;
        ++halvings;
        if (try_armijo(obj, x, fx, g, g2, p, m, out)) {
            out.backtracks = halvings;
            return out;
        }
    }
    throw StepCollapseError("two_way_backtrack: no ladder step within " +
                            std::to_string(p.max_halvings) + " halvings satisfies Armijo");
}

double delta_hat(const Objective& obj, const Vec& x, const BacktrackParams& p) {
    p.validate();
    require_finite(x, "delta_hat");
    if (!obj.has_lipschitz())
        throw ConfigError("delta_hat: objective has no Lipschitz field");
    const LocalLipschitz lip = obj.lipschitz(x);
    if (!(lip.L > 0.0) || !(lip.r > 0.0))
        throw InvariantError("delta_hat: Lipschitz field returned non-positive L or r");
    const double gn = checked_grad(obj, x, "delta_hat").norm();
    for (int n = 0; n <= p.max_halvings; ++n) {
        const double d = ladder_step(p, n);
        if (d < p.alpha / lip.L && d * gn < lip.r) // both strict
            return d;
    }
    throw StepCollapseError("delta_hat: no ladder step within " +
                            std::to_string(p.max_halvings) +
                            " halvings satisfies both conditions");
}

StepOutcome gd_new_step(const Objective& obj, const Vec& x, const BacktrackParams& p) {
    const double d = delta_hat(obj, x, p);
    const Vec g = obj.grad(x);
    StepOutcome out;
    out.next = x - d * g;
    out.step_size = d;
    out.backtracks = static_cast<int>(std::lround(std::log(d / p.delta0) / std::log(p.beta)));
    const double fx = obj.f(x);
    out.armijo_lhs = obj.f(out.next) - fx;
    out.armijo_rhs = -(1.0 - p.alpha) * d * g.squaredNorm();
    if (out.armijo_lhs > out.armijo_rhs + 1e-12 * (1.0 + std::abs(fx)))
        throw InvariantError("gd_new_step: guaranteed decrease violated; the "
                             "Lipschitz field is not a valid bound near this point");
    return out;
}

MomentumStep momentum_backtracking_step(const Objective& obj, const Vec& x,
                                        const Vec& velocity, double gamma,
                                        const BacktrackParams& p) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ConfigError("momentum: gamma must lie in [0,1)");
    require_finite(velocity, "momentum_backtracking_step");
    StepOutcome pure = armijo_backtrack(obj, x, p);
    const Vec g = obj.grad(x);
    const double d = pure.step_size;

    Vec v = gamma * velocity + d * g;
    Vec candidate = x - v;
    const double fx = obj.f(x);
    const double lhs = obj.f(candidate) - fx;
    const double rhs = -p.alpha * d * g.squaredNorm();
    if (lhs <= rhs) {
        StepOutcome out;
        out.next = std::move(candidate);
        out.step_size = d;
        out.backtracks = pure.backtracks;
        out.armijo_lhs = lhs;
        out.armijo_rhs = rhs;
        return {std::move(out), std::move(v)};
    }
    Vec pure_velocity = d * g;
    return {std::move(pure), std::move(pure_velocity)};
}

MomentumStep nag_backtracking_step(const Objective& obj, const Vec& x,
                                   const Vec& velocity, double gamma,
                                   const BacktrackParams& p) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ConfigError("nag: gamma must lie in [0,1)");
    require_finite(velocity, "nag_backtracking_step");
    StepOutcome pure = armijo_backtrack(obj, x, p);
    const Vec g = obj.grad(x);
    const double d = pure.step_size;

    const Vec look_ahead = x - gamma * velocity;
    const Vec g_ahead = checked_grad(obj, look_ahead, "nag_backtracking_step");
    Vec v = gamma * velocity + d * g_ahead;
    Vec candidate = x - v;
    const double fx = obj.f(x);
    const double lhs = obj.f(candidate) - fx;
    const double rhs = -p.alpha * d * g.squaredNorm();
    if (lhs <= rhs) {
        StepOutcome out;
        out.next = std::move(candidate);
        out.step_size = d;
        out.backtracks = pure.backtracks;
        out.armijo_lhs = lhs;
        out.armijo_rhs = rhs;
        return {std::move(out), std::move(v)};
    }
    Vec pure_velocity = d * g;
    return {std::move(pure), std::move(pure_velocity)};
}

RuleKind rule_from_string(const std::string& s) {
    if (s == "standard") return RuleKind::Standard;
    if (s == "backtracking") return RuleKind::Backtracking;
    if (s == "two_way") return RuleKind::TwoWay;
    if (s == "gd_new") return RuleKind::GdNew;
    if (s == "momentum_bt") return RuleKind::MomentumBt;
    if (s == "nag_bt") return RuleKind::NagBt;
    if (s == "continuous") return RuleKind::Continuous;
    throw ConfigError("unknown rule '" + s + "'");
}

std::string to_string(RuleKind k) {
    switch (k) {
        case RuleKind::Standard: return "standard";
        case RuleKind::Backtracking: return "backtracking";
        case RuleKind::TwoWay: return "two_way";
        case RuleKind::GdNew: return "gd_new";
        case RuleKind::MomentumBt: return "momentum_bt";
        case RuleKind::NagBt: return "nag_bt";
        case RuleKind::Continuous: return "continuous";
    }
    return "?";
}

bool is_backtracking_family(RuleKind k) {
    return k == RuleKind::Backtracking || k == RuleKind::TwoWay ||
           k == RuleKind::GdNew || k == RuleKind::MomentumBt || k == RuleKind::NagBt;
}

Trace run(const Objective& obj, const Vec& x0, const Rule& rule,
          const BacktrackParams& p, const RunConfig& rc) {
    p.validate();
    rc.validate();
    require_finite(x0, "run");
    if (rule.kind == RuleKind::Continuous && !rule.rate)
        throw ConfigError("run: continuous rule requires a SmoothRate");

    Trace trace;
    Vec x = x0;
    Vec velocity = Vec::Zero(x.size());
    double prev_step = p.delta0;

    for (long n = 0;; ++n) {
        if (!x.allFinite() || x.norm() > rc.divergence_radius) {
            trace.records.push_back({n, x, x.allFinite() ? obj.f(x) : 0.0,
                                     x.allFinite() ? obj.grad(x).norm() : 0.0, 0.0, 0});
            trace.stop_reason = StopReason::Diverged;
            return trace;
        }
        double fx, gn;
        try {
            fx = obj.f(x);
            gn = checked_grad(obj, x, "run").norm();
            if (!std::isfinite(fx)) throw EvaluationError("run: non-finite f");
        } catch (const EvaluationError& e) {
            trace.records.push_back({n, x, 0.0, 0.0, 0.0, 0});
            trace.stop_reason = StopReason::StepCollapse;
            trace.context = e.what();
            return trace;
        }
        if (gn <= rc.grad_tol) {
            trace.records.push_back({n, x, fx, gn, 0.0, 0});
            trace.stop_reason = StopReason::GradientTolerance;
            return trace;
        }
        if (n >= rc.max_iters) {
            trace.records.push_back({n, x, fx, gn, 0.0, 0});
            trace.stop_reason = StopReason::MaxIterations;
            return trace;
        }

        StepOutcome out;
        try {
            switch (rule.kind) {
                case RuleKind::Standard:
                    out = standard_gd_step(obj, x, p.delta0);
                    break;
                case RuleKind::Backtracking:
                    out = armijo_backtrack(obj, x, p);
                    break;
                case RuleKind::TwoWay:
                    out = two_way_backtrack(obj, x, prev_step, p);
                    prev_step = out.step_size;
                    break;
                case RuleKind::GdNew:
                    out = gd_new_step(obj, x, p);
                    break;
                case RuleKind::MomentumBt: {
                    MomentumStep ms = momentum_backtracking_step(obj, x, velocity, rule.gamma, p);
                    out = std::move(ms.outcome);
                    velocity = std::move(ms.velocity);
                    break;
                }
                case RuleKind::NagBt: {
                    MomentumStep ms = nag_backtracking_step(obj, x, velocity, rule.gamma, p);
                    out = std::move(ms.outcome);
                    velocity = std::move(ms.velocity);
                    break;
                }
                case RuleKind::Continuous: {
                    if (!rule.rate->covering.box.contains(x)) {
                        trace.records.push_back({n, x, fx, gn, 0.0, 0});
                        trace.stop_reason = StopReason::LeftBox;
                        trace.context = "iterate left the smooth-rate box";
                        return trace;
                    }
                    out = continuous_step(obj, *rule.rate, x);
                    break;
                }
            }
        } catch (const StepCollapseError& e) {
            trace.records.push_back({n, x, fx, gn, 0.0, 0});
            trace.stop_reason = StopReason::StepCollapse;
            trace.context = e.what();
            return trace;
        }

        if (n % rc.record_every == 0)
            trace.records.push_back({n, x, fx, gn, out.step_size, out.backtracks});
        x = std::move(out.next);
    }
}

} // namespace descent
