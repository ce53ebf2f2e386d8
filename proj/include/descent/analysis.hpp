#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "descent/objective.hpp"
#include "descent/steppers.hpp"

namespace descent {

enum class CriticalKind { LocalMinimumLike, Saddle, GeneralisedSaddle, Degenerate, NotCritical };

std::string to_string(CriticalKind k);

struct CriticalPointClass {
    CriticalKind kind = CriticalKind::NotCritical;
    bool generalised = false; // at least one negative eigenvalue; set for every Saddle too
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double grad_norm = 0.0;
};

/// Spectral classification of a (near-)critical point.
///   NotCritical        ||grad f|| > grad_tol (spectrum not computed)
///   Saddle             nonsingular Hessian with eigenvalues of both signs
///   GeneralisedSaddle  some eigenvalue < -tol but not a Saddle
///   LocalMinimumLike   all eigenvalues > tol
///   Degenerate         everything else
/// eig_tol_rel is relative to max |eigenvalue|. Refuses non-C^2 points
/// (NonSmoothError) rather than approximating there.
CriticalPointClass classify_critical_point(const Objective& obj, const Vec& x,
                                           double grad_tol = 1e-8,
                                           double eig_tol_rel = 1e-6);

struct ArmijoTraceReport {
    std::vector<long> violating_records; // record indices n that break the bound
    bool pass() const { return violating_records.empty(); }
};

/// Checks f(x_{n+1}) - f(x_n) <= -alpha d_n ||grad f(x_n)||^2 (plus a
/// 1e-12 (1+|f|) float allowance) between consecutive trace records. Valid
/// for sparse records too: f is non-increasing between them for every
/// Armijo-guaranteeing rule.
ArmijoTraceReport verify_armijo_trace(const Trace& trace, double alpha);

struct DescentLemmaReport {
    std::vector<double> violating_deltas;
    bool pass() const { return violating_deltas.empty(); }
};

/// Checks the descent estimate f(x - d g) - f(x) <= -d (1 - d L / 2)
/// ||g||^2 for each delta, with 1e-10 relative tolerance. Requires L to be
/// a gradient Lipschitz constant along each probed segment.
DescentLemmaReport descent_lemma_check(const Objective& obj, const Vec& x, double L,
                                       std::span<const double> deltas);

struct TrajectoryDiagnostics {
    // Least-squares slope of log ||x_{n+1} - x_n|| (per-record step norms)
    // resp. log ||x_n|| over the final <= 20 records; NaN when undefined.
    double step_norm_trend = 0.0;
    double radius_trend = 0.0;
    bool f_monotone = false;
    std::optional<CriticalPointClass> terminal; // absent where the Hessian is refused
    std::string terminal_label;                 // class name, or why it is missing
};

TrajectoryDiagnostics trajectory_diagnostics(const Objective& obj, const Trace& trace,
                                             double grad_tol = 1e-8);

} // namespace descent
