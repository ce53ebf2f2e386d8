#include "descent/analysis.hpp"

#include <cmath>

namespace descent {

std::string to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::LocalMinimumLike: return "LocalMinimumLike";
        case CriticalKind::Saddle: return "Saddle";
        case CriticalKind::GeneralisedSaddle: return "GeneralisedSaddle";
        case CriticalKind::Degenerate: return "Degenerate";
        case CriticalKind::NotCritical: return "NotCritical";
    }
    return "?";
}

CriticalPointClass classify_critical_point(const Objective& obj, const Vec& x,
                                           double grad_tol, double eig_tol_rel) {
    require_finite(x, "classify_critical_point");
    if (!(grad_tol > 0.0) || !(eig_tol_rel > 0.0))
        throw ConfigError("classify_critical_point: tolerances must be positive");

    CriticalPointClass out;
    out.grad_norm = obj.grad(x).norm();
    if (!std::isfinite(out.grad_norm))
        throw EvaluationError("classify_critical_point: non-finite gradient");
    if (out.grad_norm > grad_tol) {
        out.kind = CriticalKind::NotCritical;
        out.min_eigenvalue = out.max_eigenvalue = std::nan("");
        return out;
    }

    if (!obj.is_smooth_at(x))
        throw NonSmoothError("classify_critical_point: Hessian refused at a non-C^2 point");
    const Mat H = obj.has_hessian() ? obj.hessian(x) : fd_hessian(obj, x);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const Vec ev = es.eigenvalues();
    out.min_eigenvalue = ev.minCoeff();
    out.max_eigenvalue = ev.maxCoeff();

    const double tol = eig_tol_rel * ev.cwiseAbs().maxCoeff();
    const bool nonsingular = (ev.cwiseAbs().array() > tol).all();
    out.generalised = out.min_eigenvalue < -tol;

    if (out.generalised && out.max_eigenvalue > tol && nonsingular)
        out.kind = CriticalKind::Saddle;
    else if (out.generalised)
        out.kind = CriticalKind::GeneralisedSaddle;
    else if (out.min_eigenvalue > tol)
        out.kind = CriticalKind::LocalMinimumLike;
    else
        out.kind = CriticalKind::Degenerate;
    return out;
}

ArmijoTraceReport verify_armijo_trace(const Trace& trace, double alpha) {
    ArmijoTraceReport report;
    for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
        const TraceRecord& a = trace.records[i];
        const TraceRecord& b = trace.records[i + 1];
        const double bound = -alpha * a.step_size * a.grad_norm * a.grad_norm +
                             1e-12 * (1.0 + std::abs(a.f));
        if (b.f - a.f > bound) report.violating_records.push_back(a.n);
    }
    return report;
}

DescentLemmaReport descent_lemma_check(const Objective& obj, const Vec& x, double L,
                                       std::span<const double> deltas) {
    require_finite(x, "descent_lemma_check");
    if (!(L > 0.0)) throw ConfigError("descent_lemma_check: L must be positive");
    DescentLemmaReport report;
    const Vec g = obj.grad(x);
    const double g2 = g.squaredNorm();
    const double fx = obj.f(x);
    for (double d : deltas) {
        const double lhs = obj.f(x - d * g) - fx;
        const double bound = -d * (1.0 - d * L / 2.0) * g2;
        if (lhs > bound + 1e-10 * (1.0 + std::abs(fx) + std::abs(bound)))
            report.violating_deltas.push_back(d);
    }
    return report;
}

namespace {

// Least-squares slope of log(values) against the record index; NaN if fewer
// than 3 positive values.
double log_slope(const std::vector<double>& values) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] > 0.0) pts.emplace_back(double(i), std::log(values[i]));
    if (pts.size() < 3) return std::nan("");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [u, v] : pts) {
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
    }
    const double n = double(pts.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nan("");
    return (n * sxy - sx * sy) / denom;
}

} // namespace

TrajectoryDiagnostics trajectory_diagnostics(const Objective& obj, const Trace& trace,
                                             double grad_tol) {
    if (trace.records.empty())
        throw ConfigError("trajectory_diagnostics: empty trace");
    TrajectoryDiagnostics out;

    const std::size_t n = trace.records.size();
    const std::size_t first = n > 20 ? n - 20 : 0;
    std::vector<double> steps, radii;
    for (std::size_t i = first; i < n; ++i) {
        // ||x_{n+1} - x_n|| = step * ||grad f(x_n)||; terminal record has step 0
        const TraceRecord& r = trace.records[i];
        if (r.step_size > 0.0) steps.push_back(r.step_size * r.grad_norm);
        radii.push_back(r.x.norm());
    }
    out.step_norm_trend = log_slope(steps);
    out.radius_trend = log_slope(radii);

    out.f_monotone = true;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (trace.records[i + 1].f >
            trace.records[i].f + 1e-12 * (1.0 + std::abs(trace.records[i].f)))
            out.f_monotone = false;

    const Vec& terminal = trace.records.back().x;
    try {
        out.terminal = classify_critical_point(obj, terminal, grad_tol);
        out.terminal_label = to_string(out.terminal->kind);
    } catch (const Error& e) {
        out.terminal_label = std::string("unclassified: ") + e.what();
    }
    return out;
}

} // namespace descent
