#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "descent/errors.hpp"

namespace descent {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Local Lipschitz data for the gradient: ||grad f(y) - grad f(z)|| <=
/// L * ||y - z|| for all y, z in the ball B(x, r) around the query point.
struct LocalLipschitz {
    double L = 0.0;
    double r = 0.0;
};

/// An evaluatable objective. Only f and grad are mandatory; the rest are
/// optional capabilities some descent rules and diagnostics require.
///
/// Objectives are immutable after construction and all callables must be
/// pure, so evaluation is safe from many threads at once.
struct Objective {
    int dim = 0;
    std::string name = "custom";

    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad;

    /// Analytic Hessian; empty where unavailable. Must throw NonSmoothError
    /// at points the function is not C^2.
    std::function<Mat(const Vec&)> hessian;

    /// Local Lipschitz field (L(x), r(x)) for grad f; empty if unknown.
    std::function<LocalLipschitz(const Vec&)> lipschitz;

    /// L valid on a caller-specified ball B(center, radius). Provided by
    /// corpus members with an analytic Hessian bound; lets covering
    /// construction use exact bounds instead of sampled estimates.
    std::function<double(const Vec&, double)> lipschitz_on_ball;

    /// True where grad f is locally Lipschitz; empty means everywhere.
    std::function<bool(const Vec&)> smooth_at;

    bool has_hessian() const { return static_cast<bool>(hessian); }
    bool has_lipschitz() const { return static_cast<bool>(lipschitz); }
    bool has_ball_lipschitz() const { return static_cast<bool>(lipschitz_on_ball); }
    bool is_smooth_at(const Vec& x) const { return !smooth_at || smooth_at(x); }
};

bool all_finite(const Vec& x);
void require_finite(const Vec& x, const char* where);

/// Central-difference gradient, step h * max(1, |x_i|) per coordinate.
/// Verification oracle for analytic gradients; throws EvaluationError
/// naming the offending coordinate on non-finite f values.
Vec fd_gradient(const Objective& obj, const Vec& x, double h = 1e-5);

/// Symmetrized central-difference Hessian of grad, step h * max(1, |x_i|).
/// If asymmetry is non-null it receives the relative asymmetry of the raw
/// difference matrix; values beyond ~1e-3 indicate a non-C^2 point.
Mat fd_hessian(const Objective& obj, const Vec& x, double h = 1e-4,
               double* asymmetry = nullptr);

} // namespace descent
