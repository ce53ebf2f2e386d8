#include "descent/objective.hpp"

#include <cmath>
#include <iostream>

namespace descent {

bool all_finite(const Vec& x) {
    return x.allFinite();
}

void require_finite(const Vec& x, const char* where) {
    if (!x.allFinite())
        throw EvaluationError(std::string(where) + ": non-finite point");
}

Vec fd_gradient(const Objective& obj, const Vec& x, double h) {
    require_finite(x, "fd_gradient");
    if (!(h > 0.0))
        throw ConfigError("fd_gradient: step must be positive");
    Vec g(x.size());
    Vec e = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double hi = h * std::max(1.0, std::abs(x[i]));
        e[i] = x[i] + hi;
        const double fp = obj.f(e);
        e[i] = x[i] - hi;
        const double fm = obj.f(e);
        e[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw EvaluationError("fd_gradient: non-finite f at coordinate " +
                                  std::to_string(i));
        g[i] = (fp - fm) / (2.0 * hi);
    }
    return g;
}

Mat fd_hessian(const Objective& obj, const Vec& x, double h, double* asymmetry) {
    require_finite(x, "fd_hessian");
    if (!(h > 0.0))
        throw ConfigError("fd_hessian: step must be positive");
    const Eigen::Index n = x.size();
    Mat raw(n, n);
    Vec e = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = h * std::max(1.0, std::abs(x[i]));
        e[i] = x[i] + hi;
        const Vec gp = obj.grad(e);
        e[i] = x[i] - hi;
        const Vec gm = obj.grad(e);
        e[i] = x[i];
        if (!gp.allFinite() || !gm.allFinite())
            throw EvaluationError("fd_hessian: non-finite gradient at coordinate " +
                                  std::to_string(i));
        raw.row(i) = ((gp - gm) / (2.0 * hi)).transpose();
    }
    Mat sym = 0.5 * (raw + raw.transpose());
    const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff() / scale;
    if (asymmetry) *asymmetry = asym;
    if (asym > 1e-3)
        std::cerr << "fd_hessian: asymmetry " << asym
                  << " suggests a non-C^2 point\n";
    return sym;
}

} // namespace descent
