#include "descent/corpus.hpp"

#include <cmath>
#include <cctype>

namespace descent {
namespace {

// Below this magnitude 1/t overflows long before sin(1/t) means anything;
// treat the point as lying on the axis and use the continuous extension.
constexpr double kAxisEps = 1e-300;

double get_or(const Params& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

// ---------------------------------------------------------------------------
// example1 / example2: separable pieces g(t) = t^p sin^q(1/t), extended by 0
// across t = 0. Off the axis:
//   g'(t)  = p t^(p-1) s^q - q t^(p-2) s^(q-1) c
//   g''(t) = p(p-1) t^(p-2) s^q - q(2p-2) t^(p-3) s^(q-1) c
//            + q(q-1) t^(p-4) s^(q-2) c^2 - q t^(p-4) s^q
// with s = sin(1/t), c = cos(1/t).

struct SinPiece {
    int p;
    int q;

    double value(double t) const {
        if (std::abs(t) < kAxisEps) return 0.0;
        return std::pow(t, p) * std::pow(std::sin(1.0 / t), q);
    }
    double deriv(double t) const {
        if (std::abs(t) < kAxisEps) return 0.0;
        const double s = std::sin(1.0 / t), c = std::cos(1.0 / t);
        return p * std::pow(t, p - 1) * std::pow(s, q) -
               q * std::pow(t, p - 2) * std::pow(s, q - 1) * c;
    }
    double second(double t) const {
        if (std::abs(t) < kAxisEps)
            throw NonSmoothError("second derivative undefined on the axis");
        const double s = std::sin(1.0 / t), c = std::cos(1.0 / t);
        double out = p * (p - 1) * std::pow(t, p - 2) * std::pow(s, q) -
                     q * (2 * p - 2) * std::pow(t, p - 3) * std::pow(s, q - 1) * c -
                     q * std::pow(t, p - 4) * std::pow(s, q);
        if (q >= 2)
            out += q * (q - 1) * std::pow(t, p - 4) * std::pow(s, q - 2) * c * c;
        return out;
    }
    // |g''| <= p(p-1)|t|^(p-2) + q(2p-2)|t|^(p-3) + q^2 |t|^(p-4); evaluate
    // each monomial at whichever end of [lo, hi] (0 < lo <= |t| <= hi)
    // maximizes it.
    double second_bound(double lo, double hi) const {
        auto mono = [&](int k) {
            return k >= 0 ? std::pow(hi, k) : std::pow(lo, k);
        };
        return p * (p - 1) * mono(p - 2) + q * (2 * p - 2) * mono(p - 3) +
               double(q) * q * mono(p - 4);
    }
};

Objective make_sin_family(const std::string& name, double a, double b, int p, int q) {
    SinPiece piece{p, q};
    // the cubic case carries the classic coarse closed-form bound
    const bool coarse_bound = (name == "example1");

    Objective obj;
    obj.dim = 2;
    obj.name = name;
    obj.f = [=](const Vec& x) { return a * piece.value(x[0]) + b * piece.value(x[1]); };
    obj.grad = [=](const Vec& x) {
        Vec g(2);
        g[0] = a * piece.deriv(x[0]);
        g[1] = b * piece.deriv(x[1]);
        return g;
    };
    obj.hessian = [=](const Vec& x) {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = a * piece.second(x[0]);
        h(1, 1) = b * piece.second(x[1]);
        return h;
    };
    obj.smooth_at = [](const Vec& x) {
        return std::abs(x[0]) >= kAxisEps && std::abs(x[1]) >= kAxisEps;
    };
    // Hessian-norm bound valid on B(center, radius); requires the ball to
    // stay strictly off both axes.
    auto ball_bound = [=](const Vec& c, double radius) {
        const double ax = std::abs(c[0]), ay = std::abs(c[1]);
        if (!(ax > radius) || !(ay > radius))
            throw NonSmoothError(name + ": Lipschitz ball crosses a coordinate axis");
        if (coarse_bound) {
            // 6(|x|+|y|) + 8 + 1/|x| + 1/|y| at the worst corner of the ball
            return 6.0 * ((ax + radius) + (ay + radius)) + 8.0 +
                   1.0 / (ax - radius) + 1.0 / (ay - radius);
        }
        return std::abs(a) * piece.second_bound(ax - radius, ax + radius) +
               std::abs(b) * piece.second_bound(ay - radius, ay + radius);
    };
    obj.lipschitz_on_ball = ball_bound;
    obj.lipschitz = [=](const Vec& x) {
        const double r = 0.5 * std::min(std::abs(x[0]), std::abs(x[1]));
        if (!(r > 0.0))
            throw NonSmoothError(name + ": Lipschitz field undefined on the axes");
        return LocalLipschitz{ball_bound(x, r), r};
    };
    return obj;
}

Objective make_power_abs(double gamma) {
    Objective obj;
    obj.dim = 1;
    obj.name = "power_abs";
    const double e = 1.0 + gamma;
    obj.f = [=](const Vec& x) { return std::pow(std::abs(x[0]), e); };
    obj.grad = [=](const Vec& x) {
        Vec g(1);
        const double t = x[0];
        g[0] = std::abs(t) < kAxisEps ? 0.0
                                      : e * std::pow(std::abs(t), gamma) * (t > 0 ? 1.0 : -1.0);
        return g;
    };
    obj.hessian = [=](const Vec& x) {
        if (std::abs(x[0]) < kAxisEps)
            throw NonSmoothError("power_abs: not C^2 at 0");
        Mat h(1, 1);
        h(0, 0) = e * gamma * std::pow(std::abs(x[0]), gamma - 1.0);
        return h;
    };
    obj.smooth_at = [](const Vec& x) { return std::abs(x[0]) >= kAxisEps; };
    auto ball_bound = [=](const Vec& c, double radius) {
        const double lo = std::abs(c[0]) - radius;
        if (!(lo > 0.0))
            throw NonSmoothError("power_abs: Lipschitz ball crosses 0");
        return e * gamma * std::pow(lo, gamma - 1.0); // |f''| decreasing in |t|
    };
    obj.lipschitz_on_ball = ball_bound;
    obj.lipschitz = [=](const Vec& x) {
        const double r = 0.5 * std::abs(x[0]);
        if (!(r > 0.0))
            throw NonSmoothError("power_abs: Lipschitz field undefined at 0");
        return LocalLipschitz{ball_bound(x, r), r};
    };
    return obj;
}

Objective make_quadratic_form(const Params& params) {
    int dim = 0;
    if (auto it = params.find("dim"); it != params.end()) {
        dim = static_cast<int>(it->second);
        if (dim < 1 || dim != it->second)
            throw ConfigError("quadratic_form: dim must be a positive integer");
    }
    for (const auto& [key, val] : params) {
        if (key.size() == 3 && key[0] == 'a' && std::isdigit(key[1]) && std::isdigit(key[2]))
            dim = std::max(dim, std::max(key[1] - '0', key[2] - '0') + 1);
        else if (key != "dim")
            throw ConfigError("quadratic_form: unknown parameter '" + key + "'");
    }
    if (dim == 0) dim = 2;

    Mat A = Mat::Zero(dim, dim);
    Mat given = Mat::Zero(dim, dim);
    bool any_entry = false;
    for (const auto& [key, val] : params) {
        if (key == "dim") continue;
        const int i = key[1] - '0', j = key[2] - '0';
        const int lo = std::min(i, j), hi = std::max(i, j);
        if (given(lo, hi) != 0.0 && A(lo, hi) != val)
            throw ConfigError("quadratic_form: conflicting entry " + key);
        A(i, j) = val;
        A(j, i) = val;
        given(lo, hi) = 1.0;
        any_entry = true;
    }
    if (!any_entry) A = Mat::Identity(dim, dim);

    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    const double spectral = es.eigenvalues().cwiseAbs().maxCoeff();

    Objective obj;
    obj.dim = dim;
    obj.name = "quadratic_form";
    obj.f = [A](const Vec& x) { return 0.5 * x.dot(A * x); };
    obj.grad = [A](const Vec& x) -> Vec { return A * x; };
    obj.hessian = [A](const Vec&) { return A; };
    obj.lipschitz = [spectral](const Vec&) {
        return LocalLipschitz{std::max(spectral, 1e-12), 1e10};
    };
    obj.lipschitz_on_ball = [spectral](const Vec&, double) {
        return std::max(spectral, 1e-12);
    };
    return obj;
}

Objective make_double_well() {
    Objective obj;
    obj.dim = 2;
    obj.name = "double_well";
    obj.f = [](const Vec& x) {
        const double u = x[0];
        return 0.25 * u * u * u * u - 0.5 * u * u + 0.5 * x[1] * x[1];
    };
    obj.grad = [](const Vec& x) {
        Vec g(2);
        g[0] = x[0] * x[0] * x[0] - x[0];
        g[1] = x[1];
        return g;
    };
    obj.hessian = [](const Vec& x) {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = 3.0 * x[0] * x[0] - 1.0;
        h(1, 1) = 1.0;
        return h;
    };
    auto ball_bound = [](const Vec& c, double radius) {
        const double u = std::abs(c[0]) + radius;
        return 3.0 * u * u + 1.0;
    };
    obj.lipschitz_on_ball = ball_bound;
    obj.lipschitz = [=](const Vec& x) { return LocalLipschitz{ball_bound(x, 1.0), 1.0}; };
    return obj;
}

Objective make_rosenbrock(double a, double b) {
    Objective obj;
    obj.dim = 2;
    obj.name = "rosenbrock";
    obj.f = [=](const Vec& v) {
        const double x = v[0], y = v[1];
        return (a - x) * (a - x) + b * (y - x * x) * (y - x * x);
    };
    obj.grad = [=](const Vec& v) {
        const double x = v[0], y = v[1];
        Vec g(2);
        g[0] = -2.0 * (a - x) - 4.0 * b * x * (y - x * x);
        g[1] = 2.0 * b * (y - x * x);
        return g;
    };
    obj.hessian = [=](const Vec& v) {
        const double x = v[0], y = v[1];
        Mat h(2, 2);
        h(0, 0) = 2.0 + 12.0 * b * x * x - 4.0 * b * y;
        h(0, 1) = h(1, 0) = -4.0 * b * x;
        h(1, 1) = 2.0 * b;
        return h;
    };
    // Row-sum bound on the Hessian norm at the worst corner of the ball.
    auto ball_bound = [=](const Vec& c, double radius) {
        const double X = std::abs(c[0]) + radius, Y = std::abs(c[1]) + radius;
        return std::max(2.0 + 12.0 * b * X * X + 4.0 * b * Y + 4.0 * b * X,
                        4.0 * b * X + 2.0 * b);
    };
    obj.lipschitz_on_ball = ball_bound;
    obj.lipschitz = [=](const Vec& x) { return LocalLipschitz{ball_bound(x, 1.0), 1.0}; };
    return obj;
}

int int_param(const Params& p, const std::string& key, int dflt, int min_value) {
    const double v = get_or(p, key, dflt);
    const int i = static_cast<int>(v);
    if (i != v || i < min_value)
        throw ConfigError("example2: " + key + " must be an integer >= " +
                          std::to_string(min_value));
    return i;
}

} // namespace

Objective corpus_get(const std::string& name, const Params& params) {
    if (name == "example1") {
        return make_sin_family("example1", 1.0, 1.0, 3, 1);
    }
    if (name == "example2") {
        const int p = int_param(params, "p", 4, 3);
        const int q = int_param(params, "q", 2, 1);
        return make_sin_family("example2", get_or(params, "a", 1.0),
                               get_or(params, "b", 1.0), p, q);
    }
    if (name == "power_abs") {
        const double gamma = get_or(params, "gamma", 0.5);
        if (!(gamma > 0.0 && gamma < 1.0))
            throw ConfigError("power_abs: gamma must lie in (0,1)");
        return make_power_abs(gamma);
    }
    if (name == "quadratic_form") return make_quadratic_form(params);
    if (name == "double_well") return make_double_well();
    if (name == "rosenbrock")
        return make_rosenbrock(get_or(params, "a", 1.0), get_or(params, "b", 100.0));
    throw ConfigError("unknown objective '" + name + "'");
}

const std::vector<std::string>& corpus_names() {
    static const std::vector<std::string> names = {
        "example1", "example2", "power_abs", "quadratic_form", "double_well", "rosenbrock"};
    return names;
}

} // namespace descent
