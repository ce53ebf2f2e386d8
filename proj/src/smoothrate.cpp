#include "descent/smoothrate.hpp"

#include <cmath>

namespace descent {
namespace {

constexpr double kSafety = 1.5;          // margin on sampled maxima
constexpr double kCoverageFloor = 1e-15; // normalization denominator floor

// Standard mollifier bump: b(t) = exp(-1/(1-t^2)) for |t| < 1, else 0.
double bump(double t) {
    const double a = std::abs(t);
    if (a >= 1.0 - 1e-7) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

double bump_deriv(double t) {
    const double a = std::abs(t);
    if (a >= 1.0 - 1e-7) return 0.0;
    const double w = 1.0 - t * t;
    return bump(t) * (-2.0 * t / (w * w));
}

Vec sample_in_ball(const Vec& center, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec dir(center.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
    const double n = dir.norm();
    if (n < 1e-300) return center;
    const double r = radius * std::pow(unif(rng), 1.0 / double(center.size()));
    return center + (r / n) * dir;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 round; gives each ball its own deterministic stream
    std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Bump values u_j(x) for all balls plus their sum.
struct BumpEval {
    std::vector<double> u;
    double sum = 0.0;
};

BumpEval eval_bumps(const Covering& cov, const Vec& x) {
    BumpEval out;
    out.u.resize(cov.centers.size());
    for (std::size_t j = 0; j < cov.centers.size(); ++j) {
        out.u[j] = bump((x - cov.centers[j]).norm() / cov.radii[j]);
        out.sum += out.u[j];
    }
    return out;
}

Vec bump_gradient(const Covering& cov, std::size_t j, const Vec& x) {
    const Vec d = x - cov.centers[j];
    const double dist = d.norm();
    const double r = cov.radii[j];
    if (dist < 1e-300) return Vec::Zero(x.size());
    return (bump_deriv(dist / r) / (r * dist)) * d;
}

double min_step_cap(double L, double delta0) {
    return std::min({1.0 / (2.0 * L), delta0, 1.0});
}

// Damping coefficient c_j (long double: the faithful 10^-j factor underflows
// double for grids past ~300 balls).
long double damping(const SmoothRate& sr, std::size_t j) {
    if (sr.mode == RateMode::Faithful)
        return powl(10.0L, -static_cast<long double>(j + 1)) /
               static_cast<long double>(sr.mj[j] + 1.0);
    return 1.0L / (static_cast<long double>(sr.max_cover) *
                   static_cast<long double>(sr.mj[j] + 1.0));
}

} // namespace

bool Box::contains(const Vec& x) const {
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    return true;
}

Vec Box::sample(std::mt19937_64& rng) const {
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (hi[i] > lo[i]) {
            std::uniform_real_distribution<double> u(lo[i], hi[i]);
            x[i] = u(rng);
        } else {
            x[i] = lo[i];
        }
    }
    return x;
}

void Box::validate(bool require_nondegenerate) const {
    if (lo.size() == 0 || lo.size() != hi.size())
        throw ConfigError("box: lo/hi must be non-empty and of equal dimension");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
            throw ConfigError("box: requires finite lo <= hi per axis");
        if (require_nondegenerate && !(lo[i] < hi[i]))
            throw ConfigError("box: degenerate axis " + std::to_string(i));
    }
}

RateMode rate_mode_from_string(const std::string& s) {
    if (s == "faithful") return RateMode::Faithful;
    if (s == "practical") return RateMode::Practical;
    throw ConfigError("unknown smooth-rate mode '" + s + "'");
}

std::string to_string(RateMode m) {
    return m == RateMode::Faithful ? "faithful" : "practical";
}

double estimate_local_lipschitz(const Objective& obj, const Vec& center, double radius,
                                int n_samples, double safety, std::uint64_t seed) {
    if (!(radius > 0.0)) throw ConfigError("estimate_local_lipschitz: radius must be positive");
    if (!(safety >= 1.0)) throw ConfigError("estimate_local_lipschitz: safety must be >= 1");
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const Vec y = sample_in_ball(center, radius, rng);
        const Vec z = sample_in_ball(center, radius, rng);
        if (!obj.is_smooth_at(y) || !obj.is_smooth_at(z)) continue;
        const double dist = (y - z).norm();
        if (dist < 1e-12) continue;
        const Vec gy = obj.grad(y), gz = obj.grad(z);
        if (!gy.allFinite() || !gz.allFinite())
            throw EvaluationError("estimate_local_lipschitz: non-finite gradient in ball");
        best = std::max(best, (gy - gz).norm() / dist);
    }
    if (obj.has_hessian()) {
        std::mt19937_64 rng2(mix_seed(seed, 1));
        const int n_hess = std::max(1, n_samples / 10);
        for (int i = 0; i < n_hess; ++i) {
            const Vec y = sample_in_ball(center, radius, rng2);
            if (!obj.is_smooth_at(y)) continue;
            Eigen::SelfAdjointEigenSolver<Mat> es(obj.hessian(y));
            best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
        }
    }
    return safety * std::max(best, 1e-12);
}

Covering build_covering(const Objective& obj, const Box& box, double spacing,
                        double alpha, std::uint64_t seed) {
    box.validate(true);
    if (box.dim() != obj.dim)
        throw ConfigError("build_covering: box dimension does not match the objective");
    if (!(spacing > 0.0)) throw ConfigError("build_covering: spacing must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("build_covering: alpha must lie in (0,1)");

    const int k = box.dim();
    const double radius = spacing * std::sqrt(double(k));

    // Grid axes: pitch <= spacing, endpoints included.
    std::vector<std::vector<double>> axes(k);
    for (int i = 0; i < k; ++i) {
        const double side = box.hi[i] - box.lo[i];
        const int n = static_cast<int>(std::ceil(side / spacing - 1e-12)) + 1;
        const double pitch = side / (n - 1);
        for (int m = 0; m < n; ++m) axes[i].push_back(box.lo[i] + m * pitch);
    }

    Covering cov;
    cov.box = box;
    cov.spacing = spacing;
    cov.alpha = alpha;

    // Row-major enumeration, last axis fastest. The faithful-mode damping
    // depends on this order, so it is part of the construction's identity.
    std::vector<int> idx(k, 0);
    while (true) {
        Vec z(k);
        for (int i = 0; i < k; ++i) z[i] = axes[i][idx[i]];
        if (!obj.is_smooth_at(z))
            throw ConfigError("build_covering: grid center on the non-smooth locus");
        cov.centers.push_back(z);
        cov.radii.push_back(radius);
        int axis = k - 1;
        while (axis >= 0 && ++idx[axis] == static_cast<int>(axes[axis].size())) {
            idx[axis] = 0;
            --axis;
        }
        if (axis < 0) break;
    }

    cov.lipschitz.resize(cov.centers.size());
    for (std::size_t j = 0; j < cov.centers.size(); ++j) {
        const Vec& z = cov.centers[j];
        double L;
        try {
            if (obj.has_ball_lipschitz()) {
                L = obj.lipschitz_on_ball(z, radius);
            } else if (obj.has_lipschitz()) {
                // Field gives L on its own ball; take the max over sampled
                // query points in ours. Over-estimation only shrinks h.
                L = obj.lipschitz(z).L;
                std::mt19937_64 rng(mix_seed(seed, j));
                for (int s = 0; s < 64; ++s) {
                    const Vec y = sample_in_ball(z, radius, rng);
                    if (obj.is_smooth_at(y)) L = std::max(L, obj.lipschitz(y).L);
                }
                L = std::max(L, estimate_local_lipschitz(obj, z, radius, 200, kSafety,
                                                         mix_seed(seed, j ^ 0xb0a710adULL)));
            } else {
                L = estimate_local_lipschitz(obj, z, radius, 500, kSafety, mix_seed(seed, j));
            }
        } catch (const NonSmoothError& e) {
            throw ConfigError(std::string("build_covering: box too close to the "
                                          "non-smooth locus: ") + e.what());
        }
        if (!(L > 0.0) || !std::isfinite(L))
            throw InvariantError("build_covering: bad Lipschitz constant");
        // Raise L so every step d <= 1/L keeps the Armijo inequality with
        // this alpha on the ball (descent estimate needs d <= 2(1-alpha)/L).
        cov.lipschitz[j] = std::max(L, L / (2.0 * (1.0 - alpha)));
    }
    return cov;
}

SmoothRate build_smooth_rate(const Objective& obj, const Covering& cov, double delta0,
                             double alpha, int mj_samples, RateMode mode,
                             std::uint64_t seed) {
    if (cov.centers.empty()) throw ConfigError("build_smooth_rate: empty covering");
    if (!(delta0 > 0.0)) throw ConfigError("build_smooth_rate: delta0 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("build_smooth_rate: alpha must lie in (0,1)");
    if (mj_samples < 1) throw ConfigError("build_smooth_rate: mj_samples must be >= 1");
    if (mode == RateMode::Faithful && cov.centers.size() > 4000)
        throw ConfigError("build_smooth_rate: faithful damping underflows beyond ~4000 "
                          "balls; use practical mode");

    SmoothRate sr;
    sr.covering = cov;
    sr.delta0 = delta0;
    sr.alpha = alpha;
    sr.mode = mode;
    sr.seed = seed;
    sr.mj.resize(cov.centers.size());

    // Coverage / normalization check at deterministic samples.
    {
        std::mt19937_64 rng(mix_seed(seed, 0x5eedULL));
        for (int s = 0; s < 2000; ++s) {
            const Vec x = cov.box.sample(rng);
            if (eval_bumps(cov, x).sum < kCoverageFloor)
                throw InvariantError("build_smooth_rate: covering gap at a box sample");
        }
    }

    // K = max number of balls containing a sampled box point.
    {
        std::mt19937_64 rng(mix_seed(seed, 0xc0feULL));
        int K = 1;
        auto count_at = [&](const Vec& x) {
            int c = 0;
            for (std::size_t j = 0; j < cov.centers.size(); ++j)
                if ((x - cov.centers[j]).norm() < cov.radii[j]) ++c;
            K = std::max(K, c);
        };
        for (const Vec& z : cov.centers) count_at(z);
        for (int s = 0; s < 4000; ++s) count_at(cov.box.sample(rng));
        sr.max_cover = K;
    }

    // M_j by sampled maximization; phi gradients need the final covering, so
    // fill mj with zeros first (partition_gradient does not read mj).
    for (std::size_t j = 0; j < cov.centers.size(); ++j) {
        std::mt19937_64 rng(mix_seed(seed, 0xabcdULL + j));
        double best = 0.0;
        int accepted = 0;
        long attempts = 0;
        const long max_attempts = 50L * mj_samples;
        while (accepted < mj_samples && attempts < max_attempts) {
            ++attempts;
            const Vec y1 = sample_in_ball(cov.centers[j], cov.radii[j], rng);
            const Vec y2 = sample_in_ball(cov.centers[j], cov.radii[j], rng);
            if (!cov.box.contains(y1)) continue; // phi lives on the box
            ++accepted;
            const Vec gphi = partition_gradient(sr, j, y1);
            const Vec gf = obj.grad(y2);
            if (!gf.allFinite())
                throw EvaluationError("build_smooth_rate: non-finite gradient in ball");
            best = std::max(best, gphi.norm() * gf.norm());
        }
        sr.mj[j] = kSafety * best;
    }
    return sr;
}

std::vector<double> partition_values(const SmoothRate& sr, const Vec& x) {
    const BumpEval be = eval_bumps(sr.covering, x);
    if (be.sum < kCoverageFloor)
        throw InvariantError("partition_values: covering gap (denominator ~ 0)");
    std::vector<double> phi(be.u.size());
    for (std::size_t j = 0; j < be.u.size(); ++j) phi[j] = be.u[j] / be.sum;
    return phi;
}

Vec partition_gradient(const SmoothRate& sr, std::size_t j, const Vec& x) {
    const Covering& cov = sr.covering;
    const BumpEval be = eval_bumps(cov, x);
    if (be.sum < kCoverageFloor)
        throw InvariantError("partition_gradient: covering gap (denominator ~ 0)");
    Vec grad_sum = Vec::Zero(x.size());
    for (std::size_t i = 0; i < cov.centers.size(); ++i)
        grad_sum += bump_gradient(cov, i, x);
    const Vec gj = bump_gradient(cov, j, x);
    return (gj * be.sum - be.u[j] * grad_sum) / (be.sum * be.sum);
}

double eval_h(const SmoothRate& sr, const Vec& x) {
    if (!sr.covering.box.contains(x))
        throw DomainError("eval_h: point outside the smooth-rate box");
    const BumpEval be = eval_bumps(sr.covering, x);
    if (be.sum < kCoverageFloor)
        throw InvariantError("eval_h: covering gap (denominator ~ 0)");
    long double acc = 0.0L;
    for (std::size_t j = 0; j < sr.size(); ++j) {
        if (be.u[j] == 0.0) continue;
        acc += damping(sr, j) * static_cast<long double>(be.u[j] / be.sum) *
               static_cast<long double>(min_step_cap(sr.covering.lipschitz[j], sr.delta0));
    }
    const double h = static_cast<double>(acc);
    if (!(h > 0.0))
        throw InvariantError("eval_h: h underflowed to 0 (grid too large for "
                             "faithful mode)");
    return h;
}

StepOutcome continuous_step(const Objective& obj, const SmoothRate& sr, const Vec& x) {
    const double h = eval_h(sr, x);
    const Vec g = obj.grad(x);
    if (!g.allFinite()) throw EvaluationError("continuous_step: non-finite gradient");
    StepOutcome out;
    out.next = x - h * g;
    out.step_size = h;
    out.backtracks = 0;
    const double fx = obj.f(x);
    out.armijo_lhs = obj.f(out.next) - fx;
    out.armijo_rhs = -sr.alpha * h * g.squaredNorm();
    if (out.armijo_lhs > out.armijo_rhs + 1e-12 * (1.0 + std::abs(fx))) {
        std::string msg = "continuous_step: Armijo inequality violated at x = (";
        for (Eigen::Index i = 0; i < x.size(); ++i)
            msg += (i ? ", " : "") + std::to_string(x[i]);
        throw InvariantError(msg + ")");
    }
    return out;
}

} // namespace descent
