#include "descent/checks.hpp"

#include <cmath>
#include <cstdio>

#include "descent/analysis.hpp"
#include "descent/steppers.hpp"

namespace descent {

namespace {

// Families with an essential singularity need a standoff from it before
// finite differences (and the bounds built on them) are trustworthy.
double singular_margin_needed(const Objective& obj) {
    if (obj.name == "example1" || obj.name == "example2" || obj.name == "power_abs")
        return 0.1;
    return 0.0;
}

double min_abs_coord(const Vec& x) {
    return x.cwiseAbs().minCoeff();
}

Vec sample_in_ball_local(const Vec& center, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec dir(center.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
    const double n = dir.norm();
    if (n < 1e-300) return center;
    const double r = radius * std::pow(unif(rng), 1.0 / double(center.size()));
    return center + (r / n) * dir;
}

double rel_err(const Vec& a, const Vec& b) {
    return (a - b).norm() / std::max(1.0, a.norm());
}

double rel_err(const Mat& a, const Mat& b) {
    return (a - b).norm() / std::max(1.0, a.norm());
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

} // namespace

std::string format_suite_line(const SuiteResult& r) {
    std::string line = (r.pass() ? "[PASS] " : "[FAIL] ") + r.name + ": " +
                       std::to_string(r.samples - r.failures) + "/" +
                       std::to_string(r.samples) + " ok";
    if (!r.detail.empty()) line += " (" + r.detail + ")";
    return line;
}

const std::vector<Objective>& check_corpus() {
    static const std::vector<Objective> corpus = [] {
        std::vector<Objective> v;
        v.push_back(corpus_get("example1"));
        v.push_back(corpus_get("example2", {{"p", 4}, {"q", 2}}));
        v.push_back(corpus_get("example2", {{"a", 2}, {"b", 0.5}, {"p", 5}, {"q", 3}}));
        v.push_back(corpus_get("power_abs", {{"gamma", 0.5}}));
        v.push_back(corpus_get("power_abs", {{"gamma", 0.25}}));
        v.push_back(corpus_get("quadratic_form"));
        v.push_back(corpus_get("quadratic_form", {{"a00", 3}, {"a11", 1}}));
        v.push_back(corpus_get("double_well"));
        v.push_back(corpus_get("rosenbrock"));
        return v;
    }();
    return corpus;
}

Vec sample_smooth_point(const Objective& obj, double half_width, double margin,
                        std::mt19937_64& rng) {
    const double needed = std::max(margin, singular_margin_needed(obj));
    std::uniform_real_distribution<double> u(-half_width, half_width);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Vec x(obj.dim);
        for (int i = 0; i < obj.dim; ++i) x[i] = u(rng);
        if (!obj.is_smooth_at(x)) continue;
        if (needed > 0.0 && min_abs_coord(x) < needed) continue;
        return x;
    }
    throw ConfigError("sample_smooth_point: rejection sampling failed");
}

SuiteResult check_gradient_consistency(long n_points, std::uint64_t seed) {
    SuiteResult res{"gradient_consistency"};
    double worst = 0.0;
    std::mt19937_64 rng(seed);
    for (const Objective& obj : check_corpus()) {
        for (long i = 0; i < n_points; ++i) {
            const Vec x = sample_smooth_point(obj, 2.0, 0.0, rng);
            const double err = rel_err(obj.grad(x), fd_gradient(obj, x));
            worst = std::max(worst, err);
            ++res.samples;
            if (!(err <= 1e-6)) ++res.failures;
        }
    }
    res.detail = "worst rel err " + sci(worst);
    return res;
}

SuiteResult check_hessian_consistency(long n_points, std::uint64_t seed) {
    SuiteResult res{"hessian_consistency"};
    double worst = 0.0;
    std::mt19937_64 rng(seed);
    for (const Objective& obj : check_corpus()) {
        if (!obj.has_hessian()) continue;
        for (long i = 0; i < n_points; ++i) {
            const Vec x = sample_smooth_point(obj, 2.0, 0.0, rng);
            const Mat analytic = obj.hessian(x);
            const Mat fd = fd_hessian(obj, x);
            if ((analytic - analytic.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
                ++res.samples;
                ++res.failures;
                continue;
            }
            const double err = rel_err(analytic, fd);
            worst = std::max(worst, err);
            ++res.samples;
            if (!(err <= 1e-4)) ++res.failures;
        }
    }
    res.detail = "worst rel err " + sci(worst);
    return res;
}

SuiteResult check_armijo_maximality(long n_cases, std::uint64_t seed) {
    SuiteResult res{"armijo_maximality"};
    res.samples = n_cases;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const auto& corpus = check_corpus();
    for (long i = 0; i < n_cases; ++i) {
        const Objective& obj = corpus[rng() % corpus.size()];
        const Vec x = sample_smooth_point(obj, 2.0, 0.0, rng);
        BacktrackParams p;
        p.delta0 = 0.1 + 0.9 * u01(rng);
        p.alpha = 0.1 + 0.8 * u01(rng);
        p.beta = 0.3 + 0.4 * u01(rng);
        try {
            const StepOutcome out = armijo_backtrack(obj, x, p);
            const Vec g = obj.grad(x);
            const double fx = obj.f(x);
            const double g2 = g.squaredNorm();
            bool ok = obj.f(x - out.step_size * g) - fx <= -p.alpha * out.step_size * g2;
            if (ok && out.backtracks >= 1) {
                const double prev = ladder_step(p, out.backtracks - 1);
                ok = obj.f(x - prev * g) - fx > -p.alpha * prev * g2;
            }
            if (!ok) ++res.failures;
        } catch (const StepCollapseError&) {
            ++res.failures;
        }
    }
    return res;
}

SuiteResult check_delta_hat_oracle(long n_cases, std::uint64_t seed) {
    SuiteResult res{"delta_hat_oracle"};
    res.samples = n_cases;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) {
        return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u01(rng));
    };
    for (long i = 0; i < n_cases; ++i) {
        const double L = log_uniform(1e-1, 1e3);
        const double r = log_uniform(1e-3, 10.0);
        const double slope = (i % 17 == 0) ? 0.0 : log_uniform(1e-3, 1e3);

        Objective probe;
        probe.dim = 1;
        probe.name = "linear_probe";
        probe.f = [slope](const Vec& x) { return slope * x[0]; };
        probe.grad = [slope](const Vec&) {
            Vec g(1);
            g[0] = slope;
            return g;
        };
        probe.lipschitz = [L, r](const Vec&) { return LocalLipschitz{L, r}; };

        BacktrackParams p;
        p.delta0 = 0.1 + 0.9 * u01(rng);
        p.alpha = 0.1 + 0.8 * u01(rng);
        p.beta = 0.3 + 0.4 * u01(rng);
        p.max_halvings = 50;

        // Independent route: enumerate the whole ladder, filter by the two
        // strict conditions, take the largest survivor.
        double oracle = -1.0;
        for (int n = 50; n >= 0; --n) {
            const double d = ladder_step(p, n);
            if (d < p.alpha / L && d * slope < r) oracle = std::max(oracle, d);
        }

        const Vec x = Vec::Zero(1);
        try {
            const double got = delta_hat(probe, x, p);
            if (oracle < 0.0 || got != oracle) ++res.failures;
        } catch (const StepCollapseError&) {
            if (oracle >= 0.0) ++res.failures;
        }
    }
    return res;
}

SuiteResult check_descent_lemma(long n_cases, std::uint64_t seed) {
    SuiteResult res{"descent_lemma"};
    res.samples = n_cases;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (long i = 0; i < n_cases; ++i) {
        const int dim = 1 + int(rng() % 4);
        Vec eig(dim);
        for (int d = 0; d < dim; ++d) eig[d] = 0.1 + 9.9 * u01(rng);
        const double L = eig.maxCoeff();

        Objective quad;
        quad.dim = dim;
        quad.name = "diag_quadratic";
        quad.f = [eig](const Vec& x) { return 0.5 * x.dot(eig.asDiagonal() * x); };
        quad.grad = [eig](const Vec& x) -> Vec { return eig.asDiagonal() * x; };

        Vec x(dim);
        for (int d = 0; d < dim; ++d) x[d] = -3.0 + 6.0 * u01(rng);

        std::vector<double> deltas;
        for (int k = 1; k <= 20; ++k) deltas.push_back(double(k) / 20.0 / L);
        if (!descent_lemma_check(quad, x, L, deltas).pass()) ++res.failures;
    }
    return res;
}

std::vector<SuiteResult> smoothrate_invariant_suite(const Objective& obj,
                                                    const SmoothRate& sr,
                                                    long n_samples, std::uint64_t seed) {
    std::vector<SuiteResult> out;
    const Box& box = sr.covering.box;

    {
        SuiteResult r{"range"};
        r.samples = n_samples;
        std::mt19937_64 rng(seed);
        double hmin = 1e308, hmax = 0.0;
        for (long i = 0; i < n_samples; ++i) {
            try {
                const double h = eval_h(sr, box.sample(rng));
                hmin = std::min(hmin, h);
                hmax = std::max(hmax, h);
                if (!(h > 0.0 && h <= sr.delta0)) ++r.failures;
            } catch (const Error&) {
                ++r.failures;
            }
        }
        r.detail = "h in [" + sci(hmin) + ", " + sci(hmax) + "]";
        out.push_back(r);
    }

    {
        SuiteResult r{"armijo"};
        r.samples = n_samples;
        std::mt19937_64 rng(seed + 1);
        for (long i = 0; i < n_samples; ++i) {
            try {
                continuous_step(obj, sr, box.sample(rng));
            } catch (const Error&) {
                ++r.failures;
            }
        }
        out.push_back(r);
    }

    {
        SuiteResult r{"partition"};
        r.samples = n_samples;
        std::mt19937_64 rng(seed + 2);
        double worst = 0.0;
        for (long i = 0; i < n_samples; ++i) {
            const std::vector<double> phi = partition_values(sr, box.sample(rng));
            double sum = 0.0;
            for (double v : phi) sum += v;
            worst = std::max(worst, std::abs(sum - 1.0));
            if (!(std::abs(sum - 1.0) <= 1e-12)) ++r.failures;
        }
        r.detail = "worst |sum-1| " + sci(worst);
        out.push_back(r);
    }

    {
        SuiteResult r{"injectivity_margin"};
        r.samples = n_samples;
        std::mt19937_64 rng(seed + 3);
        double min_ratio = 1e308;
        auto H = [&](const Vec& y) -> Vec { return y - eval_h(sr, y) * obj.grad(y); };
        for (long i = 0; i < n_samples; ++i) {
            const std::size_t j = rng() % sr.size();
            const Vec& z = sr.covering.centers[j];
            const double rad = sr.covering.radii[j];
            Vec y1, y2;
            bool found = false;
            for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
                y1 = sample_in_ball_local(z, rad, rng);
                if (!box.contains(y1)) continue;
                y2 = sample_in_ball_local(y1, rad / 4.0, rng);
                if (!box.contains(y2) || (y2 - z).norm() >= rad) continue;
                if ((y1 - y2).norm() < 1e-12) continue;
                found = true;
            }
            if (!found) {
                ++r.failures;
                continue;
            }
            const double ratio = (H(y1) - H(y2)).norm() / (y1 - y2).norm();
            min_ratio = std::min(min_ratio, ratio);
            if (!(ratio >= 2.0 / 9.0)) ++r.failures;
        }
        r.detail = "min ratio " + std::to_string(min_ratio) + " (required 2/9 = 0.2222)";
        out.push_back(r);
    }

    {
        SuiteResult r{"smoothness_probe"};
        const long n_prob = std::min<long>(100, n_samples);
        r.samples = n_prob;
        std::mt19937_64 rng(seed + 4);
        Box inner = box;
        inner.lo.array() += 2e-5;
        inner.hi.array() -= 2e-5;
        double worst = 0.0;
        auto fd_h_grad = [&](const Vec& x, double s) {
            Vec g(x.size());
            Vec e = x;
            for (Eigen::Index d = 0; d < x.size(); ++d) {
                e[d] = x[d] + s;
                const double hp = eval_h(sr, e);
                e[d] = x[d] - s;
                const double hm = eval_h(sr, e);
                e[d] = x[d];
                g[d] = (hp - hm) / (2.0 * s);
            }
            return g;
        };
        for (long i = 0; i < n_prob; ++i) {
            const Vec x = inner.sample(rng);
            const Vec g5 = fd_h_grad(x, 1e-5);
            const Vec g6 = fd_h_grad(x, 1e-6);
            const double floor = 1e-8 * eval_h(sr, x) / sr.covering.spacing;
            const double err = (g5 - g6).norm();
            const double allowed = 1e-3 * g5.norm() + floor;
            worst = std::max(worst, err / std::max(allowed, 1e-300));
            if (!(err <= allowed)) ++r.failures;
        }
        r.detail = "worst err/allowed " + std::to_string(worst);
        out.push_back(r);
    }

    return out;
}

} // namespace descent
