#include <doctest.h>

#include <cmath>
#include <random>

#include "descent/checks.hpp"
#include "descent/corpus.hpp"
#include "descent/serialize.hpp"
#include "descent/smoothrate.hpp"

using namespace descent;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Box box2(double lo, double hi) {
    Box b;
    b.lo = v2(lo, lo);
    b.hi = v2(hi, hi);
    return b;
}

// The Hessian-norm bound for example1 at the worst corner of B(c, rad):
// 6(|x|+|y|) + 8 + 1/|x| + 1/|y| with the monotone pieces pushed to their
// extremes over the ball.
double example1_ball_bound(const Vec& c, double rad) {
    const double ax = std::abs(c[0]), ay = std::abs(c[1]);
    return 6.0 * (ax + rad + ay + rad) + 8.0 + 1.0 / (ax - rad) + 1.0 / (ay - rad);
}

} // namespace

TEST_CASE("build_covering on the quadratic box") {
    const Objective q = corpus_get("quadratic_form");
    const Covering cov = build_covering(q, box2(-1.0, 1.0), 0.5, 0.5);
    CHECK(cov.centers.size() == 25);
    CHECK(cov.radii[0] == doctest::Approx(0.5 * std::sqrt(2.0)));
    for (double L : cov.lipschitz) CHECK(L == doctest::Approx(1.0)); // alpha=0.5: no raise

    // alpha = 0.9 raises L to L / (2 * 0.1) = 5
    const Covering cov9 = build_covering(q, box2(-1.0, 1.0), 0.5, 0.9);
    for (double L : cov9.lipschitz) CHECK(L == doctest::Approx(5.0));
}

TEST_CASE("build_covering on the axis-free example1 box") {
    const Objective e1 = corpus_get("example1");
    const Covering cov = build_covering(e1, box2(0.5, 2.0), 0.25, 0.5);
    CHECK(cov.centers.size() == 49);
    for (std::size_t j = 0; j < cov.centers.size(); ++j) {
        CHECK(cov.lipschitz[j] <=
              example1_ball_bound(cov.centers[j], cov.radii[j]) * (1.0 + 1e-12));
    }

    // coverage: every sampled box point lies inside at least one ball
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10000; ++i) {
        const Vec x = cov.box.sample(rng);
        bool inside = false;
        for (std::size_t j = 0; j < cov.centers.size() && !inside; ++j)
            inside = (x - cov.centers[j]).norm() < cov.radii[j];
        CHECK(inside);
    }
}

TEST_CASE("covering L values are verified Lipschitz bounds on their balls") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    struct Case {
        const char* objective;
        Box box;
        double spacing;
    };
    const Case cases[] = {{"quadratic_form", box2(-1.0, 1.0), 0.5},
                          {"example1", box2(0.5, 2.0), 0.25},
                          {"double_well", box2(-2.0, 2.0), 0.5}};
    for (const Case& c : cases) {
        const Objective obj = corpus_get(c.objective);
        const Covering cov = build_covering(obj, c.box, c.spacing, 0.5);
        for (std::size_t j = 0; j < cov.centers.size(); j += 3) {
            for (int k = 0; k < 60; ++k) {
                Vec d1(2), d2(2);
                std::normal_distribution<double> gauss;
                d1 << gauss(rng), gauss(rng);
                d2 << gauss(rng), gauss(rng);
                const Vec y = cov.centers[j] +
                              d1 * (cov.radii[j] * std::sqrt(u01(rng)) / d1.norm());
                const Vec z = cov.centers[j] +
                              d2 * (cov.radii[j] * std::sqrt(u01(rng)) / d2.norm());
                if (!obj.is_smooth_at(y) || !obj.is_smooth_at(z)) continue;
                const double dist = (y - z).norm();
                if (dist < 1e-12) continue;
                const double ratio = (obj.grad(y) - obj.grad(z)).norm() / dist;
                CHECK(ratio <= cov.lipschitz[j] * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("build_covering rejects boxes near the singular locus") {
    const Objective e1 = corpus_get("example1");
    CHECK_THROWS_AS(build_covering(e1, box2(-1.0, 1.0), 0.5, 0.5), ConfigError);
    Box touching;
    touching.lo = v2(0.05, 0.5);
    touching.hi = v2(2.0, 2.0);
    CHECK_THROWS_AS(build_covering(e1, touching, 0.25, 0.5), ConfigError);
}

TEST_CASE("estimate_local_lipschitz") {
    SUBCASE("identity quadratic: ratio is exactly 1") {
        const Objective q = corpus_get("quadratic_form");
        const double est = estimate_local_lipschitz(q, v2(0.3, -0.2), 1.0, 500, 1.0, 3);
        CHECK(est == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("diag(3,1): spectral norm 3 via the Hessian lower bound") {
        const Objective q = corpus_get("quadratic_form", {{"a00", 3}, {"a11", 1}});
        const double est = estimate_local_lipschitz(q, v2(0.0, 0.0), 1.0, 1000, 1.0, 4);
        CHECK(est == doctest::Approx(3.0).epsilon(0.05));
    }
    SUBCASE("example1 ball stays under the analytic bound") {
        const Objective e1 = corpus_get("example1");
        const double est = estimate_local_lipschitz(e1, v2(1.0, 1.0), 0.1, 1000, 1.0, 5);
        CHECK(est <= example1_ball_bound(v2(1.0, 1.0), 0.1));
        CHECK(est > 0.0);
    }
}

TEST_CASE("single-ball covering gives a constant h") {
    const Objective q = corpus_get("quadratic_form");
    Covering cov;
    cov.box = box2(-1.0, 1.0);
    cov.spacing = 2.0;
    cov.alpha = 0.5;
    cov.centers = {v2(0.0, 0.0)};
    cov.radii = {10.0}; // one ball covering the whole box
    cov.lipschitz = {1.0};
    const SmoothRate sr = build_smooth_rate(q, cov, 1.0, 0.5, 500, RateMode::Faithful, 9);

    // phi_1 == 1 everywhere, so grad phi_1 == 0 and M_1 == 0; the single
    // term is min{1/(2L), delta0, 1} / (10 * (M_1 + 1)) = 0.05.
    CHECK(sr.mj[0] == 0.0);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 100; ++i) {
        const double h = eval_h(sr, cov.box.sample(rng));
        CHECK(h == doctest::Approx(0.05).epsilon(1e-12));
    }
    const std::vector<double> phi = partition_values(sr, v2(0.3, 0.4));
    CHECK(phi[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("smooth rate invariants on the quadratic box") {
    const Objective q = corpus_get("quadratic_form");
    const Covering cov = build_covering(q, box2(-1.0, 1.0), 0.5, 0.5);
    const SmoothRate sr = build_smooth_rate(q, cov, 1.0, 0.5, 500, RateMode::Faithful, 21);
    const auto suite = smoothrate_invariant_suite(q, sr, 2000, 22);
    for (const SuiteResult& r : suite) {
        INFO(format_suite_line(r));
        CHECK(r.pass());
    }
}

TEST_CASE("smooth rate invariants on the example1 box") {
    const Objective e1 = corpus_get("example1");
    const Covering cov = build_covering(e1, box2(0.5, 2.0), 0.25, 0.5);
    const SmoothRate sr = build_smooth_rate(e1, cov, 1.0, 0.5, 500, RateMode::Faithful, 23);
    const auto suite = smoothrate_invariant_suite(e1, sr, 2000, 24);
    for (const SuiteResult& r : suite) {
        INFO(format_suite_line(r));
        CHECK(r.pass());
    }
}

TEST_CASE("practical mode also passes the invariant suite and steps faster") {
    const Objective q = corpus_get("quadratic_form");
    const Covering cov = build_covering(q, box2(-1.0, 1.0), 0.5, 0.5);
    const SmoothRate faithful = build_smooth_rate(q, cov, 1.0, 0.5, 500, RateMode::Faithful, 25);
    const SmoothRate practical = build_smooth_rate(q, cov, 1.0, 0.5, 500, RateMode::Practical, 25);
    const auto suite = smoothrate_invariant_suite(q, practical, 2000, 26);
    for (const SuiteResult& r : suite) {
        INFO(format_suite_line(r));
        CHECK(r.pass());
    }
    // the practical damping dominates the 10^-j tail
    std::mt19937_64 rng(27);
    double fsum = 0.0, psum = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Vec x = cov.box.sample(rng);
        fsum += eval_h(faithful, x);
        psum += eval_h(practical, x);
    }
    CHECK(psum > 10.0 * fsum);
}

TEST_CASE("eval_h domain and range") {
    const Objective q = corpus_get("quadratic_form");
    const Covering cov = build_covering(q, box2(-1.0, 1.0), 0.5, 0.5);
    const SmoothRate sr = build_smooth_rate(q, cov, 1.0, 0.5, 300, RateMode::Faithful, 31);
    CHECK_THROWS_AS(eval_h(sr, v2(1.5, 0.0)), DomainError);
    // corner covered by fewer balls still positive and under delta0
    const double h_corner = eval_h(sr, v2(1.0, 1.0));
    CHECK(h_corner > 0.0);
    CHECK(h_corner <= 1.0);
}

TEST_CASE("continuous_step") {
    const Objective q = corpus_get("quadratic_form");
    const Covering cov = build_covering(q, box2(-1.0, 1.0), 0.5, 0.5);
    const SmoothRate sr = build_smooth_rate(q, cov, 1.0, 0.5, 500, RateMode::Faithful, 33);

    SUBCASE("zero gradient is a fixed point") {
        const StepOutcome out = continuous_step(q, sr, v2(0.0, 0.0));
        CHECK(out.next == v2(0.0, 0.0));
        CHECK(out.armijo_lhs == 0.0);
    }
    SUBCASE("step moves along -grad by h exactly") {
        const Vec x = v2(0.5, 0.0);
        const double h = eval_h(sr, x);
        const StepOutcome out = continuous_step(q, sr, x);
        CHECK(out.step_size == h);
        CHECK(out.next[0] == doctest::Approx(0.5 * (1.0 - h)).epsilon(1e-15));
        CHECK(out.next[1] == 0.0);
        CHECK(out.armijo_lhs <= out.armijo_rhs + 1e-12 * (1.0 + std::abs(q.f(x))));
    }
}

TEST_CASE("continuous rule in the run driver stops at the box edge") {
    // Objective whose minimum lies outside the box, so the trajectory must
    // exit: f = ||x - (2,0)||^2 / 2 pulls iterates toward (2,0).
    Objective pull;
    pull.dim = 2;
    pull.name = "pull";
    pull.f = [](const Vec& x) { return 0.5 * (x - v2(2.0, 0.0)).squaredNorm(); };
    pull.grad = [](const Vec& x) -> Vec { return x - v2(2.0, 0.0); };
    pull.lipschitz = [](const Vec&) { return LocalLipschitz{1.0, 1e10}; };
    pull.lipschitz_on_ball = [](const Vec&, double) { return 1.0; };

    const Covering cov = build_covering(pull, box2(-1.0, 1.0), 0.5, 0.5);
    const SmoothRate sr = build_smooth_rate(pull, cov, 1.0, 0.5, 300, RateMode::Practical, 35);
    Rule rule;
    rule.kind = RuleKind::Continuous;
    rule.rate = &sr;
    RunConfig rc;
    rc.max_iters = 2000000;
    const Trace t = run(pull, v2(0.9, 0.0), rule, {}, rc);
    CHECK(t.stop_reason == StopReason::LeftBox);
    // the terminal record is the iterate that crossed the boundary
    CHECK(t.records.back().x[0] > 1.0);
    REQUIRE(t.records.size() >= 2);
    CHECK(t.records[t.records.size() - 2].x[0] <= 1.0);
}

TEST_CASE("covering gap is detected") {
    const Objective q = corpus_get("quadratic_form");
    Covering cov;
    cov.box = box2(-1.0, 1.0);
    cov.spacing = 0.1;
    cov.alpha = 0.5;
    cov.centers = {v2(-0.9, -0.9), v2(0.9, 0.9)}; // leaves the middle uncovered
    cov.radii = {0.1, 0.1};
    cov.lipschitz = {1.0, 1.0};
    CHECK_THROWS_AS(build_smooth_rate(q, cov, 1.0, 0.5, 100, RateMode::Faithful, 37),
                    InvariantError);
}

TEST_CASE("partition values sum to one across the box") {
    const Objective e1 = corpus_get("example1");
    const Covering cov = build_covering(e1, box2(0.5, 2.0), 0.25, 0.5);
    const SmoothRate sr = build_smooth_rate(e1, cov, 1.0, 0.5, 200, RateMode::Faithful, 39);
    std::mt19937_64 rng(40);
    for (int i = 0; i < 3000; ++i) {
        const std::vector<double> phi = partition_values(sr, cov.box.sample(rng));
        double sum = 0.0, outside = 0.0;
        for (double v : phi) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        (void)outside;
    }
}

TEST_CASE("phi_j vanishes outside its ball") {
    const Objective q = corpus_get("quadratic_form");
    const Covering cov = build_covering(q, box2(-1.0, 1.0), 0.5, 0.5);
    const SmoothRate sr = build_smooth_rate(q, cov, 1.0, 0.5, 200, RateMode::Faithful, 41);
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        const Vec x = cov.box.sample(rng);
        const std::vector<double> phi = partition_values(sr, x);
        for (std::size_t j = 0; j < phi.size(); ++j) {
            if ((x - cov.centers[j]).norm() >= cov.radii[j]) CHECK(phi[j] == 0.0);
        }
    }
}

TEST_CASE("M_j dominates sampled gradient products") {
    const Objective q = corpus_get("quadratic_form");
    const Covering cov = build_covering(q, box2(-1.0, 1.0), 0.5, 0.5);
    const SmoothRate sr = build_smooth_rate(q, cov, 1.0, 0.5, 2000, RateMode::Faithful, 43);
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t j = 0; j < sr.size(); ++j) {
        for (int k = 0; k < 100; ++k) {
            // fresh pairs, independent of the builder's stream
            Vec d1(2), d2(2);
            std::normal_distribution<double> gauss;
            d1 << gauss(rng), gauss(rng);
            d2 << gauss(rng), gauss(rng);
            const Vec y1 = cov.centers[j] + d1 * (cov.radii[j] * std::sqrt(u01(rng)) / d1.norm());
            const Vec y2 = cov.centers[j] + d2 * (cov.radii[j] * std::sqrt(u01(rng)) / d2.norm());
            if (!cov.box.contains(y1)) continue;
            const double product = partition_gradient(sr, j, y1).norm() * q.grad(y2).norm();
            CHECK(product <= sr.mj[j] * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("smooth rate serialization round-trips bit-for-bit") {
    const Objective e1 = corpus_get("example1");
    const Covering cov = build_covering(e1, box2(0.5, 2.0), 0.25, 0.5);
    const SmoothRate sr = build_smooth_rate(e1, cov, 0.7, 0.4, 200, RateMode::Practical, 45);
    const Json j = smooth_rate_to_json(sr, e1.name);
    const SmoothRate back = smooth_rate_from_json(j);
    CHECK(back.delta0 == sr.delta0);
    CHECK(back.alpha == sr.alpha);
    CHECK(back.mode == sr.mode);
    CHECK(back.max_cover == sr.max_cover);
    REQUIRE(back.size() == sr.size());
    std::mt19937_64 rng(46);
    for (int i = 0; i < 300; ++i) {
        const Vec x = cov.box.sample(rng);
        CHECK(eval_h(back, x) == eval_h(sr, x));
    }
    Json bad = j;
    bad["schema"] = "smoothrate/9";
    CHECK_THROWS_AS(smooth_rate_from_json(bad), ConfigError);
}
