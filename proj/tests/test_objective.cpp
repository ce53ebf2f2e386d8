#include <doctest.h>

#include <cmath>
#include <random>

#include "descent/checks.hpp"
#include "descent/corpus.hpp"

using namespace descent;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec v1(double a) {
    Vec v(1);
    v << a;
    return v;
}

// Independent symbolic second derivative of t^3 sin(1/t), used as the
// oracle for finite-difference Hessians of example1.
double example1_second(double t) {
    return 6.0 * t * std::sin(1.0 / t) - 4.0 * std::cos(1.0 / t) - std::sin(1.0 / t) / t;
}

} // namespace

TEST_CASE("fd_gradient on a quadratic is exact") {
    const Objective obj = corpus_get("quadratic_form"); // identity, dim 2
    const Vec g = fd_gradient(obj, v2(1.0, 1.0), 1e-5);
    CHECK(std::abs(g[0] - 1.0) <= 1e-9);
    CHECK(std::abs(g[1] - 1.0) <= 1e-9);

    // critical point of the quadratic
    const Vec g0 = fd_gradient(obj, v2(0.0, 0.0), 1e-5);
    CHECK(g0.norm() <= 1e-9);
}

TEST_CASE("fd_gradient matches the example1 gradient formula at (1/pi, 1/pi)") {
    const Objective obj = corpus_get("example1");
    const double t = 1.0 / M_PI;
    const Vec g = fd_gradient(obj, v2(t, t), 1e-6);
    // 3t^2 sin(pi) - t cos(pi) = t
    CHECK(std::abs(g[0] - t) <= 1e-8);
    CHECK(std::abs(g[1] - t) <= 1e-8);
    const Vec ga = obj.grad(v2(t, t));
    CHECK(std::abs(ga[0] - g[0]) <= 1e-8);
}

TEST_CASE("fd_hessian basics") {
    SUBCASE("indefinite quadratic: diag(1,-1)") {
        const Objective obj = corpus_get("quadratic_form", {{"a00", 1}, {"a11", -1}});
        const Mat h = fd_hessian(obj, v2(0.3, -0.7));
        CHECK(std::abs(h(0, 0) - 1.0) <= 1e-6);
        CHECK(std::abs(h(1, 1) + 1.0) <= 1e-6);
        CHECK(std::abs(h(0, 1)) <= 1e-6);
    }
    SUBCASE("identity at origin") {
        const Objective obj = corpus_get("quadratic_form");
        const Mat h = fd_hessian(obj, v2(0.0, 0.0));
        CHECK((h - Mat::Identity(2, 2)).norm() <= 1e-6);
    }
    SUBCASE("example1 diagonal matches the symbolic oracle at (1/pi, 1/pi)") {
        const Objective obj = corpus_get("example1");
        const double t = 1.0 / M_PI;
        const Mat h = fd_hessian(obj, v2(t, t));
        CHECK(std::abs(h(0, 0) - example1_second(t)) <= 1e-4);
        CHECK(std::abs(h(1, 1) - example1_second(t)) <= 1e-4);
        CHECK(std::abs(h(0, 1)) <= 1e-4);
    }
}

TEST_CASE("corpus_get validates names and params") {
    CHECK_THROWS_AS(corpus_get("nope"), ConfigError);
    CHECK_THROWS_AS(corpus_get("power_abs", {{"gamma", 1.5}}), ConfigError);
    CHECK_THROWS_AS(corpus_get("power_abs", {{"gamma", 0.0}}), ConfigError);
    CHECK_THROWS_AS(corpus_get("example2", {{"p", 2}}), ConfigError);
    CHECK_THROWS_AS(corpus_get("example2", {{"q", 0}}), ConfigError);
    CHECK_THROWS_AS(corpus_get("quadratic_form", {{"bogus", 1}}), ConfigError);
}

TEST_CASE("example1 axis extension") {
    const Objective obj = corpus_get("example1");
    CHECK(obj.f(v2(0.0, 0.0)) == 0.0);
    CHECK(obj.grad(v2(0.0, 0.0)).norm() == 0.0);

    // gradient normal to the axis is exactly 0 on it
    const Vec g = obj.grad(v2(0.0, 0.7));
    CHECK(g[0] == 0.0);

    // continuity across the axis: |f(e,y) - f(0,y)| <= 2|e|^3
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uy(-1.0, 1.0), ue(1e-12, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double y = uy(rng), e = ue(rng);
        CHECK(std::abs(obj.f(v2(e, y)) - obj.f(v2(0.0, y))) <= 2.0 * e * e * e + 1e-15);
    }

    CHECK_FALSE(obj.is_smooth_at(v2(0.0, 0.7)));
    CHECK(obj.is_smooth_at(v2(0.5, 0.7)));
    CHECK_THROWS_AS(obj.hessian(v2(0.0, 0.7)), NonSmoothError);
}

TEST_CASE("power_abs values") {
    const Objective obj = corpus_get("power_abs", {{"gamma", 0.5}});
    CHECK(obj.f(v1(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(obj.grad(v1(1.0))[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(obj.grad(v1(0.0))[0] == 0.0);
    CHECK(obj.grad(v1(-1.0))[0] == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("double_well critical structure") {
    const Objective obj = corpus_get("double_well");
    CHECK(obj.grad(v2(0.0, 0.0)).norm() == 0.0);
    CHECK(obj.grad(v2(1.0, 0.0)).norm() == 0.0);
    CHECK(obj.grad(v2(-1.0, 0.0)).norm() == 0.0);
    const Mat h = obj.hessian(v2(0.0, 0.0));
    CHECK(h(0, 0) == doctest::Approx(-1.0));
    CHECK(h(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("gradient consistency across the corpus") {
    const SuiteResult res = check_gradient_consistency(1000, 20240601);
    INFO(res.detail);
    CHECK(res.failures == 0);
    CHECK(res.samples >= 1000);
}

TEST_CASE("hessian consistency across the corpus") {
    const SuiteResult res = check_hessian_consistency(300, 20240602);
    INFO(res.detail);
    CHECK(res.failures == 0);
}

TEST_CASE("lipschitz field validity for example1 (sampled pairs)") {
    const Objective obj = corpus_get("example1");
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0), u01(0.0, 1.0);
    long checked = 0;
    for (int i = 0; i < 1000; ++i) {
        Vec x = v2(u(rng), u(rng));
        if (std::min(std::abs(x[0]), std::abs(x[1])) < 1e-2) continue;
        const LocalLipschitz lip = obj.lipschitz(x);
        REQUIRE(lip.L > 0.0);
        REQUIRE(lip.r > 0.0);
        for (int k = 0; k < 100; ++k) {
            // uniform pair in B(x, r)
            Vec d1(2), d2(2);
            std::normal_distribution<double> gauss;
            d1 << gauss(rng), gauss(rng);
            d2 << gauss(rng), gauss(rng);
            const Vec y = x + d1 * (lip.r * std::sqrt(u01(rng)) / d1.norm());
            const Vec z = x + d2 * (lip.r * std::sqrt(u01(rng)) / d2.norm());
            const double dist = (y - z).norm();
            if (dist < 1e-12) continue;
            const double ratio = (obj.grad(y) - obj.grad(z)).norm() / dist;
            CHECK(ratio <= lip.L * (1.0 + 1e-9));
            ++checked;
        }
    }
    CHECK(checked > 50000);
}

TEST_CASE("lipschitz field validity for the rest of the corpus") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-2.0, 2.0), u01(0.0, 1.0);
    for (const char* name : {"double_well", "rosenbrock", "quadratic_form"}) {
        const Objective obj = corpus_get(name);
        for (int i = 0; i < 100; ++i) {
            Vec x(obj.dim);
            for (int d = 0; d < obj.dim; ++d) x[d] = u(rng);
            const LocalLipschitz lip = obj.lipschitz(x);
            const double r = std::min(lip.r, 2.0);
            for (int k = 0; k < 50; ++k) {
                Vec d1(obj.dim), d2(obj.dim);
                std::normal_distribution<double> gauss;
                for (int d = 0; d < obj.dim; ++d) {
                    d1[d] = gauss(rng);
                    d2[d] = gauss(rng);
                }
                const Vec y = x + d1 * (r * std::sqrt(u01(rng)) / d1.norm());
                const Vec z = x + d2 * (r * std::sqrt(u01(rng)) / d2.norm());
                const double dist = (y - z).norm();
                if (dist < 1e-12) continue;
                const double ratio = (obj.grad(y) - obj.grad(z)).norm() / dist;
                CHECK(ratio <= lip.L * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("corpus_get is pure: evaluations agree bit-for-bit") {
    const Objective a = corpus_get("example2", {{"p", 4}, {"q", 2}});
    const Objective b = corpus_get("example2", {{"p", 4}, {"q", 2}});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Vec x = v2(u(rng), u(rng));
        CHECK(a.f(x) == b.f(x));
        CHECK(a.grad(x) == b.grad(x));
    }
}

TEST_CASE("fd_hessian flags asymmetric difference matrices") {
    // A rotational field is not a gradient: its raw Jacobian is
    // antisymmetric and the symmetrized Hessian is meaningless.
    Objective rot;
    rot.dim = 2;
    rot.f = [](const Vec& x) { return x[0] * x[1]; };
    rot.grad = [](const Vec& x) -> Vec {
        Vec g(2);
        g << x[1], -x[0];
        return g;
    };
    double asym = 0.0;
    fd_hessian(rot, v2(0.3, 0.4), 1e-4, &asym);
    CHECK(asym > 1e-3);

    // a genuine C^2 objective stays far below the warning threshold
    const Objective dw = corpus_get("double_well");
    fd_hessian(dw, v2(0.3, 0.4), 1e-4, &asym);
    CHECK(asym < 1e-8);
}

TEST_CASE("fd_gradient reports the offending coordinate") {
    Objective bad;
    bad.dim = 2;
    bad.f = [](const Vec& x) {
        return x[1] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x.squaredNorm();
    };
    bad.grad = [](const Vec& x) -> Vec { return 2.0 * x; };
    try {
        fd_gradient(bad, v2(0.0, 0.5), 1e-5);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
    }
}
