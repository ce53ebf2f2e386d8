#include <doctest.h>

#include <cmath>

#include "descent/experiments.hpp"
#include "descent/serialize.hpp"

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

SweepConfig double_well_sweep(RuleKind kind, long n_runs, std::uint64_t seed) {
    SweepConfig cfg;
    cfg.objective = "double_well";
    cfg.rule.kind = kind;
    cfg.init_box = box2(-2.0, 2.0);
    cfg.n_runs = n_runs;
    cfg.seed = seed;
    // f = -1/4 at the minima, so Armijo comparisons turn into rounding
    // noise near ||g|| ~ sqrt(eps/4); stop well above that shell.
    cfg.run_config.grad_tol = 1e-6;
    cfg.run_config.max_iters = 100000;
    return cfg;
}

} // namespace

TEST_CASE("double_well sweep avoids the saddle and splits between the minima") {
    const SweepReport rep = sweep(double_well_sweep(RuleKind::Backtracking, 300, 42));
    CHECK(rep.saddle_hits == 0);
    CHECK(rep.diverged == 0);
    CHECK(rep.nonconverged == 0);
    CHECK(rep.total() == 300);
    CHECK(rep.class_counts.at("LocalMinimumLike") == 300);

    const std::vector<Basin> basins = basin_statistics(rep, 1e-2);
    REQUIRE(basins.size() == 2);
    CHECK(basins[0].count + basins[1].count == 300);
    for (const Basin& b : basins) {
        const double d_plus = (b.representative - v2(1.0, 0.0)).norm();
        const double d_minus = (b.representative - v2(-1.0, 0.0)).norm();
        CHECK(std::min(d_plus, d_minus) <= 1e-5);
        CHECK(b.mean_f == doctest::Approx(-0.25).epsilon(1e-9));
    }
}

TEST_CASE("a degenerate init box at the exact saddle is a real exceptional set") {
    SweepConfig cfg = double_well_sweep(RuleKind::Backtracking, 1, 1);
    cfg.init_box.lo = v2(0.0, 0.0);
    cfg.init_box.hi = v2(0.0, 0.0);
    const SweepReport rep = sweep(cfg);
    CHECK(rep.saddle_hits == 1);
    CHECK(rep.class_counts.at("Saddle") == 1);
    CHECK(rep.mean_iterations == 0.0); // stops immediately at the critical point
}

TEST_CASE("diverging sweep yields an empty basin table") {
    SweepConfig cfg;
    cfg.objective = "quadratic_form";
    cfg.objective_params = {{"a00", -1}, {"a11", -1}};
    cfg.rule.kind = RuleKind::Standard;
    cfg.params.delta0 = 0.5;
    cfg.init_box = box2(0.5, 1.5);
    cfg.n_runs = 20;
    cfg.seed = 3;
    const SweepReport rep = sweep(cfg);
    CHECK(rep.diverged == 20);
    CHECK(rep.converged_terminals.empty());
    CHECK(basin_statistics(rep, 1e-2).empty());
}

TEST_CASE("a single bowl gives a single basin") {
    SweepConfig cfg;
    cfg.objective = "quadratic_form";
    cfg.rule.kind = RuleKind::Backtracking;
    cfg.init_box = box2(-2.0, 2.0);
    cfg.n_runs = 50;
    cfg.seed = 9;
    const SweepReport rep = sweep(cfg);
    const std::vector<Basin> basins = basin_statistics(rep, 1e-2);
    REQUIRE(basins.size() == 1);
    CHECK(basins[0].count == 50);
    CHECK(basins[0].representative.norm() <= 1e-6);
}

TEST_CASE("sweeps are reproducible and thread-count independent") {
    const SweepConfig cfg = double_well_sweep(RuleKind::TwoWay, 120, 77);
    const SweepReport a = sweep(cfg, 1);
    const SweepReport b = sweep(cfg, 1);
    const SweepReport c = sweep(cfg, 4);
    const auto dump = [](const SweepReport& r) {
        return sweep_report_to_json(r, basin_statistics(r, 1e-2), 1e-2).dump();
    };
    CHECK(dump(a) == dump(b));
    CHECK(dump(a) == dump(c));
}

TEST_CASE("random parameter draws happen once per sweep and stay in range") {
    SweepConfig cfg = double_well_sweep(RuleKind::GdNew, 40, 123);
    cfg.random_params = true;
    const SweepReport rep = sweep(cfg);
    const BacktrackParams& p = rep.effective_params;
    CHECK(p.delta0 >= cfg.ranges.delta0_lo);
    CHECK(p.delta0 <= cfg.ranges.delta0_hi);
    CHECK(p.alpha >= cfg.ranges.alpha_lo);
    CHECK(p.alpha <= cfg.ranges.alpha_hi);
    CHECK(p.beta >= cfg.ranges.beta_lo);
    CHECK(p.beta <= cfg.ranges.beta_hi);
    CHECK(rep.saddle_hits == 0);
    // same seed, same draw
    const SweepReport rep2 = sweep(cfg);
    CHECK(rep2.effective_params.delta0 == p.delta0);
    CHECK(rep2.effective_params.alpha == p.alpha);
    CHECK(rep2.effective_params.beta == p.beta);
}

TEST_CASE("gd_new sweep on the axis-free example1 box finds only minima") {
    SweepConfig cfg;
    cfg.objective = "example1";
    cfg.rule.kind = RuleKind::GdNew;
    cfg.init_box = box2(0.5, 2.0);
    cfg.n_runs = 60;
    cfg.seed = 2024;
    cfg.run_config.grad_tol = 1e-8; // gd_new compares no f values, no noise shell
    cfg.run_config.max_iters = 100000;
    const SweepReport rep = sweep(cfg);
    CHECK(rep.saddle_hits == 0);
    CHECK(rep.total() == 60);
    long converged = 0;
    for (const auto& [k, v] : rep.class_counts) {
        converged += v;
        CHECK(k == "LocalMinimumLike");
    }
    CHECK(converged == 60);
}

TEST_CASE("standard GD fails on |x|^1.5 while backtracking converges") {
    SweepConfig cfg;
    cfg.objective = "power_abs";
    cfg.objective_params = {{"gamma", 0.5}};
    cfg.init_box.lo = Vec::Ones(1);
    cfg.init_box.hi = Vec::Ones(1);
    cfg.n_runs = 1;
    cfg.run_config.max_iters = 10000;
    cfg.run_config.grad_tol = 1e-12;

    cfg.rule.kind = RuleKind::Standard;
    const SweepReport std_rep = sweep(cfg);
    CHECK(std_rep.nonconverged == 1); // oscillates forever

    cfg.rule.kind = RuleKind::Backtracking;
    const SweepReport bt_rep = sweep(cfg);
    REQUIRE(bt_rep.converged_terminals.size() == 1);
    CHECK(std::abs(bt_rep.converged_terminals[0].x[0]) < 1e-3);
}

TEST_CASE("sweep validates its config") {
    SweepConfig cfg = double_well_sweep(RuleKind::Backtracking, 0, 1);
    CHECK_THROWS_AS(sweep(cfg), ConfigError);
    cfg = double_well_sweep(RuleKind::Backtracking, 1, 1);
    cfg.init_box.lo = Vec::Zero(1); // dimension mismatch
    cfg.init_box.hi = Vec::Zero(1);
    CHECK_THROWS_AS(sweep(cfg), ConfigError);
}

TEST_CASE("step collapses are counted, not fatal") {
    SweepConfig cfg;
    cfg.objective = "power_abs";
    cfg.objective_params = {{"gamma", 0.5}};
    cfg.rule.kind = RuleKind::GdNew;
    cfg.init_box.lo = -Vec::Ones(1);
    cfg.init_box.hi = Vec::Ones(1);
    cfg.n_runs = 30;
    cfg.seed = 5;
    cfg.params.max_halvings = 60;
    cfg.run_config.max_iters = 20000;
    cfg.run_config.grad_tol = 1e-10;
    // gd_new on |x|^1.5: L(x) explodes near 0, so runs either converge,
    // hit the cap, or collapse; the sweep must account for every run.
    const SweepReport rep = sweep(cfg);
    CHECK(rep.total() == 30);
}
