#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "descent/analysis.hpp"
#include "descent/checks.hpp"
#include "descent/config.hpp"
#include "descent/serialize.hpp"

namespace {

using namespace descent;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStepCollapse = 3;
constexpr int kExitInvariant = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string rule;
    std::string objective;
    long seed = -1;
    int parallel = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--out", opts.out_path, "output path");
    cmd->add_option("--seed", opts.seed, "RNG seed (overrides config)");
    cmd->add_option("--parallel", opts.parallel, "worker threads for sweeps");
    cmd->add_option("--rule", opts.rule, "step rule name");
    cmd->add_option("--objective", opts.objective, "corpus objective name");
    cmd->add_option("overrides", opts.overrides, "dotted-key overrides (key=value)");
}

KvConfig load_config(const CommonOpts& opts) {
    KvConfig cfg;
    if (!opts.config_path.empty()) cfg = KvConfig::from_file(opts.config_path);
    for (const std::string& kv : opts.overrides) cfg.set_pair(kv);
    if (!opts.rule.empty()) cfg.set("rule.name", opts.rule);
    if (!opts.objective.empty()) cfg.set("objective.name", opts.objective);
    if (opts.seed >= 0) cfg.set("seed", std::to_string(opts.seed));
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file '" + path + "'");
    return os;
}

// Builds the smooth rate the way cmd_pou and rule=continuous both need it.
SmoothRate build_rate_from_config(const Objective& obj, const KvConfig& cfg) {
    const Box box = box_from(cfg, "pou.box");
    const double spacing = cfg.get_double("pou.spacing");
    const BacktrackParams p = backtrack_params_from(cfg);
    const std::uint64_t seed = cfg.get_u64("seed", 0);
    const RateMode mode =
        rate_mode_from_string(cfg.get_string("pou.mode", "faithful"));
    const int mj_samples = static_cast<int>(cfg.get_long("pou.mj_samples", 1000));
    const Covering cov = build_covering(obj, box, spacing, p.alpha, seed);
    return build_smooth_rate(obj, cov, p.delta0, p.alpha, mj_samples, mode, seed);
}

std::string classify_label(const Objective& obj, const Vec& x, const RunConfig& rc) {
    try {
        return to_string(classify_critical_point(obj, x, rc.grad_tol).kind);
    } catch (const Error&) {
        return "Unclassifiable";
    }
}

int cmd_run(const CommonOpts& opts) {
    const KvConfig cfg = load_config(opts);
    const Objective obj = objective_from(cfg);
    const BacktrackParams p = backtrack_params_from(cfg);
    const RunConfig rc = run_config_from(cfg);
    const Vec x0 = cfg.get_vec("run.x0");
    if (x0.size() != obj.dim) throw ConfigError("run.x0 dimension mismatch");

    Rule rule;
    rule.kind = rule_from_string(cfg.get_string("rule.name", "backtracking"));
    rule.gamma = cfg.get_double("rule.gamma", 0.9);
    SmoothRate rate;
    std::string mode;
    if (rule.kind == RuleKind::Continuous) {
        rate = build_rate_from_config(obj, cfg);
        rule.rate = &rate;
        mode = to_string(rate.mode);
    }

    const Trace trace = run(obj, x0, rule, p, rc);
    const Json header =
        make_trace_header(obj.name, cfg.get_params("objective.params"), rule, p, rc,
                          x0, cfg.get_u64("seed", 0), mode);
    const std::string terminal =
        trace.stop_reason == StopReason::GradientTolerance
            ? classify_label(obj, trace.records.back().x, rc)
            : "NotCritical";

    if (!opts.out_path.empty()) {
        auto os = open_out(opts.out_path);
        write_trace_jsonl(os, trace, header, terminal);
    } else {
        write_trace_jsonl(std::cout, trace, header, terminal);
    }
    std::cerr << "stop: " << to_string(trace.stop_reason) << ", terminal: " << terminal
              << ", records: " << trace.records.size() << "\n";
    return trace.stop_reason == StopReason::StepCollapse ? kExitStepCollapse : kExitOk;
}

int cmd_sweep(const CommonOpts& opts) {
    const KvConfig cfg = load_config(opts);
    SweepConfig sc;
    sc.objective = cfg.get_string("objective.name");
    sc.objective_params = cfg.get_params("objective.params");
    sc.rule.kind = rule_from_string(cfg.get_string("rule.name", "backtracking"));
    sc.rule.gamma = cfg.get_double("rule.gamma", 0.9);
    sc.params = backtrack_params_from(cfg);
    sc.random_params = cfg.get_bool("sweep.random_params", false);
    sc.init_box = box_from(cfg, "sweep.box");
    sc.n_runs = cfg.get_long("sweep.n_runs", 1000);
    sc.seed = cfg.get_u64("seed", cfg.get_u64("sweep.seed", 0));
    sc.run_config = run_config_from(cfg);

    SmoothRate rate;
    if (sc.rule.kind == RuleKind::Continuous) {
        const Objective obj = corpus_get(sc.objective, sc.objective_params);
        rate = build_rate_from_config(obj, cfg);
        sc.rule.rate = &rate;
    }

    const SweepReport report = sweep(sc, opts.parallel);
    const double cluster_radius = cfg.get_double("sweep.cluster_radius", 1e-2);
    const std::vector<Basin> basins = basin_statistics(report, cluster_radius);
    const Json j = sweep_report_to_json(report, basins, cluster_radius);

    const std::string base = opts.out_path.empty() ? "sweep_report" : opts.out_path;
    {
        auto os = open_out(base + ".json");
        os << j.dump(2) << "\n";
    }
    {
        auto os = open_out(base + ".csv");
        os << sweep_report_csv(report, basins.size());
    }
    std::cout << sweep_report_csv(report, basins.size());
    return kExitOk;
}

int cmd_pou(const CommonOpts& opts) {
    const KvConfig cfg = load_config(opts);
    const Objective obj = objective_from(cfg);
    const SmoothRate rate = build_rate_from_config(obj, cfg);

    const long n_samples = cfg.get_long("pou.check_samples", 10000);
    const std::vector<SuiteResult> suite =
        smoothrate_invariant_suite(obj, rate, n_samples, cfg.get_u64("seed", 0));

    if (!opts.out_path.empty()) {
        auto os = open_out(opts.out_path);
        os << smooth_rate_to_json(rate, obj.name).dump(2) << "\n";
    }
    bool all_pass = true;
    for (const SuiteResult& r : suite) {
        std::cout << format_suite_line(r) << "\n";
        all_pass = all_pass && r.pass();
    }
    std::cout << "mode: " << to_string(rate.mode) << ", balls: " << rate.size()
              << ", K: " << rate.max_cover << "\n";
    return all_pass ? kExitOk : kExitInvariant;
}

int cmd_verify(const CommonOpts& opts) {
    const KvConfig cfg = load_config(opts);
    const std::string suite = cfg.get_string("verify.suite", "all");
    const std::uint64_t seed = cfg.get_u64("seed", 0);

    std::vector<SuiteResult> results;
    auto want = [&](const std::string& name) { return suite == "all" || suite == name; };
    bool known = suite == "all";
    if (want("gradient_consistency")) {
        known = true;
        results.push_back(check_gradient_consistency(
            cfg.get_long("verify.samples", 1000), seed));
    }
    if (want("hessian_consistency")) {
        known = true;
        results.push_back(check_hessian_consistency(
            cfg.get_long("verify.samples", 1000), seed));
    }
    if (want("armijo_maximality")) {
        known = true;
        results.push_back(check_armijo_maximality(
            cfg.get_long("verify.samples", 10000), seed));
    }
    if (want("delta_hat_oracle")) {
        known = true;
        results.push_back(check_delta_hat_oracle(
            cfg.get_long("verify.samples", 100000), seed));
    }
    if (want("descent_lemma")) {
        known = true;
        results.push_back(check_descent_lemma(
            cfg.get_long("verify.samples", 1000), seed));
    }
    if (!known) throw ConfigError("verify: unknown suite '" + suite + "'");

    bool all_pass = true;
    for (const SuiteResult& r : results) {
        std::cout << format_suite_line(r) << "\n";
        if (r.samples == 0) std::cout << "warning: " << r.name << " ran on 0 samples\n";
        all_pass = all_pass && r.pass();
    }
    return all_pass ? kExitOk : kExitInvariant;
}

int cmd_classify(const CommonOpts& opts) {
    const KvConfig cfg = load_config(opts);
    const Objective obj = objective_from(cfg);
    const Vec x = cfg.get_vec("classify.x");
    if (x.size() != obj.dim) throw ConfigError("classify.x dimension mismatch");
    const double grad_tol = cfg.get_double("classify.grad_tol", 1e-8);
    const double eig_tol = cfg.get_double("classify.eig_tol", 1e-6);

    const CriticalPointClass c = classify_critical_point(obj, x, grad_tol, eig_tol);
    Json j;
    j["objective"] = obj.name;
    j["x"] = std::vector<double>(x.begin(), x.end());
    j["kind"] = to_string(c.kind);
    j["generalised"] = c.generalised;
    j["min_eigenvalue"] = c.min_eigenvalue;
    j["max_eigenvalue"] = c.max_eigenvalue;
    j["grad_norm"] = c.grad_norm;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-descent line-search lab: single runs, random-restart "
                 "sweeps, smooth step-size construction, and invariant checks"};
    app.require_subcommand(1);

    CommonOpts opts;
    int (*handler)(const CommonOpts&) = nullptr;

    auto* c_run = app.add_subcommand("run", "iterate one trajectory, write a JSON-lines trace");
    add_common(c_run, opts);
    c_run->callback([&] { handler = cmd_run; });
    auto* c_sweep = app.add_subcommand("sweep", "random-restart sweep, write JSON + CSV reports");
    add_common(c_sweep, opts);
    c_sweep->callback([&] { handler = cmd_sweep; });
    auto* c_pou = app.add_subcommand("pou", "build the smooth step-size function and verify it");
    add_common(c_pou, opts);
    c_pou->callback([&] { handler = cmd_pou; });
    auto* c_verify = app.add_subcommand("verify", "run verification suites");
    add_common(c_verify, opts);
    c_verify->callback([&] { handler = cmd_verify; });
    auto* c_classify = app.add_subcommand("classify", "classify a point's critical-point type");
    add_common(c_classify, opts);
    c_classify->callback([&] { handler = cmd_classify; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfig : kExitOk;
    }

    try {
        return handler(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StepCollapseError& e) {
        std::cerr << "step collapse: " << e.what() << "\n";
        return kExitStepCollapse;
    } catch (const InvariantError& e) {
        std::cerr << "invariant failure: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
