#include "descent/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace descent {

namespace {

const char* kTraceSchema = "trace/1";
const char* kSweepSchema = "sweep/1";
const char* kRateSchema = "smoothrate/1";

Json vec_to_json(const Vec& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vec vec_from_json(const Json& arr) {
    Vec v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
    return v;
}

void append_double(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

std::string format_double(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

Json to_json(const BacktrackParams& p) {
    return Json{{"delta0", p.delta0},
                {"alpha", p.alpha},
                {"beta", p.beta},
                {"max_halvings", p.max_halvings}};
}

Json to_json(const RunConfig& rc) {
    return Json{{"max_iters", rc.max_iters},
                {"grad_tol", rc.grad_tol},
                {"divergence_radius", rc.divergence_radius},
                {"record_every", rc.record_every}};
}

Json to_json(const Box& box) {
    return Json{{"lo", vec_to_json(box.lo)}, {"hi", vec_to_json(box.hi)}};
}

Json make_trace_header(const std::string& objective, const Params& objective_params,
                       const Rule& rule, const BacktrackParams& p,
                       const RunConfig& rc, const Vec& x0, std::uint64_t seed,
                       const std::string& mode) {
    Json header;
    header["schema"] = kTraceSchema;
    header["objective"] = objective;
    header["objective_params"] = objective_params;
    header["rule"] = to_string(rule.kind);
    Json params = to_json(p);
    if (rule.kind == RuleKind::MomentumBt || rule.kind == RuleKind::NagBt)
        params["gamma"] = rule.gamma;
    header["params"] = params;
    header["run"] = to_json(rc);
    header["x0"] = vec_to_json(x0);
    header["seed"] = seed;
    if (mode.empty())
        header["mode"] = nullptr;
    else
        header["mode"] = mode;
    return header;
}

void write_trace_jsonl(std::ostream& os, const Trace& trace, const Json& header,
                       const std::string& terminal_class) {
    os << header.dump() << '\n';
    std::string line;
    for (const TraceRecord& r : trace.records) {
        line.clear();
        line += "{\"n\":";
        line += std::to_string(r.n);
        line += ",\"x\":[";
        for (Eigen::Index i = 0; i < r.x.size(); ++i) {
            if (i) line += ',';
            append_double(line, r.x[i]);
        }
        line += "],\"f\":";
        append_double(line, r.f);
        line += ",\"grad_norm\":";
        append_double(line, r.grad_norm);
        line += ",\"step\":";
        append_double(line, r.step_size);
        line += ",\"backtracks\":";
        line += std::to_string(r.backtracks);
        line += "}";
        os << line << '\n';
    }
    Json footer;
    footer["stop_reason"] = to_string(trace.stop_reason);
    footer["terminal_class"] = terminal_class;
    if (!trace.context.empty()) footer["context"] = trace.context;
    os << footer.dump() << '\n';
}

ParsedTrace read_trace_jsonl(std::istream& is) {
    ParsedTrace out;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ConfigError("trace: malformed JSON line");
        if (!have_header) {
            if (!j.contains("schema") || j["schema"] != kTraceSchema)
                throw ConfigError("trace: unknown schema version");
            out.header = std::move(j);
            have_header = true;
        } else if (j.contains("stop_reason")) {
            out.footer = std::move(j);
        } else {
            out.records.push_back(std::move(j));
        }
    }
    if (!have_header) throw ConfigError("trace: empty file");
    if (out.footer.is_null()) throw ConfigError("trace: missing footer line");
    return out;
}

Json sweep_report_to_json(const SweepReport& report, const std::vector<Basin>& basins,
                          double cluster_radius) {
    const SweepConfig& cfg = report.config;
    Json j;
    j["schema"] = kSweepSchema;
    j["objective"] = cfg.objective;
    j["objective_params"] = cfg.objective_params;
    j["rule"] = to_string(cfg.rule.kind);
    j["rule_gamma"] = cfg.rule.gamma;
    j["params"] = to_json(report.effective_params);
    j["random_params"] = cfg.random_params;
    j["init_box"] = to_json(cfg.init_box);
    j["n_runs"] = cfg.n_runs;
    j["seed"] = cfg.seed;
    j["run_config"] = to_json(cfg.run_config);
    j["counts"] = report.class_counts;
    j["saddle_hits"] = report.saddle_hits;
    j["unclassified"] = report.unclassified;
    j["diverged"] = report.diverged;
    j["nonconverged"] = report.nonconverged;
    j["step_collapse"] = report.step_collapsed;
    j["left_box"] = report.left_box;
    j["mean_iterations"] = report.mean_iterations;
    j["cluster_radius"] = cluster_radius;
    Json barr = Json::array();
    for (const Basin& b : basins) {
        barr.push_back(Json{{"representative", vec_to_json(b.representative)},
                            {"count", b.count},
                            {"mean_f", b.mean_f}});
    }
    j["basins"] = barr;
    return j;
}

std::string sweep_report_csv(const SweepReport& report, std::size_t n_basins) {
    const long nonconv = report.nonconverged + report.step_collapsed + report.left_box;
    std::string row = report.config.objective + "," + to_string(report.config.rule.kind) +
                      "," + std::to_string(report.config.n_runs) + "," +
                      std::to_string(report.saddle_hits) + "," +
                      std::to_string(report.diverged) + "," + std::to_string(nonconv) + "," +
                      std::to_string(n_basins) + "," + std::to_string(report.config.seed);
    return "objective,rule,n_runs,saddle_hits,diverged,nonconverged,basins,seed\n" + row +
           "\n";
}

Json smooth_rate_to_json(const SmoothRate& sr, const std::string& objective_name) {
    Json j;
    j["schema"] = kRateSchema;
    j["objective"] = objective_name;
    j["dim"] = sr.covering.box.dim();
    j["box"] = to_json(sr.covering.box);
    j["spacing"] = sr.covering.spacing;
    j["alpha"] = sr.alpha;
    j["covering_alpha"] = sr.covering.alpha;
    j["delta0"] = sr.delta0;
    j["mode"] = to_string(sr.mode);
    j["seed"] = sr.seed;
    j["max_cover"] = sr.max_cover;
    Json centers = Json::array();
    for (const Vec& z : sr.covering.centers) centers.push_back(vec_to_json(z));
    j["centers"] = centers;
    j["radii"] = sr.covering.radii;
    j["lipschitz"] = sr.covering.lipschitz;
    j["mj"] = sr.mj;
    return j;
}

SmoothRate smooth_rate_from_json(const Json& j) {
    if (!j.contains("schema") || j["schema"] != kRateSchema)
        throw ConfigError("smoothrate: unknown schema version");
    SmoothRate sr;
    sr.covering.box.lo = vec_from_json(j.at("box").at("lo"));
    sr.covering.box.hi = vec_from_json(j.at("box").at("hi"));
    sr.covering.spacing = j.at("spacing").get<double>();
    sr.covering.alpha = j.at("covering_alpha").get<double>();
    for (const Json& c : j.at("centers")) sr.covering.centers.push_back(vec_from_json(c));
    sr.covering.radii = j.at("radii").get<std::vector<double>>();
    sr.covering.lipschitz = j.at("lipschitz").get<std::vector<double>>();
    sr.mj = j.at("mj").get<std::vector<double>>();
    sr.delta0 = j.at("delta0").get<double>();
    sr.alpha = j.at("alpha").get<double>();
    sr.mode = rate_mode_from_string(j.at("mode").get<std::string>());
    sr.seed = j.at("seed").get<std::uint64_t>();
    sr.max_cover = j.at("max_cover").get<int>();
    if (sr.covering.centers.size() != sr.covering.radii.size() ||
        sr.covering.centers.size() != sr.covering.lipschitz.size() ||
        sr.covering.centers.size() != sr.mj.size())
        throw ConfigError("smoothrate: inconsistent array lengths");
    return sr;
}

} // namespace descent
