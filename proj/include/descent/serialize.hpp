#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "descent/experiments.hpp"
#include "descent/smoothrate.hpp"
#include "descent/steppers.hpp"

namespace descent {

using Json = nlohmann::json;

/// %.17g — round-trip exact for doubles, so traces diff and replay
/// bit-for-bit. Non-finite values become JSON null.
std::string format_double(double v);

Json to_json(const BacktrackParams& p);
Json to_json(const RunConfig& rc);
Json to_json(const Box& box);

/// Header for a trace file's first JSON line. mode is the smooth-rate mode
/// for continuous runs, empty (-> null) otherwise; gamma is recorded for
/// the momentum/NAG rules so traces replay from their headers alone.
Json make_trace_header(const std::string& objective, const Params& objective_params,
                       const Rule& rule, const BacktrackParams& p,
                       const RunConfig& rc, const Vec& x0, std::uint64_t seed,
                       const std::string& mode);

/// JSON-lines: header, one line per record, then a footer with the stop
/// reason and terminal class.
void write_trace_jsonl(std::ostream& os, const Trace& trace, const Json& header,
                       const std::string& terminal_class);

struct ParsedTrace {
    Json header;
    std::vector<Json> records;
    Json footer;
};

/// Parses a trace file; throws ConfigError on malformed input or an
/// unknown schema version.
ParsedTrace read_trace_jsonl(std::istream& is);

Json sweep_report_to_json(const SweepReport& report, const std::vector<Basin>& basins,
                          double cluster_radius);

/// Header row plus one data row:
/// objective,rule,n_runs,saddle_hits,diverged,nonconverged,basins,seed
std::string sweep_report_csv(const SweepReport& report, std::size_t n_basins);

Json smooth_rate_to_json(const SmoothRate& sr, const std::string& objective_name);

/// Rebuilds a SmoothRate from its serialized form; rejects unknown schema
/// versions.
SmoothRate smooth_rate_from_json(const Json& j);

} // namespace descent
