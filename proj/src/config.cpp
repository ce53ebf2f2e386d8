#include "descent/config.hpp"

#include <fstream>

namespace descent {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

} // namespace

KvConfig KvConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    KvConfig cfg;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " of '" + path + "' is not key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config: empty key at line " + std::to_string(lineno));
        cfg.kv_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

void KvConfig::set_pair(const std::string& pair) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("config: override '" + pair + "' is not key=value");
    kv_[trim(pair.substr(0, eq))] = trim(pair.substr(eq + 1));
}

std::string KvConfig::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double KvConfig::get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
}

double KvConfig::get_double(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : parse_double(key, it->second);
}

long KvConfig::get_long(const std::string& key, long dflt) const {
    const double v = get_double(key, double(dflt));
    const long l = static_cast<long>(v);
    if (double(l) != v) throw ConfigError("config: key '" + key + "' must be an integer");
    return l;
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' must be a non-negative integer");
    }
}

bool KvConfig::get_bool(const std::string& key, bool dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config: key '" + key + "' must be true/false");
}

Vec KvConfig::get_vec(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const auto comma = raw.find(',', pos);
        const std::string tok = trim(comma == std::string::npos ? raw.substr(pos)
                                                                : raw.substr(pos, comma - pos));
        if (tok.empty()) throw ConfigError("config: key '" + key + "' has an empty component");
        vals.push_back(parse_double(key, tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    Vec v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return v;
}

Params KvConfig::get_params(const std::string& prefix) const {
    Params out;
    const std::string want = prefix + ".";
    for (const auto& [key, value] : kv_) {
        if (key.rfind(want, 0) == 0)
            out[key.substr(want.size())] = parse_double(key, value);
    }
    return out;
}

Objective objective_from(const KvConfig& cfg) {
    return corpus_get(cfg.get_string("objective.name"), cfg.get_params("objective.params"));
}

BacktrackParams backtrack_params_from(const KvConfig& cfg) {
    BacktrackParams p;
    p.delta0 = cfg.get_double("rule.delta0", p.delta0);
    p.alpha = cfg.get_double("rule.alpha", p.alpha);
    p.beta = cfg.get_double("rule.beta", p.beta);
    p.max_halvings = static_cast<int>(cfg.get_long("rule.max_halvings", p.max_halvings));
    p.validate();
    return p;
}

RunConfig run_config_from(const KvConfig& cfg) {
    RunConfig rc;
    rc.max_iters = cfg.get_long("run.max_iters", rc.max_iters);
    rc.grad_tol = cfg.get_double("run.grad_tol", rc.grad_tol);
    rc.divergence_radius = cfg.get_double("run.divergence_radius", rc.divergence_radius);
    rc.record_every = cfg.get_long("run.record_every", rc.record_every);
    rc.validate();
    return rc;
}

Box box_from(const KvConfig& cfg, const std::string& prefix) {
    Box box;
    box.lo = cfg.get_vec(prefix + ".lo");
    box.hi = cfg.get_vec(prefix + ".hi");
    if (box.lo.size() != box.hi.size())
        throw ConfigError("config: " + prefix + ".lo and .hi differ in dimension");
    return box;
}

} // namespace descent
