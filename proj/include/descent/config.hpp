#pragma once

#include <map>
#include <string>

#include "descent/corpus.hpp"
#include "descent/smoothrate.hpp"
#include "descent/steppers.hpp"

namespace descent {

/// Flat key=value configuration with dotted section prefixes
/// (rule.alpha=0.5). '#' starts a comment; blank lines are ignored.
/// Later set() calls (CLI flags, overrides) win over file values.
class KvConfig {
public:
    static KvConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    /// Parses "key=value" and sets it.
    void set_pair(const std::string& pair);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key) const; // throws if missing
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    long get_long(const std::string& key, long dflt) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    Vec get_vec(const std::string& key) const; // comma-separated scalars

    /// All keys "<prefix>.<name>" as a name -> double map.
    Params get_params(const std::string& prefix) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

// Shared builders for the config sections the CLI and tests use.
Objective objective_from(const KvConfig& cfg);           // objective.name, objective.params.*
BacktrackParams backtrack_params_from(const KvConfig& cfg); // rule.delta0/alpha/beta/max_halvings
RunConfig run_config_from(const KvConfig& cfg);          // run.*
Box box_from(const KvConfig& cfg, const std::string& prefix); // <prefix>.lo, <prefix>.hi

} // namespace descent
