/// @file config.hpp
/// @brief Flat `key = value` experiment configuration with [section] headers.
///
/// Grammar: blank lines and #/; comments ignored; a [section] header prefixes
/// subsequent keys as "section.key"; values are scalars or comma-separated
/// real lists. Parsing is schema-checked: unknown keys, duplicate keys, type
/// mismatches and missing mandatory keys are all collected (not just the
/// first). The seed is mandatory for stochastic experiments.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace geoflow::config {

enum class ValueType { integer, real, text, boolean, real_list };

struct KeySpec {
    ValueType type;
    bool required = false;
    std::string default_value;  // used when not required
};

struct Schema {
    std::string experiment;
    bool stochastic = false;  // seed mandatory
    std::map<std::string, KeySpec> keys;
};

struct ParseError {
    int line = 0;
    std::string message;
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string out_dir = "out";
    std::map<std::string, std::string> values;  // schema keys, raw text

    bool operator==(const ExperimentConfig& o) const {
        return experiment == o.experiment && seed == o.seed && has_seed == o.has_seed &&
               out_dir == o.out_dir && values == o.values;
    }

    long long get_int(const std::string& key) const { return std::stoll(values.at(key)); }
    double get_real(const std::string& key) const { return std::stod(values.at(key)); }
    std::string get_text(const std::string& key) const { return values.at(key); }
    bool get_bool(const std::string& key) const { return values.at(key) == "true"; }
    std::vector<double> get_real_list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(values.at(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        return out;
    }
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ParseError> errors;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline bool check_type(const std::string& value, ValueType t) {
    std::size_t pos = 0;
    try {
        switch (t) {
            case ValueType::integer:
                (void)std::stoll(value, &pos);
                return pos == value.size();
            case ValueType::real:
                (void)std::stod(value, &pos);
                return pos == value.size();
            case ValueType::text:
                return !value.empty();
            case ValueType::boolean:
                return value == "true" || value == "false";
            case ValueType::real_list: {
                std::stringstream ss(value);
                std::string item;
                int count = 0;
                while (std::getline(ss, item, ',')) {
                    (void)std::stod(trim(item), &pos);
                    if (pos != trim(item).size()) return false;
                    ++count;
                }
                return count > 0;
            }
        }
    } catch (...) {
        return false;
    }
    return false;
}

}  // namespace detail

/// parse against a schema lookup (experiment name -> schema); reports every
/// error found rather than stopping at the first
template <typename SchemaLookup>
inline ParseResult parse_config(const std::string& text, const SchemaLookup& schema_for) {
    ParseResult result;
    ExperimentConfig cfg;
    std::map<std::string, int> seen;  // key -> first line
    std::string section;
    std::vector<std::tuple<int, std::string, std::string>> entries;  // line, key, value

    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                result.errors.push_back({lineno, "malformed section header: " + line});
                continue;
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back({lineno, "expected key = value: " + line});
            continue;
        }
        std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            result.errors.push_back({lineno, "empty key or value"});
            continue;
        }
        if (!section.empty()) key = section + "." + key;
        if (seen.count(key)) {
            result.errors.push_back({lineno, "duplicate key '" + key + "' (first at line " +
                                                 std::to_string(seen[key]) + ")"});
            continue;
        }
        seen[key] = lineno;
        entries.emplace_back(lineno, key, value);
    }

    // experiment name first: everything else is schema driven
    const Schema* schema = nullptr;
    for (const auto& [ln, key, value] : entries)
        if (key == "experiment") {
            cfg.experiment = value;
            schema = schema_for(value);
            if (!schema)
                result.errors.push_back({ln, "unknown experiment '" + value + "'"});
        }
    if (cfg.experiment.empty())
        result.errors.push_back({0, "missing mandatory key 'experiment'"});

    for (const auto& [ln, key, value] : entries) {
        if (key == "experiment") continue;
        if (key == "seed") {
            if (!detail::check_type(value, ValueType::integer)) {
                result.errors.push_back({ln, "seed must be an integer"});
            } else {
                cfg.seed = static_cast<std::uint64_t>(std::stoll(value));
                cfg.has_seed = true;
            }
            continue;
        }
        if (key == "out") {
            cfg.out_dir = value;
            continue;
        }
        if (!schema) continue;  // already reported
        const auto it = schema->keys.find(key);
        if (it == schema->keys.end()) {
            result.errors.push_back({ln, "unknown key '" + key + "'"});
            continue;
        }
        if (!detail::check_type(value, it->second.type)) {
            result.errors.push_back({ln, "type mismatch for '" + key + "': " + value});
            continue;
        }
        cfg.values[key] = value;
    }

    if (schema) {
        for (const auto& [key, spec] : schema->keys) {
            if (cfg.values.count(key)) continue;
            if (spec.required)
                result.errors.push_back({0, "missing mandatory key '" + key + "'"});
            else if (!spec.default_value.empty())
                cfg.values[key] = spec.default_value;
        }
        if (schema->stochastic && !cfg.has_seed)
            result.errors.push_back({0, "seed is mandatory for stochastic experiments"});
    }

    if (result.errors.empty()) result.config = cfg;
    return result;
}

/// canonical serialization; parse(serialize(c)) == c
inline std::string serialize(const ExperimentConfig& cfg) {
    std::string out;
    out += "experiment = " + cfg.experiment + "\n";
    if (cfg.has_seed) out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "out = " + cfg.out_dir + "\n";
    std::string section;
    for (const auto& [key, value] : cfg.values) {  // std::map: sorted, stable
        const auto dot = key.find('.');
        const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sec != section) {
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += name + " = " + value + "\n";
    }
    return out;
}

}  // namespace geoflow::config
