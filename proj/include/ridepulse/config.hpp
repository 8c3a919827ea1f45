#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ridepulse/chat_client.hpp"
#include "ridepulse/errors.hpp"
#include "ridepulse/ingest.hpp"
#include "ridepulse/sentiment.hpp"
#include "ridepulse/timeutil.hpp"

namespace ridepulse {

/// Everything a full pipeline run needs; flat key=value file with '#'
/// comments, every key overridable from the command line.
struct PipelineConfig {
    // inputs
    std::string input_path;
    InputFormat input_format = InputFormat::Jsonl;
    std::string lexicon_path;
    std::string exemplars_path;
    std::string stations_path;
    std::string keywords_path;  // optional
    std::string truth_path;     // optional; enables the evaluate stage
    std::string output_dir = "out";

    // sampling
    std::optional<std::size_t> sample_n;
    std::uint64_t seed = 42;

    // scoring
    RuleConfig rules;

    // classification
    bool classify_remote = false;
    int exemplars_per_category = 5;
    ClassifierClientConfig client;

    // aggregation
    double radius_m = 1609.34;
    bool multi_assign = false;
    std::optional<std::int64_t> date_start;
    std::optional<std::int64_t> date_end;
};

using ConfigKv = std::map<std::string, std::string>;

/// Parse the key=value file; unknown keys are reported by validation, not
/// here.
inline ConfigKv parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::file_unreadable, path);
    ConfigKv kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        // inline comments: a '#' preceded by whitespace
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (t[i] == '#' && is_ascii_space(t[i - 1])) {
                t = trim(t.substr(0, i));
                break;
            }
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(errc::config_invalid,
                        path + " line " + std::to_string(line_no) + ": expected key = value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

namespace config_detail {

inline bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
    if (v == "false" || v == "0" || v == "no") { out = false; return true; }
    return false;
}

} // namespace config_detail

/// Apply key=value pairs onto a config; collects a diagnostic per bad key
/// instead of stopping at the first.
inline void apply_config_kv(PipelineConfig& cfg, const ConfigKv& kv, std::vector<std::string>& problems) {
    auto num = [&](const std::string& key, const std::string& v, double& out) {
        if (!detail::parse_double(v, out))
            problems.push_back(key + ": not a number: '" + v + "'");
    };
    auto integer = [&](const std::string& key, const std::string& v, long long& out) {
        double d = 0;
        if (!detail::parse_double(v, d) || d != static_cast<long long>(d))
            problems.push_back(key + ": not an integer: '" + v + "'");
        else
            out = static_cast<long long>(d);
    };

    for (const auto& [key, value] : kv) {
        long long ll = 0;
        if (key == "input") cfg.input_path = value;
        else if (key == "input_format") {
            auto f = input_format_from_name(value);
            if (!f) problems.push_back("input_format: must be jsonl or csv, got '" + value + "'");
            else cfg.input_format = *f;
        }
        else if (key == "lexicon") cfg.lexicon_path = value;
        else if (key == "exemplars") cfg.exemplars_path = value;
        else if (key == "stations") cfg.stations_path = value;
        else if (key == "keywords") cfg.keywords_path = value;
        else if (key == "truth") cfg.truth_path = value;
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "sample_n") { integer(key, value, ll); if (ll > 0) cfg.sample_n = static_cast<std::size_t>(ll); else problems.push_back("sample_n: must be >= 1"); }
        else if (key == "seed") { integer(key, value, ll); cfg.seed = static_cast<std::uint64_t>(ll); }
        else if (key == "alpha") num(key, value, cfg.rules.alpha);
        else if (key == "booster_increment") num(key, value, cfg.rules.booster_increment);
        else if (key == "caps_scalar") num(key, value, cfg.rules.caps_scalar);
        else if (key == "negation_scalar") num(key, value, cfg.rules.negation_scalar);
        else if (key == "exclamation_step") num(key, value, cfg.rules.exclamation_step);
        else if (key == "exclamation_cap") { integer(key, value, ll); cfg.rules.exclamation_cap = static_cast<int>(ll); }
        else if (key == "question_mark_step") num(key, value, cfg.rules.question_mark_steps.first);
        else if (key == "question_mark_flat") num(key, value, cfg.rules.question_mark_steps.second);
        else if (key == "negation_window") { integer(key, value, ll); cfg.rules.negation_window = static_cast<int>(ll); }
        else if (key == "distance_damping") {
            std::vector<double> damping;
            std::stringstream ss(value);
            std::string part;
            bool ok = true;
            while (std::getline(ss, part, ',')) {
                double d = 0;
                if (!detail::parse_double(trim(part), d)) { ok = false; break; }
                damping.push_back(d);
            }
            if (!ok || damping.empty()) problems.push_back("distance_damping: expected comma-separated numbers");
            else cfg.rules.distance_damping = std::move(damping);
        }
        else if (key == "contrast_before") num(key, value, cfg.rules.contrast_weights.first);
        else if (key == "contrast_after") num(key, value, cfg.rules.contrast_weights.second);
        else if (key == "classify_mode") {
            if (value == "remote") cfg.classify_remote = true;
            else if (value == "local") cfg.classify_remote = false;
            else problems.push_back("classify_mode: must be local or remote, got '" + value + "'");
        }
        else if (key == "k") { integer(key, value, ll); cfg.exemplars_per_category = static_cast<int>(ll); }
        else if (key == "endpoint_url") cfg.client.endpoint_url = value;
        else if (key == "model_name") cfg.client.model_name = value;
        else if (key == "auth_token_env") cfg.client.auth_token_env_var = value;
        else if (key == "max_retries") { integer(key, value, ll); cfg.client.max_retries = static_cast<int>(ll); }
        else if (key == "timeout_ms") { integer(key, value, ll); cfg.client.request_timeout_ms = static_cast<int>(ll); }
        else if (key == "max_concurrent") { integer(key, value, ll); cfg.client.max_concurrent_requests = static_cast<int>(ll); }
        else if (key == "temperature") num(key, value, cfg.client.temperature);
        else if (key == "retry_backoff_ms") { integer(key, value, ll); cfg.client.retry_backoff_ms = static_cast<int>(ll); }
        else if (key == "radius_m") num(key, value, cfg.radius_m);
        else if (key == "multi_assign") {
            bool b = false;
            if (!config_detail::parse_bool(value, b)) problems.push_back("multi_assign: must be true or false");
            else cfg.multi_assign = b;
        }
        else if (key == "date_start" || key == "date_end") {
            try {
                auto ts = parse_iso8601_utc(value);
                (key == "date_start" ? cfg.date_start : cfg.date_end) = ts;
            } catch (const Error&) {
                problems.push_back(key + ": expected ISO-8601 UTC, got '" + value + "'");
            }
        }
        else problems.push_back("unknown key '" + key + "'");
    }
}

/// Cross-checks every range against the module contracts; reports every
/// problem, not just the first.
inline std::vector<std::string> validate_pipeline_config(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    std::vector<std::string> problems;

    auto must_exist = [&](const std::string& what, const std::string& path, bool required) {
        if (path.empty()) {
            if (required) problems.push_back(what + ": path not set");
            return;
        }
        if (!fs::exists(path)) problems.push_back(what + ": file not found: " + path);
    };
    must_exist("input", cfg.input_path, true);
    must_exist("lexicon", cfg.lexicon_path, true);
    must_exist("exemplars", cfg.exemplars_path, true);
    must_exist("stations", cfg.stations_path, true);
    must_exist("keywords", cfg.keywords_path, false);
    must_exist("truth", cfg.truth_path, false);

    try {
        cfg.rules.validate();
    } catch (const Error& e) {
        problems.push_back(e.what());
    }
    if (cfg.exemplars_per_category < kMinExemplarsPerCategory ||
        cfg.exemplars_per_category > kMaxExemplarsPerCategory)
        problems.push_back("k: exemplars per category must be in [1, 10], got " +
                           std::to_string(cfg.exemplars_per_category));
    if (cfg.radius_m <= 0.0) problems.push_back("radius_m: must be > 0");
    if (cfg.classify_remote) {
        if (cfg.client.endpoint_url.empty())
            problems.push_back("endpoint_url: required in remote mode");
        try {
            cfg.client.validate();
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
    }
    if (cfg.date_start && cfg.date_end && *cfg.date_end < *cfg.date_start)
        problems.push_back("date_end is before date_start");
    return problems;
}

/// Load + apply + validate; throws ConfigInvalid carrying every diagnostic.
inline PipelineConfig validate_config(const std::string& path) {
    PipelineConfig cfg;
    std::vector<std::string> problems;
    apply_config_kv(cfg, parse_config_file(path), problems);
    auto more = validate_pipeline_config(cfg);
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty()) {
        std::string joined;
        for (const auto& p : problems) {
            joined += "\n  - ";
            joined += p;
        }
        throw Error(errc::config_invalid, path + joined);
    }
    return cfg;
}

/// Canonical snapshot of the effective configuration; digested into every
/// stage output's metadata.
inline ConfigKv config_snapshot(const PipelineConfig& cfg) {
    ConfigKv kv;
    kv["input"] = cfg.input_path;
    kv["input_format"] = cfg.input_format == InputFormat::Jsonl ? "jsonl" : "csv";
    kv["lexicon"] = cfg.lexicon_path;
    kv["exemplars"] = cfg.exemplars_path;
    kv["stations"] = cfg.stations_path;
    kv["keywords"] = cfg.keywords_path;
    kv["truth"] = cfg.truth_path;
    kv["output_dir"] = cfg.output_dir;
    if (cfg.sample_n) kv["sample_n"] = std::to_string(*cfg.sample_n);
    kv["seed"] = std::to_string(cfg.seed);
    auto fmt = [](double d) {
        std::ostringstream ss;
        ss.precision(17);
        ss << d;
        return ss.str();
    };
    kv["alpha"] = fmt(cfg.rules.alpha);
    kv["booster_increment"] = fmt(cfg.rules.booster_increment);
    kv["caps_scalar"] = fmt(cfg.rules.caps_scalar);
    kv["negation_scalar"] = fmt(cfg.rules.negation_scalar);
    kv["exclamation_step"] = fmt(cfg.rules.exclamation_step);
    kv["exclamation_cap"] = std::to_string(cfg.rules.exclamation_cap);
    kv["question_mark_step"] = fmt(cfg.rules.question_mark_steps.first);
    kv["question_mark_flat"] = fmt(cfg.rules.question_mark_steps.second);
    kv["negation_window"] = std::to_string(cfg.rules.negation_window);
    {
        std::string damping;
        for (double d : cfg.rules.distance_damping) {
            if (!damping.empty()) damping += ",";
            damping += fmt(d);
        }
        kv["distance_damping"] = damping;
    }
    kv["contrast_before"] = fmt(cfg.rules.contrast_weights.first);
    kv["contrast_after"] = fmt(cfg.rules.contrast_weights.second);
    kv["classify_mode"] = cfg.classify_remote ? "remote" : "local";
    kv["k"] = std::to_string(cfg.exemplars_per_category);
    kv["endpoint_url"] = cfg.client.endpoint_url;
    kv["model_name"] = cfg.client.model_name;
    kv["auth_token_env"] = cfg.client.auth_token_env_var;
    kv["max_retries"] = std::to_string(cfg.client.max_retries);
    kv["timeout_ms"] = std::to_string(cfg.client.request_timeout_ms);
    kv["max_concurrent"] = std::to_string(cfg.client.max_concurrent_requests);
    kv["temperature"] = fmt(cfg.client.temperature);
    kv["retry_backoff_ms"] = std::to_string(cfg.client.retry_backoff_ms);
    kv["radius_m"] = fmt(cfg.radius_m);
    kv["multi_assign"] = cfg.multi_assign ? "true" : "false";
    if (cfg.date_start) kv["date_start"] = format_iso8601_utc(*cfg.date_start);
    if (cfg.date_end) kv["date_end"] = format_iso8601_utc(*cfg.date_end);
    return kv;
}

/// Digest over the snapshot minus output placement, so two runs of the same
/// analysis into different directories share a digest.
inline std::string config_digest(const PipelineConfig& cfg) {
    std::string blob;
    for (const auto& [k, v] : config_snapshot(cfg)) {
        if (k == "output_dir") continue;
        blob += k;
        blob += '=';
        blob += v;
        blob += '\n';
    }
    return fnv1a64_hex(blob);
}

} // namespace ridepulse
