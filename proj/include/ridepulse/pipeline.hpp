#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ridepulse/aggregate.hpp"
#include "ridepulse/batch.hpp"
#include "ridepulse/chat_client.hpp"
#include "ridepulse/config.hpp"
#include "ridepulse/evaluate.hpp"
#include "ridepulse/io.hpp"
#include "ridepulse/synth.hpp"
#include "ridepulse/version.hpp"

namespace ridepulse {

struct RunManifest {
    ConfigKv config;                              // effective snapshot
    std::string config_digest;
    std::string lexicon_digest;
    std::string prompt_template_version;
    std::map<std::string, std::size_t> stage_counts;  // records out of each stage
    std::map<std::string, double> timings_ms;         // excluded from determinism checks
    std::string tool_version;
};

inline nlohmann::json run_manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["config"] = m.config;
    j["config_digest"] = m.config_digest;
    j["lexicon_digest"] = m.lexicon_digest;
    j["prompt_template_version"] = m.prompt_template_version;
    j["stage_counts"] = m.stage_counts;
    j["timings_ms"] = m.timings_ms;
    j["tool_version"] = m.tool_version;
    return j;
}

namespace pipeline_detail {

inline void write_stage_meta(const std::string& data_path, const std::string& stage,
                             const std::string& digest, std::size_t records) {
    nlohmann::json j;
    j["stage"] = stage;
    j["config_digest"] = digest;
    j["records"] = records;
    write_json_file(j, data_path + ".meta.json");
}

// per-stage completion markers keyed by the config digest; a digest change
// invalidates every stage
class RunState {
public:
    explicit RunState(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_);
        if (in) {
            nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
            if (j.is_object()) state_ = j;
        }
        if (!state_.is_object()) state_ = nlohmann::json::object();
    }

    std::optional<std::size_t> completed(const std::string& stage, const std::string& digest) const {
        auto it = state_.find(stage);
        if (it == state_.end() || !it->is_object()) return std::nullopt;
        if (it->value("digest", std::string()) != digest) return std::nullopt;
        return it->value("records", static_cast<std::size_t>(0));
    }

    void mark(const std::string& stage, const std::string& digest, std::size_t records) {
        state_[stage] = {{"digest", digest}, {"records", records}};
        write_json_file(state_, path_);
    }

private:
    std::string path_;
    nlohmann::json state_;
};

} // namespace pipeline_detail

struct PipelineOutputs {
    std::string corpus_path;
    std::string ingest_manifest_path;
    std::string scored_path;
    std::string labeled_path;
    std::string audit_log_path;
    std::string eval_report_path;  // empty when no truth file
    std::string geojson_path;
    std::string stations_csv_path;
    std::string monthly_csv_path;
    std::string run_manifest_path;
};

inline PipelineOutputs pipeline_output_paths(const std::string& output_dir) {
    PipelineOutputs o;
    o.corpus_path = output_dir + "/corpus.jsonl";
    o.ingest_manifest_path = output_dir + "/ingest_manifest.json";
    o.scored_path = output_dir + "/scored.jsonl";
    o.labeled_path = output_dir + "/labeled.jsonl";
    o.audit_log_path = output_dir + "/audit_log.jsonl";
    o.eval_report_path = output_dir + "/eval_report.json";
    o.geojson_path = output_dir + "/stations.geojson";
    o.stations_csv_path = output_dir + "/stations.csv";
    o.monthly_csv_path = output_dir + "/monthly.csv";
    o.run_manifest_path = output_dir + "/run_manifest.json";
    return o;
}

using ProgressFn = std::function<void(const std::string& stage, std::size_t records)>;

/// Fixed stage order: ingest, score, classify, evaluate (when truth is
/// configured), aggregate. Each stage's output is persisted before the next
/// begins; completed stages are skipped when rerun with an unchanged config.
/// The manifest is written last.
inline RunManifest run_pipeline(const PipelineConfig& cfg, ChatTransport* transport = nullptr,
                                const ProgressFn& progress = {}) {
    namespace fs = std::filesystem;
    {
        auto problems = validate_pipeline_config(cfg);
        if (!problems.empty()) {
            std::string joined;
            for (const auto& p : problems) {
                joined += "\n  - ";
                joined += p;
            }
            throw Error(errc::config_invalid, joined);
        }
    }
    fs::create_directories(cfg.output_dir);

    const std::string digest = config_digest(cfg);
    const PipelineOutputs paths = pipeline_output_paths(cfg.output_dir);
    pipeline_detail::RunState state(cfg.output_dir + "/run_state.json");

    RunManifest manifest;
    manifest.config = config_snapshot(cfg);
    manifest.config_digest = digest;
    manifest.prompt_template_version = kPromptTemplateVersion;
    manifest.tool_version = kToolVersion;

    auto timed = [&](const std::string& stage, auto&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        std::size_t records = 0;
        try {
            records = body();
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(errc::config_invalid, "stage " + stage + ": " + e.what());
        }
        const auto t1 = std::chrono::steady_clock::now();
        manifest.timings_ms[stage] =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
        manifest.stage_counts[stage] = records;
        state.mark(stage, digest, records);
        if (progress) progress(stage, records);
    };

    auto cached = [&](const std::string& stage, const std::string& output) -> bool {
        auto records = state.completed(stage, digest);
        if (!records || !fs::exists(output)) return false;
        manifest.stage_counts[stage] = *records;
        if (progress) progress(stage + " (cached)", *records);
        return true;
    };

    // ingest
    if (!cached("ingest", paths.corpus_path)) {
        timed("ingest", [&] {
            std::vector<Post> raw = load_posts_strict(cfg.input_path, cfg.input_format);
            IngestOptions opt;
            if (!cfg.keywords_path.empty()) opt.keywords = load_keywords(cfg.keywords_path);
            opt.sample_n = cfg.sample_n;
            opt.seed = cfg.seed;
            auto [posts, m] = ingest_posts(std::move(raw), opt, cfg.input_path);
            write_posts_jsonl(posts, paths.corpus_path);
            pipeline_detail::write_stage_meta(paths.corpus_path, "ingest", digest, posts.size());
            write_json_file(manifest_to_json(m), paths.ingest_manifest_path);
            return posts.size();
        });
    }

    const Lexicon lexicon = load_lexicon(cfg.lexicon_path);
    manifest.lexicon_digest = lexicon.source_digest;

    // score
    if (!cached("score", paths.scored_path)) {
        timed("score", [&] {
            std::vector<Post> posts = load_posts_strict(paths.corpus_path, InputFormat::Jsonl);
            std::vector<ScoredPost> scored(posts.size());
            batch_detail::parallel_for(posts.size(), std::thread::hardware_concurrency(),
                                       [&](std::size_t i) {
                                           scored[i].sentiment =
                                               analyze(posts[i].text, lexicon, cfg.rules);
                                           scored[i].post = std::move(posts[i]);
                                       });
            write_scored_jsonl(scored, paths.scored_path);
            pipeline_detail::write_stage_meta(paths.scored_path, "score", digest, scored.size());
            return scored.size();
        });
    }

    // classify
    if (!cached("classify", paths.labeled_path)) {
        timed("classify", [&] {
            std::vector<ScoredPost> scored = load_scored_jsonl(paths.scored_path);
            std::vector<FewShotExemplar> pool = load_exemplars(cfg.exemplars_path);
            BatchResult batch = classify_batch(
                scored, cfg.classify_remote ? ClassifyMode::Remote : ClassifyMode::Local, pool,
                cfg.exemplars_per_category, transport, &cfg.client);
            write_labeled_jsonl(batch.labeled, paths.labeled_path);
            pipeline_detail::write_stage_meta(paths.labeled_path, "classify", digest,
                                              batch.labeled.size());
            if (cfg.classify_remote) write_audit_log(batch.audit, paths.audit_log_path);
            return batch.labeled.size();
        });
    }

    // evaluate (optional)
    if (!cfg.truth_path.empty()) {
        if (!cached("evaluate", paths.eval_report_path)) {
            timed("evaluate", [&] {
                std::vector<LabeledPost> labeled = load_labeled_jsonl(paths.labeled_path);
                std::vector<TruthRecord> truth = load_truth_jsonl(cfg.truth_path);
                LabelSet preds, gold;
                for (const auto& lp : labeled)
                    if (lp.category) preds.emplace_back(lp.post.id, *lp.category);
                std::unordered_set<std::string> pred_ids;
                for (const auto& [id, c] : preds) pred_ids.insert(id);
                for (const auto& t : truth)
                    if (pred_ids.count(t.id)) gold.emplace_back(t.id, t.category);
                EvalReport report = evaluate(preds, gold);
                nlohmann::json j = eval_report_to_json(report);
                j["stage"] = "evaluate";
                j["config_digest"] = digest;
                write_json_file(j, paths.eval_report_path);
                return preds.size();
            });
        }
    }

    // aggregate
    if (!cached("aggregate", paths.geojson_path)) {
        timed("aggregate", [&] {
            std::vector<LabeledPost> labeled = load_labeled_jsonl(paths.labeled_path);
            std::vector<Station> stations = load_stations(cfg.stations_path);

            AggregateOptions opt;
            opt.radius_m = cfg.radius_m;
            opt.multi_assign = cfg.multi_assign;
            auto station_aggs = aggregate_stations(labeled, stations, opt);
            nlohmann::json geo = station_aggregates_to_geojson(station_aggs, stations);
            geo["stage"] = "aggregate";
            geo["config_digest"] = digest;
            write_json_file(geo, paths.geojson_path);
            {
                std::ofstream out(paths.stations_csv_path, std::ios::binary);
                out << station_aggregates_to_csv(station_aggs, stations);
            }
            pipeline_detail::write_stage_meta(paths.stations_csv_path, "aggregate", digest,
                                              station_aggs.size());

            std::vector<ScoredPost> scored;
            scored.reserve(labeled.size());
            for (const auto& lp : labeled) scored.push_back({lp.post, lp.sentiment});
            std::optional<std::pair<std::int64_t, std::int64_t>> range;
            if (cfg.date_start && cfg.date_end) range = {{*cfg.date_start, *cfg.date_end}};
            auto monthly = aggregate_monthly(scored, range);
            {
                std::ofstream out(paths.monthly_csv_path, std::ios::binary);
                out << monthly_aggregates_to_csv(monthly);
            }
            pipeline_detail::write_stage_meta(paths.monthly_csv_path, "aggregate", digest,
                                              monthly.size());
            return labeled.size();
        });
    }

    write_json_file(run_manifest_to_json(manifest), paths.run_manifest_path);
    return manifest;
}

} // namespace ridepulse
