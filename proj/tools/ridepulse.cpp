// Command-line front end for the batch pipeline.

#include <cstdio>
#include <exception>
#include <unordered_set>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ridepulse/aggregate.hpp"
#include "ridepulse/batch.hpp"
#include "ridepulse/config.hpp"
#include "ridepulse/evaluate.hpp"
#include "ridepulse/http_transport.hpp"
#include "ridepulse/io.hpp"
#include "ridepulse/pipeline.hpp"
#include "ridepulse/synth.hpp"
#include "ridepulse/version.hpp"

namespace rp = ridepulse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitStageFailure = 2;

int run_ingest(const std::string& in, const std::string& format_name, const std::string& keywords,
               std::optional<std::size_t> sample_n, std::uint64_t seed, const std::string& out,
               const std::string& manifest_path) {
    auto format = rp::input_format_from_name(format_name);
    if (!format) {
        std::cerr << "error: --format must be jsonl or csv\n";
        return kExitValidation;
    }
    rp::LoadResult loaded = rp::load_posts(in, *format);
    if (!loaded.diagnostics.empty()) {
        for (const auto& d : loaded.diagnostics)
            std::cerr << in << ":" << d.line << ": " << rp::errc_name(d.code) << ": " << d.message
                      << "\n";
        return kExitValidation;
    }
    rp::IngestOptions opt;
    if (!keywords.empty()) opt.keywords = rp::load_keywords(keywords);
    opt.sample_n = sample_n;
    opt.seed = seed;
    auto [posts, manifest] = rp::ingest_posts(std::move(loaded.posts), opt, in);
    rp::write_posts_jsonl(posts, out);
    if (!manifest_path.empty()) rp::write_json_file(rp::manifest_to_json(manifest), manifest_path);
    std::cout << "ingested " << manifest.raw_count << " -> " << manifest.post_count
              << " posts (duplicates " << manifest.duplicates_removed << ", link spans "
              << manifest.links_stripped << ")\n";
    return kExitOk;
}

int run_score(const std::string& in, const std::string& lexicon_path, double alpha,
              const std::string& out) {
    rp::Lexicon lexicon = rp::load_lexicon(lexicon_path);
    rp::RuleConfig rules;
    rules.alpha = alpha;
    rules.validate();
    std::vector<rp::Post> posts = rp::load_posts_strict(in, rp::InputFormat::Jsonl);
    std::vector<rp::ScoredPost> scored(posts.size());
    rp::batch_detail::parallel_for(posts.size(), std::thread::hardware_concurrency(),
                                   [&](std::size_t i) {
                                       scored[i].sentiment = rp::analyze(posts[i].text, lexicon, rules);
                                       scored[i].post = std::move(posts[i]);
                                   });
    rp::write_scored_jsonl(scored, out);
    std::cout << "scored " << scored.size() << " posts (lexicon " << lexicon.entry_count
              << " entries, digest " << lexicon.source_digest << ")\n";
    return kExitOk;
}

int run_classify(const std::string& in, const std::string& mode, const std::string& exemplars_path,
                 int k, const std::string& out, const std::string& audit_path,
                 const rp::ClassifierClientConfig& client_cfg) {
    std::vector<rp::ScoredPost> scored = rp::load_scored_jsonl(in);
    std::vector<rp::FewShotExemplar> pool = rp::load_exemplars(exemplars_path);

    rp::BatchResult batch;
    if (mode == "remote") {
        rp::HttpChatTransport transport(client_cfg);
        batch = rp::classify_batch(scored, rp::ClassifyMode::Remote, pool, k, &transport,
                                   &client_cfg);
        if (!audit_path.empty()) rp::write_audit_log(batch.audit, audit_path);
    } else if (mode == "local") {
        batch = rp::classify_batch(scored, rp::ClassifyMode::Local, pool, k);
    } else {
        std::cerr << "error: --mode must be remote or local\n";
        return kExitValidation;
    }
    rp::write_labeled_jsonl(batch.labeled, out);
    std::cout << "classified " << batch.labeled.size() << " posts";
    for (const auto& [name, count] : batch.histogram) std::cout << "  " << name << "=" << count;
    std::cout << "\n";
    if (!batch.errors.empty()) {
        for (const auto& e : batch.errors)
            std::cerr << "item " << e.post_id << ": " << e.message << "\n";
        std::cerr << batch.errors.size() << " item(s) left Unlabeled\n";
    }
    return kExitOk;
}

int run_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& out) {
    auto load_labels = [](const std::string& path) {
        rp::LabelSet labels;
        std::ifstream in(path, std::ios::binary);
        if (!in) throw rp::Error(rp::errc::file_unreadable, path);
        std::string line;
        while (std::getline(in, line)) {
            if (rp::trim(line).empty()) continue;
            auto j = nlohmann::json::parse(line);
            const std::string cat_name = j.at("category").get<std::string>();
            if (cat_name == "Unlabeled") continue;
            auto cat = rp::category_from_name(cat_name);
            if (!cat) throw rp::Error(rp::errc::malformed_record, "bad category " + cat_name);
            labels.emplace_back(j.at("id").get<std::string>(), *cat);
        }
        return labels;
    };
    rp::LabelSet preds = load_labels(pred_path);
    rp::LabelSet truth = load_labels(truth_path);
    // truth may cover a superset (pre-sampling); evaluate the intersection
    std::unordered_set<std::string> pred_ids;
    for (const auto& [id, cat] : preds) pred_ids.insert(id);
    rp::LabelSet truth_used;
    for (const auto& row : truth)
        if (pred_ids.count(row.first)) truth_used.push_back(row);
    if (truth_used.size() != truth.size())
        std::cerr << (truth.size() - truth_used.size())
                  << " truth row(s) without predictions were ignored\n";
    rp::EvalReport report = rp::evaluate(preds, truth_used);
    if (!out.empty()) rp::write_json_file(rp::eval_report_to_json(report), out);

    std::printf("%-22s %10s %10s %10s\n", "category", "precision", "recall", "f1");
    for (const auto& [cat, m] : report.per_category) {
        std::printf("%-22s %10.4f %10.4f %10.4f%s\n", rp::category_name(cat), m.precision.value,
                    m.recall.value, m.f1,
                    (!m.precision.defined || !m.recall.defined) ? "  (degenerate)" : "");
    }
    std::printf("%-22s %10.4f %10.4f %10.4f\n", "macro", report.macro.precision,
                report.macro.recall, report.macro.f1);
    std::printf("%-22s %10.4f %10.4f %10.4f\n", "micro", report.micro.precision,
                report.micro.recall, report.micro.f1);
    return kExitOk;
}

int run_aggregate(const std::string& in, const std::string& stations_path, double radius_m,
                  bool multi_assign, const std::string& out_geo, const std::string& out_monthly,
                  const std::string& out_csv) {
    std::vector<rp::LabeledPost> labeled = rp::load_labeled_jsonl(in);
    std::vector<rp::Station> stations = rp::load_stations(stations_path);

    rp::AggregateOptions opt;
    opt.radius_m = radius_m;
    opt.multi_assign = multi_assign;
    auto aggs = rp::aggregate_stations(labeled, stations, opt);
    rp::write_json_file(rp::station_aggregates_to_geojson(aggs, stations), out_geo);
    if (!out_csv.empty()) {
        std::ofstream csv(out_csv, std::ios::binary);
        csv << rp::station_aggregates_to_csv(aggs, stations);
    }

    std::vector<rp::ScoredPost> scored;
    scored.reserve(labeled.size());
    for (const auto& lp : labeled) scored.push_back({lp.post, lp.sentiment});
    auto monthly = rp::aggregate_monthly(scored);
    std::ofstream mcsv(out_monthly, std::ios::binary);
    mcsv << rp::monthly_aggregates_to_csv(monthly);

    std::size_t assigned = 0;
    for (const auto& a : aggs) assigned += a.post_count;
    std::cout << "aggregated " << labeled.size() << " posts; " << assigned
              << " station assignments across " << aggs.size() << " stations\n";
    return kExitOk;
}

int run_synth(std::size_t n, std::uint64_t seed, const std::string& mix,
              const std::string& sentiment_mix, const std::string& out,
              const std::string& truth_out) {
    rp::SynthSpec spec;
    spec.n = n;
    spec.seed = seed;
    auto parse_mix = [](const std::string& csv, auto& arr) {
        if (csv.empty()) return true;
        std::stringstream ss(csv);
        std::string part;
        std::size_t i = 0;
        while (std::getline(ss, part, ',')) {
            double d = 0;
            if (i >= arr.size() || !rp::detail::parse_double(rp::trim(part), d)) return false;
            arr[i++] = d;
        }
        return i == arr.size();
    };
    if (!parse_mix(mix, spec.category_mix)) {
        std::cerr << "error: --mix expects 4 comma-separated proportions\n";
        return kExitValidation;
    }
    if (!parse_mix(sentiment_mix, spec.sentiment_mix)) {
        std::cerr << "error: --sentiment-mix expects 3 comma-separated proportions\n";
        return kExitValidation;
    }
    rp::SynthCorpus corpus = rp::generate_synthetic_corpus(spec);
    rp::write_posts_jsonl(corpus.posts, out);
    rp::write_truth_jsonl(corpus.truth, truth_out);
    std::cout << "generated " << corpus.posts.size() << " posts -> " << out << " (truth "
              << truth_out << ")\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ridepulse: sentiment + topic analytics for transit social posts"};
    app.set_version_flag("--version", rp::kToolVersion);
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load, clean, and sample a raw corpus");
    std::string in_path, format = "jsonl", keywords_path, out_path, manifest_path;
    std::optional<std::size_t> sample_n;
    std::uint64_t seed = 42;
    ingest->add_option("--in", in_path)->required();
    ingest->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}));
    ingest->add_option("--keywords", keywords_path);
    ingest->add_option("--sample-n", sample_n);
    ingest->add_option("--seed", seed);
    ingest->add_option("--out", out_path)->required();
    ingest->add_option("--manifest", manifest_path);

    // lexicon validate
    auto* lexicon_cmd = app.add_subcommand("lexicon", "Lexicon utilities");
    auto* lex_validate = lexicon_cmd->add_subcommand("validate", "Check a lexicon file");
    std::string lex_path;
    lex_validate->add_option("--in", lex_path)->required();

    // score
    auto* score = app.add_subcommand("score", "Sentiment-score a corpus");
    std::string score_in, score_lexicon = "data/vader_lexicon.txt", score_out;
    double alpha = 15.0;
    score->add_option("--in", score_in)->required();
    score->add_option("--lexicon", score_lexicon);
    score->add_option("--alpha", alpha);
    score->add_option("--out", score_out)->required();

    // classify
    auto* classify = app.add_subcommand("classify", "Assign topic categories");
    std::string cls_in, cls_mode = "local", cls_exemplars = "data/exemplars.jsonl", cls_out,
                cls_audit;
    int k = 5;
    rp::ClassifierClientConfig client_cfg;
    classify->add_option("--in", cls_in)->required();
    classify->add_option("--mode", cls_mode)->check(CLI::IsMember({"remote", "local"}));
    classify->add_option("--exemplars", cls_exemplars);
    classify->add_option("--k", k);
    classify->add_option("--out", cls_out)->required();
    classify->add_option("--audit-log", cls_audit);
    classify->add_option("--endpoint-url", client_cfg.endpoint_url);
    classify->add_option("--model", client_cfg.model_name);
    classify->add_option("--auth-token-env", client_cfg.auth_token_env_var);
    classify->add_option("--max-retries", client_cfg.max_retries);
    classify->add_option("--timeout-ms", client_cfg.request_timeout_ms);
    classify->add_option("--max-concurrent", client_cfg.max_concurrent_requests);
    classify->add_option("--temperature", client_cfg.temperature);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Compare predictions to ground truth");
    std::string eval_pred, eval_truth, eval_out;
    evaluate->add_option("--pred", eval_pred)->required();
    evaluate->add_option("--truth", eval_truth)->required();
    evaluate->add_option("--out", eval_out);

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "Spatial and monthly roll-ups");
    std::string agg_in, agg_stations = "data/stations.csv", agg_geo, agg_monthly, agg_csv;
    double radius_m = rp::kMileMeters;
    bool multi_assign = false;
    aggregate->add_option("--in", agg_in)->required();
    aggregate->add_option("--stations", agg_stations);
    aggregate->add_option("--radius-m", radius_m);
    aggregate->add_flag("--multi-assign", multi_assign);
    aggregate->add_option("--out-geo", agg_geo)->required();
    aggregate->add_option("--out-monthly", agg_monthly)->required();
    aggregate->add_option("--out-csv", agg_csv);

    // run
    auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
    std::string config_path;
    std::vector<std::string> overrides;
    run->add_option("--config", config_path)->required();
    run->add_option("--set", overrides, "Override a config key, e.g. --set seed=7");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
    std::size_t synth_n = 1000;
    std::uint64_t synth_seed = 42;
    std::string synth_mix, synth_sentiment_mix, synth_out, synth_truth;
    synth->add_option("--n", synth_n);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--mix", synth_mix, "category proportions, e.g. 0.046,0.168,0.215,0.571");
    synth->add_option("--sentiment-mix", synth_sentiment_mix);
    synth->add_option("--out", synth_out)->required();
    synth->add_option("--truth", synth_truth)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ingest))
            return run_ingest(in_path, format, keywords_path, sample_n, seed, out_path,
                              manifest_path);
        if (app.got_subcommand(lexicon_cmd)) {
            if (lexicon_cmd->got_subcommand(lex_validate)) {
                rp::Lexicon lex = rp::load_lexicon(lex_path);
                std::cout << "entry_count " << lex.entry_count << "\ndigest " << lex.source_digest
                          << "\nunreachable_skipped " << lex.unreachable_skipped
                          << "\nduplicates_superseded " << lex.duplicates_superseded.size() << "\n";
                return kExitOk;
            }
            std::cerr << "error: expected 'lexicon validate'\n";
            return kExitValidation;
        }
        if (app.got_subcommand(score)) return run_score(score_in, score_lexicon, alpha, score_out);
        if (app.got_subcommand(classify))
            return run_classify(cls_in, cls_mode, cls_exemplars, k, cls_out, cls_audit, client_cfg);
        if (app.got_subcommand(evaluate)) return run_evaluate(eval_pred, eval_truth, eval_out);
        if (app.got_subcommand(aggregate))
            return run_aggregate(agg_in, agg_stations, radius_m, multi_assign, agg_geo, agg_monthly,
                                 agg_csv);
        if (app.got_subcommand(run)) {
            rp::PipelineConfig cfg;
            std::vector<std::string> problems;
            rp::apply_config_kv(cfg, rp::parse_config_file(config_path), problems);
            rp::ConfigKv extra;
            for (const auto& ov : overrides) {
                auto eq = ov.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "error: --set expects key=value, got '" << ov << "'\n";
                    return kExitValidation;
                }
                extra[rp::trim(ov.substr(0, eq))] = rp::trim(ov.substr(eq + 1));
            }
            rp::apply_config_kv(cfg, extra, problems);
            auto more = rp::validate_pipeline_config(cfg);
            problems.insert(problems.end(), more.begin(), more.end());
            if (!problems.empty()) {
                std::cerr << "configuration invalid:\n";
                for (const auto& p : problems) std::cerr << "  - " << p << "\n";
                return kExitValidation;
            }
            std::unique_ptr<rp::HttpChatTransport> transport;
            if (cfg.classify_remote) transport = std::make_unique<rp::HttpChatTransport>(cfg.client);
            try {
                rp::RunManifest manifest = rp::run_pipeline(
                    cfg, transport.get(), [](const std::string& stage, std::size_t records) {
                        std::cout << "stage " << stage << ": " << records << " records\n";
                    });
                std::cout << "run complete; manifest at " << cfg.output_dir
                          << "/run_manifest.json (config digest " << manifest.config_digest
                          << ")\n";
                return kExitOk;
            } catch (const rp::Error& e) {
                std::cerr << "stage failure: " << e.what() << "\n";
                return kExitStageFailure;
            }
        }
        if (app.got_subcommand(synth))
            return run_synth(synth_n, synth_seed, synth_mix, synth_sentiment_mix, synth_out,
                             synth_truth);
    } catch (const rp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageFailure;
    }
    return kExitValidation;
}
