#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ridepulse/config.hpp"
#include "ridepulse/io.hpp"
#include "ridepulse/pipeline.hpp"
#include "ridepulse/synth.hpp"

using namespace ridepulse;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Workspace {
    fs::path root;

    explicit Workspace(const std::string& name) {
        root = fs::temp_directory_path() / ("ridepulse_ws_" + name);
        fs::remove_all(root);
        fs::create_directories(root);
    }

    std::string path(const std::string& rel) const { return (root / rel).string(); }
};

PipelineConfig synth_config(const Workspace& ws, const std::string& out_rel) {
    SynthSpec spec;
    spec.n = 1000;
    spec.seed = 4242;
    SynthCorpus corpus = generate_synthetic_corpus(spec);
    write_posts_jsonl(corpus.posts, ws.path("raw.jsonl"));
    write_truth_jsonl(corpus.truth, ws.path("truth.jsonl"));

    PipelineConfig cfg;
    cfg.input_path = ws.path("raw.jsonl");
    cfg.lexicon_path = std::string(RIDEPULSE_SOURCE_DIR) + "/data/vader_lexicon.txt";
    cfg.exemplars_path = std::string(RIDEPULSE_SOURCE_DIR) + "/data/exemplars.jsonl";
    cfg.stations_path = std::string(RIDEPULSE_SOURCE_DIR) + "/data/stations.csv";
    cfg.truth_path = ws.path("truth.jsonl");
    cfg.output_dir = ws.path(out_rel);
    cfg.seed = 4242;
    return cfg;
}

} // namespace

TEST_CASE("config file parsing, overrides, and diagnostics") {
    Workspace ws("config");
    {
        std::ofstream out(ws.path("good.conf"));
        out << "# sample config\n"
            << "input = " << ws.path("raw.jsonl") << "\n"
            << "lexicon = " << RIDEPULSE_SOURCE_DIR << "/data/vader_lexicon.txt\n"
            << "exemplars = " << RIDEPULSE_SOURCE_DIR << "/data/exemplars.jsonl\n"
            << "stations = " << RIDEPULSE_SOURCE_DIR << "/data/stations.csv\n"
            << "seed = 7\nalpha = 15\nk = 5\nradius_m = 1609.34\n";
    }
    {
        std::ofstream out(ws.path("raw.jsonl"));
        out << R"({"id":"a","author_id":"u","text":"subway ok","posted_at":"2022-01-01T00:00:00Z"})"
            << "\n";
    }
    PipelineConfig cfg = validate_config(ws.path("good.conf"));
    CHECK(cfg.seed == 7);
    CHECK(cfg.exemplars_per_category == 5);

    {
        std::ofstream out(ws.path("bad.conf"));
        out << "alpha = -1\nk = 11\nradius_m = 0\nbogus_key = 1\nclassify_mode = maybe\n";
    }
    try {
        validate_config(ws.path("bad.conf"));
        FAIL("expected ConfigInvalid");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(e.code() == errc::config_invalid);
        CHECK(msg.find("alpha") != std::string::npos);
        CHECK(msg.find("k:") != std::string::npos);
        CHECK(msg.find("radius_m") != std::string::npos);
        CHECK(msg.find("bogus_key") != std::string::npos);
        CHECK(msg.find("classify_mode") != std::string::npos);
        CHECK(msg.find("input") != std::string::npos);  // missing path reported too
    }
}

TEST_CASE("full local pipeline run produces consistent outputs") {
    Workspace ws("run");
    PipelineConfig cfg = synth_config(ws, "out");

    RunManifest manifest = run_pipeline(cfg);
    const PipelineOutputs paths = pipeline_output_paths(cfg.output_dir);

    CHECK(fs::exists(paths.corpus_path));
    CHECK(fs::exists(paths.ingest_manifest_path));
    CHECK(fs::exists(paths.scored_path));
    CHECK(fs::exists(paths.labeled_path));
    CHECK(fs::exists(paths.eval_report_path));
    CHECK(fs::exists(paths.geojson_path));
    CHECK(fs::exists(paths.stations_csv_path));
    CHECK(fs::exists(paths.monthly_csv_path));
    CHECK(fs::exists(paths.run_manifest_path));

    CHECK(manifest.stage_counts.at("ingest") == 1000);
    CHECK(manifest.stage_counts.at("score") == 1000);
    CHECK(manifest.stage_counts.at("classify") == 1000);
    CHECK(manifest.stage_counts.at("aggregate") == 1000);
    CHECK(manifest.lexicon_digest.size() == 16);

    // synthetic truth should evaluate perfectly in local mode
    auto report = nlohmann::json::parse(slurp(paths.eval_report_path));
    CHECK(report.at("macro").at("f1").get<double>() == 1.0);
    CHECK(report.at("micro").at("precision").get<double>() == 1.0);

    // stage outputs are self-describing
    auto meta = nlohmann::json::parse(slurp(paths.scored_path + ".meta.json"));
    CHECK(meta.at("stage") == "score");
    CHECK(meta.at("config_digest") == manifest.config_digest);
    CHECK(meta.at("records").get<std::size_t>() == 1000);
}

TEST_CASE("two identical runs are byte-identical; different seeds differ") {
    Workspace ws("determinism");
    PipelineConfig cfg1 = synth_config(ws, "out1");
    run_pipeline(cfg1);

    PipelineConfig cfg2 = cfg1;
    cfg2.output_dir = ws.path("out2");
    run_pipeline(cfg2);

    const auto p1 = pipeline_output_paths(cfg1.output_dir);
    const auto p2 = pipeline_output_paths(cfg2.output_dir);
    CHECK(slurp(p1.corpus_path) == slurp(p2.corpus_path));
    CHECK(slurp(p1.scored_path) == slurp(p2.scored_path));
    CHECK(slurp(p1.labeled_path) == slurp(p2.labeled_path));
    CHECK(slurp(p1.geojson_path) == slurp(p2.geojson_path));
    CHECK(slurp(p1.stations_csv_path) == slurp(p2.stations_csv_path));
    CHECK(slurp(p1.monthly_csv_path) == slurp(p2.monthly_csv_path));
    CHECK(slurp(p1.ingest_manifest_path) == slurp(p2.ingest_manifest_path));

    // manifests agree modulo timings
    auto m1 = nlohmann::json::parse(slurp(p1.run_manifest_path));
    auto m2 = nlohmann::json::parse(slurp(p2.run_manifest_path));
    m1.erase("timings_ms");
    m2.erase("timings_ms");
    m1["config"].erase("output_dir");
    m2["config"].erase("output_dir");
    CHECK(m1 == m2);
}

TEST_CASE("sampling inside the pipeline stays deterministic") {
    Workspace ws("sampled");
    PipelineConfig cfg = synth_config(ws, "outA");
    cfg.sample_n = 400;
    run_pipeline(cfg);
    PipelineConfig cfg2 = cfg;
    cfg2.output_dir = ws.path("outB");
    run_pipeline(cfg2);
    CHECK(slurp(pipeline_output_paths(cfg.output_dir).corpus_path) ==
          slurp(pipeline_output_paths(cfg2.output_dir).corpus_path));
    auto manifest = nlohmann::json::parse(
        slurp(pipeline_output_paths(cfg.output_dir).ingest_manifest_path));
    CHECK(manifest.at("post_count").get<std::size_t>() == 400);
    CHECK(manifest.at("sampler").get<std::string>() == kSamplerId);
}

TEST_CASE("a completed stage is not recomputed on rerun") {
    Workspace ws("resume");
    PipelineConfig cfg = synth_config(ws, "out");
    run_pipeline(cfg);

    const auto paths = pipeline_output_paths(cfg.output_dir);
    const auto before = fs::last_write_time(paths.scored_path);
    run_pipeline(cfg);  // same config: every stage cached
    CHECK(fs::last_write_time(paths.scored_path) == before);

    // changing the config invalidates the cache
    PipelineConfig changed = cfg;
    changed.seed = 999;
    run_pipeline(changed);
    CHECK(fs::last_write_time(paths.scored_path) != before);
}

TEST_CASE("missing lexicon fails validation before any stage runs") {
    Workspace ws("invalid");
    PipelineConfig cfg = synth_config(ws, "out");
    cfg.lexicon_path = ws.path("missing_lexicon.txt");
    try {
        run_pipeline(cfg);
        FAIL("expected ConfigInvalid");
    } catch (const Error& e) {
        CHECK(e.code() == errc::config_invalid);
    }
    CHECK_FALSE(fs::exists(pipeline_output_paths(cfg.output_dir).corpus_path));
}
