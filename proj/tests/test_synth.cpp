#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "ridepulse/classify.hpp"
#include "ridepulse/lexicon.hpp"
#include "ridepulse/sentiment.hpp"
#include "ridepulse/synth.hpp"

using namespace ridepulse;

namespace {

const Lexicon& pinned_lexicon() {
    static const Lexicon lex =
        load_lexicon(std::string(RIDEPULSE_SOURCE_DIR) + "/data/vader_lexicon.txt");
    return lex;
}

} // namespace

TEST_CASE("largest remainder hits published category counts") {
    auto counts = largest_remainder({0.046, 0.168, 0.215, 0.571}, 1000);
    CHECK(counts == std::vector<std::size_t>{46, 168, 215, 571});

    auto exact = largest_remainder(
        {1667.0 / 36000.0, 6050.0 / 36000.0, 7708.0 / 36000.0, 20575.0 / 36000.0}, 36000);
    CHECK(exact == std::vector<std::size_t>{1667, 6050, 7708, 20575});

    CHECK(largest_remainder({1.0, 0.0, 0.0, 0.0}, 7) == std::vector<std::size_t>{7, 0, 0, 0});
    CHECK_THROWS_AS(largest_remainder({0.5, 0.6}, 10), Error);
    CHECK_THROWS_AS(largest_remainder({1.5, -0.5}, 10), Error);
}

TEST_CASE("synthetic corpus is deterministic and sized to the mix") {
    SynthSpec spec;
    spec.n = 1000;
    spec.seed = 7;
    SynthCorpus a = generate_synthetic_corpus(spec);
    SynthCorpus b = generate_synthetic_corpus(spec);
    REQUIRE(a.posts.size() == 1000);
    REQUIRE(a.truth.size() == 1000);
    for (std::size_t i = 0; i < a.posts.size(); ++i) {
        CHECK(a.posts[i].id == b.posts[i].id);
        CHECK(a.posts[i].text == b.posts[i].text);
        CHECK(a.posts[i].posted_at == b.posts[i].posted_at);
        CHECK(a.posts[i].coordinates.has_value() == b.posts[i].coordinates.has_value());
        CHECK(a.truth[i].category == b.truth[i].category);
    }

    std::map<TopicCategory, std::size_t> by_cat;
    for (const auto& t : a.truth) ++by_cat[t.category];
    CHECK(by_cat[TopicCategory::ServiceMaintenance] == 46);
    CHECK(by_cat[TopicCategory::Schedule] == 168);
    CHECK(by_cat[TopicCategory::SafetySecurity] == 215);
    CHECK(by_cat[TopicCategory::Other] == 571);

    SynthSpec other = spec;
    other.seed = 8;
    SynthCorpus c = generate_synthetic_corpus(other);
    bool differs = false;
    for (std::size_t i = 0; i < a.posts.size(); ++i)
        if (a.posts[i].text != c.posts[i].text) differs = true;
    CHECK(differs);
}

TEST_CASE("n = 0 yields an empty corpus") {
    SynthSpec spec;
    spec.n = 0;
    SynthCorpus c = generate_synthetic_corpus(spec);
    CHECK(c.posts.empty());
    CHECK(c.truth.empty());
}

TEST_CASE("bad mixes are rejected") {
    SynthSpec spec;
    spec.category_mix = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(generate_synthetic_corpus(spec), Error);
}

TEST_CASE("synthetic posts have unique ids and texts and carry keywords") {
    SynthSpec spec;
    spec.n = 500;
    spec.seed = 3;
    SynthCorpus c = generate_synthetic_corpus(spec);
    std::set<std::string> ids, texts;
    for (const auto& p : c.posts) {
        ids.insert(p.id);
        texts.insert(p.text);
        CHECK(contains_ci(p.text, "subway station"));  // matches the stock keyword list
        if (p.coordinates) {
            CHECK(valid_coordinates(p.coordinates->latitude, p.coordinates->longitude));
        }
        CHECK(p.posted_at >= spec.start_time);
        CHECK(p.posted_at <= spec.end_time);
    }
    CHECK(ids.size() == c.posts.size());
    CHECK(texts.size() == c.posts.size());
}

TEST_CASE("ground-truth polarity is reproduced by the scorer") {
    SynthSpec spec;
    spec.n = 600;
    spec.seed = 11;
    SynthCorpus c = generate_synthetic_corpus(spec);
    const Lexicon& lex = pinned_lexicon();
    for (std::size_t i = 0; i < c.posts.size(); ++i) {
        SentimentResult r = analyze(c.posts[i].text, lex);
        INFO("text: " << c.posts[i].text);
        CHECK(r.polarity == c.truth[i].polarity);
    }
}

TEST_CASE("ground-truth category is reproduced by the local classifier") {
    SynthSpec spec;
    spec.n = 600;
    spec.seed = 13;
    SynthCorpus c = generate_synthetic_corpus(spec);
    auto pool = load_exemplars(std::string(RIDEPULSE_SOURCE_DIR) + "/data/exemplars.jsonl");
    for (std::size_t i = 0; i < c.posts.size(); ++i) {
        INFO("text: " << c.posts[i].text);
        CHECK(classify_local(c.posts[i].text, pool) == c.truth[i].category);
    }
}

TEST_CASE("every template and clause combination classifies to its category") {
    auto pool = load_exemplars(std::string(RIDEPULSE_SOURCE_DIR) + "/data/exemplars.jsonl");
    for (TopicCategory cat : kAllCategories) {
        for (const auto& phrase : synth_detail::phrases(cat)) {
            for (Polarity pol : kAllPolarities) {
                for (const auto& clause : synth_detail::sentiment_clause(pol)) {
                    std::string text = phrase;
                    if (!clause.empty()) text += ", " + clause;
                    text += ". trip 012345";
                    INFO("text: " << text);
                    CHECK(classify_local(text, pool) == cat);
                }
            }
        }
    }
}

TEST_CASE("truth sidecar round-trips") {
    SynthSpec spec;
    spec.n = 50;
    SynthCorpus c = generate_synthetic_corpus(spec);
    auto path = (std::filesystem::temp_directory_path() / "rp_truth.jsonl").string();
    write_truth_jsonl(c.truth, path);
    auto loaded = load_truth_jsonl(path);
    REQUIRE(loaded.size() == c.truth.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].id == c.truth[i].id);
        CHECK(loaded[i].category == c.truth[i].category);
        CHECK(loaded[i].polarity == c.truth[i].polarity);
    }
}
