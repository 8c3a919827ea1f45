#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ridepulse/lexicon.hpp"
#include "ridepulse/sentiment.hpp"

using namespace ridepulse;
using Catch::Approx;

namespace {

const Lexicon& pinned_lexicon() {
    static const Lexicon lex =
        load_lexicon(std::string(RIDEPULSE_SOURCE_DIR) + "/data/vader_lexicon.txt");
    return lex;
}

struct GoldenRow {
    std::string text;
    double compound;
    double pos, neu, neg;
};

std::vector<GoldenRow> load_golden(const std::string& name) {
    std::ifstream in(std::string(RIDEPULSE_SOURCE_DIR) + "/tests/fixtures/" + name);
    REQUIRE(in.good());
    std::vector<GoldenRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        rows.push_back({j.at("text").get<std::string>(), j.at("compound").get<double>(),
                        j.at("pos").get<double>(), j.at("neu").get<double>(),
                        j.at("neg").get<double>()});
    }
    return rows;
}

} // namespace

TEST_CASE("tokenize strips outer punctuation but keeps short forms") {
    auto toks = tokenize("so stinky ... so stinky.");
    REQUIRE(toks == std::vector<std::string>{"so", "stinky", "...", "so", "stinky"});

    CHECK(tokenize("ENJOY!!!") == std::vector<std::string>{"ENJOY"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t ").empty());
    CHECK(tokenize("Make sure you :) today") ==
          std::vector<std::string>{"Make", "sure", "you", ":)", "today"});
    CHECK(tokenize("(car 2040)") == std::vector<std::string>{"car", "2040"});
    CHECK(tokenize("It's fine.") == std::vector<std::string>{"It's", "fine"});
}

TEST_CASE("normalize point checks") {
    CHECK(normalize(0.0, 15.0) == 0.0);
    CHECK(normalize(4.0, 15.0) == Approx(0.7184).margin(1e-4));
    CHECK(normalize(-4.0, 15.0) == Approx(-0.7184).margin(1e-4));
}

TEST_CASE("normalize is odd, strictly increasing, and bounded") {
    std::mt19937_64 rng(2024);
    double prev_x = -1e9, prev_y = -2.0;
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i)
        xs.push_back((static_cast<double>(rng() >> 11) / 9007199254740992.0 - 0.5) * 200.0);
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        const double y = normalize(x, 15.0);
        CHECK(std::fabs(y) < 1.0);
        CHECK(normalize(-x, 15.0) == Approx(-y).margin(1e-12));
        if (prev_x > -1e8 && x > prev_x) CHECK(y > prev_y);
        prev_x = x;
        prev_y = y;
    }
    CHECK(normalize(1e9, 15.0) == Approx(1.0).margin(1e-6));
    CHECK(normalize(-1e9, 15.0) == Approx(-1.0).margin(1e-6));
}

TEST_CASE("classify_polarity thresholds are strict") {
    CHECK(classify_polarity(0.1) == Polarity::Neutral);
    CHECK(classify_polarity(-0.1) == Polarity::Neutral);
    CHECK(classify_polarity(0.1 + 1e-9) == Polarity::Positive);
    CHECK(classify_polarity(-0.1 - 1e-9) == Polarity::Negative);
    CHECK(classify_polarity(0.0) == Polarity::Neutral);
    CHECK(classify_polarity(-0.7351) == Polarity::Negative);
    CHECK_THROWS_AS(classify_polarity(1.5), Error);
    CHECK_THROWS_AS(classify_polarity(-1.01), Error);
}

TEST_CASE("token_valence handles negation, boosters, and misses") {
    const Lexicon& lex = pinned_lexicon();

    auto toks = tokenize("was not nice");
    CHECK(token_valence(toks, 2, lex) == Approx(1.8 * -0.74));
    CHECK(token_valence(toks, 0, lex) == 0.0);  // "was" not in lexicon

    auto vg = tokenize("very good");
    CHECK(token_valence(vg, 1, lex) == Approx(1.9 + 0.293));
    CHECK(token_valence(vg, 0, lex) == 0.0);  // boosters never score themselves

    CHECK_THROWS_AS(token_valence(vg, 2, lex), Error);

    auto nogood = tokenize("no good");
    CHECK(token_valence(nogood, 1, lex) == Approx(1.9 * -0.74));
}

TEST_CASE("analyze matches the pinned golden corpus") {
    const Lexicon& lex = pinned_lexicon();
    double max_diff = 0.0;
    for (const auto& row : load_golden("golden_sentences.jsonl")) {
        SentimentResult r = analyze(row.text, lex);
        const double diff = std::fabs(r.compound - row.compound);
        INFO("text: " << row.text << " expected " << row.compound << " got " << r.compound);
        CHECK(diff <= 1e-4);
        max_diff = std::max(max_diff, diff);
        if (r.shares_defined) {
            // fixture shares are rounded to 3 decimals
            CHECK(std::fabs(r.pos_share - row.pos) <= 5.0001e-4);
            CHECK(std::fabs(r.neu_share - row.neu) <= 5.0001e-4);
            CHECK(std::fabs(r.neg_share - row.neg) <= 5.0001e-4);
            CHECK(r.pos_share + r.neu_share + r.neg_share == Approx(1.0).margin(1e-6));
        }
    }
    INFO("max |compound - oracle| = " << max_diff);
}

TEST_CASE("analyze matches the pinned fuzz corpus") {
    const Lexicon& lex = pinned_lexicon();
    for (const auto& row : load_golden("fuzz_sentences.jsonl")) {
        SentimentResult r = analyze(row.text, lex);
        INFO("text: " << row.text << " expected " << row.compound << " got " << r.compound);
        CHECK(std::fabs(r.compound - row.compound) <= 1e-4);
    }
}

TEST_CASE("empty and signal-free text") {
    const Lexicon& lex = pinned_lexicon();
    SentimentResult r = analyze("", lex);
    CHECK(r.compound == 0.0);
    CHECK(r.polarity == Polarity::Neutral);
    CHECK_FALSE(r.shares_defined);
    CHECK(r.no_signal);

    SentimentResult r2 = analyze("the uptown local terminated", lex);
    CHECK(r2.compound == 0.0);
    CHECK(r2.polarity == Polarity::Neutral);
    CHECK(r2.shares_defined);
    CHECK(r2.neu_share == 1.0);
    CHECK(r2.no_signal);
}

TEST_CASE("analyze is deterministic") {
    const Lexicon& lex = pinned_lexicon();
    const std::string text = "The train was late but the conductor was wonderful!!";
    SentimentResult a = analyze(text, lex);
    SentimentResult b = analyze(text, lex);
    CHECK(a.compound == b.compound);
    CHECK(a.pos_share == b.pos_share);
    CHECK(a.neu_share == b.neu_share);
    CHECK(a.neg_share == b.neg_share);
    CHECK(a.polarity == b.polarity);
}

TEST_CASE("polarity label is a pure function of the stored compound") {
    const Lexicon& lex = pinned_lexicon();
    for (const auto& row : load_golden("golden_sentences.jsonl")) {
        SentimentResult r = analyze(row.text, lex);
        CHECK(r.polarity == classify_polarity(r.compound));
    }
}

TEST_CASE("punctuation emphasis is monotone in the signal direction") {
    const Lexicon& lex = pinned_lexicon();
    CHECK(analyze("enjoy!!!", lex).compound >= analyze("enjoy", lex).compound);
    CHECK(analyze("stinky!!!", lex).compound <= analyze("stinky", lex).compound);
    // cumulative in count, saturating at the cap
    double prev = analyze("good", lex).compound;
    for (int bangs = 1; bangs <= 6; ++bangs) {
        std::string text = "good" + std::string(static_cast<std::size_t>(bangs), '!');
        const double c = analyze(text, lex).compound;
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
}

TEST_CASE("mixed-case all-caps word amplifies") {
    const Lexicon& lex = pinned_lexicon();
    CHECK(std::fabs(analyze("the ride was GREAT today", lex).compound) >=
          std::fabs(analyze("the ride was great today", lex).compound));
    // uniformly all-caps text gets no caps emphasis
    CHECK(analyze("THE RIDE WAS GREAT TODAY", lex).compound ==
          analyze("the ride was great today", lex).compound);
}

TEST_CASE("contrast clause reweights around but") {
    const Lexicon& lex = pinned_lexicon();
    const double plain = analyze("the station is clean", lex).compound;
    const double contrasted = analyze("the station is clean but the service is unreliable", lex).compound;
    CHECK(contrasted < plain);
}

TEST_CASE("rule config is honored") {
    const Lexicon& lex = pinned_lexicon();
    RuleConfig inert;
    inert.exclamation_step = 0.0;
    CHECK(analyze("good!!!", lex, inert).compound == analyze("good", lex, inert).compound);

    RuleConfig wide;
    wide.alpha = 100.0;
    CHECK(std::fabs(analyze("good", lex, wide).compound) <
          std::fabs(analyze("good", lex).compound));

    RuleConfig bad;
    bad.alpha = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    RuleConfig bad2;
    bad2.negation_window = 0;
    CHECK_THROWS_AS(bad2.validate(), Error);
}
