#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "ridepulse/ingest.hpp"
#include "ridepulse/io.hpp"

using namespace ridepulse;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / ("ridepulse_test_" + name);
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

Post make_post(const std::string& id, const std::string& author, const std::string& text,
               std::int64_t at = 1650000000) {
    Post p;
    p.id = id;
    p.author_id = author;
    p.text = text;
    p.posted_at = at;
    return p;
}

} // namespace

TEST_CASE("load_posts jsonl happy path keeps file order") {
    auto path = temp_file("ok.jsonl",
        R"({"id":"a","author_id":"u1","text":"first","posted_at":"2022-01-01T00:00:00Z","lat":40.7,"lon":-74.0})"
        "\n"
        R"({"id":"b","author_id":"u2","text":"second","posted_at":"2022-01-02T00:00:00Z"})"
        "\n"
        R"({"id":"c","author_id":"u1","text":"third","posted_at":"2022-01-03T00:00:00Z"})"
        "\n");
    LoadResult r = load_posts(path.string(), InputFormat::Jsonl);
    REQUIRE(r.diagnostics.empty());
    REQUIRE(r.posts.size() == 3);
    CHECK(r.posts[0].id == "a");
    CHECK(r.posts[1].id == "b");
    CHECK(r.posts[2].id == "c");
    CHECK(r.posts[0].coordinates.has_value());
    CHECK_FALSE(r.posts[1].coordinates.has_value());
}

TEST_CASE("load_posts flags bad records with line numbers") {
    auto path = temp_file("bad.jsonl",
        R"({"id":"a","author_id":"u","text":"ok","posted_at":"2022-01-01T00:00:00Z"})"
        "\n"
        R"({"id":"b","author_id":"u","text":"bad lat","posted_at":"2022-01-01T00:00:00Z","lat":95.0,"lon":-74.0})"
        "\n"
        "not json at all\n"
        R"({"id":"a","author_id":"u","text":"dup id","posted_at":"2022-01-01T00:00:00Z"})"
        "\n");
    LoadResult r = load_posts(path.string(), InputFormat::Jsonl);
    REQUIRE(r.posts.size() == 1);
    REQUIRE(r.diagnostics.size() == 3);
    CHECK(r.diagnostics[0].line == 2);
    CHECK(r.diagnostics[0].code == errc::invalid_coordinate);
    CHECK(r.diagnostics[1].line == 3);
    CHECK(r.diagnostics[2].line == 4);

    CHECK_THROWS_AS(load_posts_strict(path.string(), InputFormat::Jsonl), Error);
}

TEST_CASE("load_posts empty file yields empty corpus") {
    auto path = temp_file("empty.jsonl", "");
    LoadResult r = load_posts(path.string(), InputFormat::Jsonl);
    CHECK(r.posts.empty());
    CHECK(r.diagnostics.empty());
}

TEST_CASE("load_posts missing file") {
    CHECK_THROWS_AS(load_posts("/nonexistent/nope.jsonl", InputFormat::Jsonl), Error);
}

TEST_CASE("csv round trip with quoting") {
    std::vector<Post> posts = {
        make_post("a", "u1", "plain text"),
        make_post("b", "u2", "comma, quote \" and\nnewline? no, csv has none"),
    };
    posts[1].coordinates = GeoPoint{40.75, -73.99};
    // strip the newline; csv rows are single-line in this format
    posts[1].text = "comma, quote \" inside";

    fs::path p = fs::temp_directory_path() / "ridepulse_test_roundtrip.csv";
    write_posts_csv(posts, p.string());
    LoadResult r = load_posts(p.string(), InputFormat::Csv);
    REQUIRE(r.diagnostics.empty());
    REQUIRE(r.posts.size() == 2);
    CHECK(r.posts[1].text == posts[1].text);
    CHECK(r.posts[1].coordinates->latitude == 40.75);
    CHECK(r.posts[0].posted_at == posts[0].posted_at);
}

TEST_CASE("jsonl round trip is lossless") {
    std::vector<Post> posts = {
        make_post("x1", "author \"q\"", "text with ünïcode and \"quotes\"", 1651500000),
        make_post("x2", "a2", "plain", 1651500001),
    };
    posts[0].coordinates = GeoPoint{40.123456789, -73.987654321};
    fs::path p = fs::temp_directory_path() / "ridepulse_test_roundtrip.jsonl";
    write_posts_jsonl(posts, p.string());
    LoadResult r = load_posts(p.string(), InputFormat::Jsonl);
    REQUIRE(r.diagnostics.empty());
    REQUIRE(r.posts.size() == 2);
    CHECK(r.posts[0].text == posts[0].text);
    CHECK(r.posts[0].author_id == posts[0].author_id);
    CHECK(r.posts[0].coordinates->latitude == posts[0].coordinates->latitude);
    CHECK(r.posts[0].coordinates->longitude == posts[0].coordinates->longitude);
    CHECK(r.posts[0].posted_at == posts[0].posted_at);
}

TEST_CASE("dedupe keeps earliest per author and normalized text") {
    std::vector<Post> posts = {
        make_post("1", "u1", "Delayed AGAIN", 100),
        make_post("2", "u1", "delayed   again", 50),   // earlier, same normalized text
        make_post("3", "u2", "delayed again", 200),    // different author survives
        make_post("4", "u1", "something else", 150),
    };
    auto out = dedupe(posts);
    REQUIRE(out.size() == 3);
    CHECK(out[0].id == "2");
    CHECK(out[1].id == "3");
    CHECK(out[2].id == "4");

    // idempotent
    auto again = dedupe(out);
    REQUIRE(again.size() == out.size());
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(again[i].id == out[i].id);
}

TEST_CASE("dedupe empty input") {
    CHECK(dedupe({}).empty());
}

TEST_CASE("filter_keywords is case-insensitive containment") {
    std::vector<Post> posts = {
        make_post("1", "u", "MTA is late"),
        make_post("2", "u", "the bus was fine"),
        make_post("3", "u", "nyc Subway rocks"),
    };
    auto kept = filter_keywords(posts, {"MTA", "SUBWAY"});
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "1");
    CHECK(kept[1].id == "3");

    CHECK_THROWS_AS(filter_keywords(posts, {}), Error);
}

TEST_CASE("sample is deterministic, duplicate-free, and a subset") {
    std::vector<Post> posts;
    for (int i = 0; i < 500; ++i)
        posts.push_back(make_post("id" + std::to_string(i), "u", "t", i));

    auto s1 = sample(posts, 100, 99);
    auto s2 = sample(posts, 100, 99);
    REQUIRE(s1.size() == 100);
    REQUIRE(s2.size() == 100);
    std::set<std::string> ids1, ids2, all;
    for (const auto& p : posts) all.insert(p.id);
    for (std::size_t i = 0; i < s1.size(); ++i) {
        ids1.insert(s1[i].id);
        ids2.insert(s2[i].id);
        CHECK(s1[i].id == s2[i].id);
    }
    CHECK(ids1.size() == 100);  // no duplicates
    for (const auto& id : ids1) CHECK(all.count(id) == 1);

    auto s3 = sample(posts, 100, 100);
    bool differs = false;
    for (std::size_t i = 0; i < s1.size(); ++i)
        if (s1[i].id != s3[i].id) differs = true;
    CHECK(differs);  // different seed, different draw

    // n >= size returns everything in order
    auto whole = sample(posts, posts.size(), 1);
    REQUIRE(whole.size() == posts.size());
    CHECK(whole.front().id == posts.front().id);
    CHECK(whole.back().id == posts.back().id);
}

TEST_CASE("ingest_posts manifest balances") {
    std::vector<Post> posts = {
        make_post("1", "u1", "MTA delayed https://t.co/x again", 10),
        make_post("2", "u1", "MTA delayed again", 5),           // dup of 1 after strip
        make_post("3", "u2", "https://t.co/only", 7),           // link-only, dropped
        make_post("4", "u3", "the bus was fine", 8),            // killed by keyword filter
        make_post("5", "u4", "MTA night works", 9),
    };
    IngestOptions opt;
    opt.keywords = {"MTA"};
    auto [kept, m] = ingest_posts(posts, opt, "mem");
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "2");  // earlier duplicate wins
    CHECK(kept[0].text == "MTA delayed again");
    CHECK(m.raw_count == 5);
    CHECK(m.links_stripped == 2);
    CHECK(m.dropped_link_only == 1);
    CHECK(m.duplicates_removed == 1);
    CHECK(m.keywords_removed == 1);
    CHECK(m.post_count + m.duplicates_removed + m.keywords_removed + m.sample_removed ==
          m.raw_count - m.dropped_link_only);
    REQUIRE(m.date_range.has_value());
    CHECK(m.date_range->first == 5);
    CHECK(m.date_range->second == 9);
}

TEST_CASE("stop words and punctuation survive ingestion") {
    // only links may be touched on the way through
    std::vector<Post> posts = {
        make_post("1", "u", "the train and the crowd!!! were loud, yes... https://t.co/x the end")};
    auto [kept, m] = ingest_posts(posts, {}, "mem");
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].text == "the train and the crowd!!! were loud, yes... the end");
}
