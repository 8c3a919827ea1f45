#include <catch_amalgamated.hpp>

#include <random>
#include <string>

#include "ridepulse/ingest.hpp"
#include "ridepulse/text.hpp"
#include "ridepulse/timeutil.hpp"

using namespace ridepulse;

TEST_CASE("strip_links removes shortener and scheme urls") {
    CHECK(strip_links("delayed again https://t.co/abc12 ugh") == "delayed again ugh");
    CHECK(strip_links("no links here") == "no links here");
    CHECK(strip_links("https://t.co/abc12") == "");
    CHECK(strip_links("t.co/abc12") == "");
    CHECK(strip_links("see http://example.com/x?y=1 now") == "see now");
    CHECK(strip_links("tail https://t.co/abc") == "tail");
    CHECK(strip_links("HTTPS://T.CO/ABC lead") == "lead");
    CHECK(strip_links("two https://a.example t.co/b links") == "two links");
}

TEST_CASE("strip_links counts spans and keeps non-url text intact") {
    std::size_t spans = 0;
    strip_links("a https://x.test b t.co/y c", &spans);
    CHECK(spans == 2);

    // t.co only matches at a token boundary
    CHECK(strip_links("concert.co/tickets stays") == "concert.co/tickets stays");

    std::string doubled = "keeps  inner   spacing";
    CHECK(strip_links(doubled) == doubled);
}

TEST_CASE("strip_links never lengthens text") {
    std::mt19937 rng(7);
    const std::vector<std::string> pieces = {"delay", "https://t.co/zz", "MTA", " ", "  ",
                                             "t.co/q", "ok!", "...", "http://x.io/a?b=c"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            text += pieces[rng() % pieces.size()];
            text += ' ';
        }
        std::string out = strip_links(text);
        CHECK(out.size() <= text.size());
        CHECK(out.find("http://") == std::string::npos);
        CHECK(out.find("https://") == std::string::npos);
    }
}

TEST_CASE("whitespace helpers") {
    CHECK(collapse_whitespace("  a \t b\n c ") == "a b c");
    CHECK(collapse_whitespace("") == "");
    CHECK(trim("  x  ") == "x");
    CHECK(split_whitespace("a  b\tc").size() == 3);
    CHECK(to_lower("MiXeD 123 ÄÖ") == "mixed 123 ÄÖ");  // non-ASCII untouched
    CHECK(utf8_length("abc") == 3);
    CHECK(utf8_length(":þ") == 2);
    CHECK(utf8_length("") == 0);
}

TEST_CASE("iso8601 parse and format round-trip") {
    const std::string iso = "2022-04-01T12:34:56Z";
    const std::int64_t t = parse_iso8601_utc(iso);
    CHECK(format_iso8601_utc(t) == iso);
    CHECK(year_month(t) == "2022-04");
    CHECK(parse_iso8601_utc("2022-04-01T12:34:56+00:00") == t);

    CHECK(parse_iso8601_utc("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601_utc("2020-02-29T00:00:00Z") % 86400 == 0);

    CHECK_THROWS_AS(parse_iso8601_utc("2022-04-01 12:34"), Error);
    CHECK_THROWS_AS(parse_iso8601_utc("2022-13-01T00:00:00Z"), Error);
    CHECK_THROWS_AS(parse_iso8601_utc("2021-02-29T00:00:00Z"), Error);
    CHECK_THROWS_AS(parse_iso8601_utc("2022-04-01T12:34:56-05:00"), Error);

    // round-trip across a broad range
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        std::int64_t s = static_cast<std::int64_t>(rng() % 4102444800ULL);  // up to 2100
        CHECK(parse_iso8601_utc(format_iso8601_utc(s)) == s);
    }
}
