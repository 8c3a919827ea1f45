#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ridepulse/errors.hpp"
#include "ridepulse/text.hpp"
#include "ridepulse/timeutil.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

struct Diagnostic {
    std::size_t line = 0;
    errc code = errc::malformed_record;
    std::string message;
};

struct LoadResult {
    std::vector<Post> posts;
    std::vector<Diagnostic> diagnostics;
};

enum class InputFormat { Jsonl, Csv };

inline std::optional<InputFormat> input_format_from_name(std::string_view name) {
    if (name == "jsonl") return InputFormat::Jsonl;
    if (name == "csv") return InputFormat::Csv;
    return std::nullopt;
}

/// Provenance of one ingest run. With no keyword filter and no sampling,
/// post_count + duplicates_removed equals the record count after link
/// stripping.
struct CorpusManifest {
    std::string source_path;
    std::size_t raw_count = 0;
    std::size_t post_count = 0;
    std::size_t duplicates_removed = 0;
    std::size_t links_stripped = 0;  // URL spans removed
    std::size_t dropped_link_only = 0;
    std::size_t keywords_removed = 0;
    std::size_t sample_removed = 0;
    std::optional<std::uint64_t> sample_seed;
    std::string sampler;  // identifies the deterministic generator
    std::optional<std::pair<std::int64_t, std::int64_t>> date_range;
};

namespace ingest_detail {

inline bool matches_ci(std::string_view text, std::size_t pos, std::string_view pattern) {
    if (pos + pattern.size() > text.size()) return false;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        char a = text[pos + i], b = pattern[i];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
        if (a != b) return false;
    }
    return true;
}

} // namespace ingest_detail

/// Remove URL spans (http/https schemes anywhere, bare t.co/... at a token
/// boundary), merging the whitespace around each removal into a single
/// space. Text without a URL span comes back byte-identical.
inline std::string strip_links(std::string_view text, std::size_t* spans_removed = nullptr) {
    using ingest_detail::matches_ci;

    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t p = 0;
    while (p < text.size()) {
        const bool boundary = p == 0 || is_ascii_space(text[p - 1]);
        bool url = matches_ci(text, p, "http://") || matches_ci(text, p, "https://");
        if (!url && boundary && matches_ci(text, p, "t.co/")) url = true;
        if (url) {
            std::size_t e = p;
            while (e < text.size() && !is_ascii_space(text[e])) ++e;
            spans.emplace_back(p, e);
            p = e;
        } else {
            ++p;
        }
    }
    if (spans_removed) *spans_removed = spans.size();
    if (spans.empty()) return std::string(text);

    std::string out;
    out.reserve(text.size());
    std::size_t cur = 0;
    for (auto [b, e] : spans) {
        out.append(text.substr(cur, b - cur));
        cur = e;
        // collapse the junction left by the removal
        while (!out.empty() && is_ascii_space(out.back())) out.pop_back();
        while (cur < text.size() && is_ascii_space(text[cur])) ++cur;
        if (!out.empty() && cur < text.size()) out.push_back(' ');
    }
    out.append(text.substr(cur));
    while (!out.empty() && is_ascii_space(out.back())) out.pop_back();
    return out;
}

namespace ingest_detail {

inline void validate_record(const std::string& id, const std::string& text,
                            std::optional<double> lat, std::optional<double> lon,
                            std::size_t line, std::unordered_set<std::string>& seen_ids,
                            std::vector<Diagnostic>& diags) {
    if (id.empty())
        diags.push_back({line, errc::malformed_record, "empty id"});
    else if (!seen_ids.insert(id).second)
        diags.push_back({line, errc::malformed_record, "duplicate id '" + id + "'"});
    if (text.empty())
        diags.push_back({line, errc::malformed_record, "empty text"});
    if (lat.has_value() != lon.has_value())
        diags.push_back({line, errc::invalid_coordinate, "lat/lon must be present together"});
    else if (lat && !valid_coordinates(*lat, *lon))
        diags.push_back({line, errc::invalid_coordinate,
                         "lat " + std::to_string(*lat) + ", lon " + std::to_string(*lon)});
}

// RFC 4180-ish row split: quoted fields, "" escapes, no embedded newlines
inline bool split_csv_row(const std::string& line, std::vector<std::string>& fields,
                          std::string& err) {
    fields.clear();
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty()) {
                err = "stray quote inside unquoted field";
                return false;
            }
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        err = "unterminated quoted field";
        return false;
    }
    fields.push_back(cur);
    return true;
}

inline std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace ingest_detail

/// Keep the earliest post per (author, case-folded whitespace-collapsed
/// text); survivor order follows the input.
inline std::vector<Post> dedupe(const std::vector<Post>& posts) {
    struct Best {
        std::size_t index;
        std::int64_t posted_at;
    };
    std::map<std::pair<std::string, std::string>, Best> best;
    for (std::size_t i = 0; i < posts.size(); ++i) {
        auto key = std::make_pair(posts[i].author_id, collapse_whitespace(to_lower(posts[i].text)));
        auto it = best.find(key);
        if (it == best.end()) {
            best.emplace(std::move(key), Best{i, posts[i].posted_at});
        } else if (posts[i].posted_at < it->second.posted_at) {
            it->second = Best{i, posts[i].posted_at};
        }
    }
    std::vector<std::size_t> keep;
    keep.reserve(best.size());
    for (const auto& [key, b] : best) keep.push_back(b.index);
    std::sort(keep.begin(), keep.end());
    std::vector<Post> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(posts[i]);
    return out;
}

/// Case-insensitive substring retention against any keyword.
inline std::vector<Post> filter_keywords(const std::vector<Post>& posts,
                                         const std::vector<std::string>& keywords) {
    if (keywords.empty()) throw Error(errc::empty_keyword_list, "keyword list is empty");
    std::vector<Post> out;
    for (const Post& p : posts) {
        for (const auto& kw : keywords) {
            if (contains_ci(p.text, kw)) {
                out.push_back(p);
                break;
            }
        }
    }
    return out;
}

namespace ingest_detail {

// rejection-sampled bound to keep draws identical across standard libraries
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

} // namespace ingest_detail

inline constexpr const char* kSamplerId = "fisher-yates/mt19937_64/v1";

/// Draw n posts without replacement; input order of the selection is kept.
/// Identical (input, n, seed) always produces the identical sample.
inline std::vector<Post> sample(const std::vector<Post>& posts, std::size_t n, std::uint64_t seed) {
    if (n >= posts.size()) return posts;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(posts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(
            ingest_detail::bounded_rand(rng, idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    std::vector<Post> out;
    out.reserve(n);
    for (std::size_t i : idx) out.push_back(posts[i]);
    return out;
}

struct IngestOptions {
    std::vector<std::string> keywords;  // empty = no keyword filter
    std::optional<std::size_t> sample_n;
    std::uint64_t seed = 0;
};

/// Full cleaning pass: strip links (dropping posts that were link-only),
/// dedupe, optional keyword filter, optional seeded sample.
inline std::pair<std::vector<Post>, CorpusManifest> ingest_posts(std::vector<Post> posts,
                                                                 const IngestOptions& opt,
                                                                 const std::string& source_path) {
    CorpusManifest m;
    m.source_path = source_path;
    m.raw_count = posts.size();

    std::vector<Post> cleaned;
    cleaned.reserve(posts.size());
    for (Post& p : posts) {
        std::size_t spans = 0;
        p.text = strip_links(p.text, &spans);
        m.links_stripped += spans;
        if (p.text.empty()) {
            ++m.dropped_link_only;
            continue;
        }
        cleaned.push_back(std::move(p));
    }

    std::vector<Post> unique = dedupe(cleaned);
    m.duplicates_removed = cleaned.size() - unique.size();

    if (!opt.keywords.empty()) {
        std::vector<Post> kept = filter_keywords(unique, opt.keywords);
        m.keywords_removed = unique.size() - kept.size();
        unique = std::move(kept);
    }

    if (opt.sample_n) {
        std::vector<Post> sampled = sample(unique, *opt.sample_n, opt.seed);
        m.sample_removed = unique.size() - sampled.size();
        m.sample_seed = opt.seed;
        m.sampler = kSamplerId;
        unique = std::move(sampled);
    }

    m.post_count = unique.size();
    if (!unique.empty()) {
        auto [lo, hi] = std::minmax_element(unique.begin(), unique.end(),
                                            [](const Post& a, const Post& b) {
                                                return a.posted_at < b.posted_at;
                                            });
        m.date_range = {lo->posted_at, hi->posted_at};
    }
    return {std::move(unique), std::move(m)};
}

/// Keyword file: one keyword per line, '#' comments and blank lines skipped.
inline std::vector<std::string> load_keywords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::file_unreadable, path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(t);
    }
    return out;
}

} // namespace ridepulse
