#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ridepulse/errors.hpp"
#include "ridepulse/ingest.hpp"
#include "ridepulse/sentiment.hpp"
#include "ridepulse/timeutil.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

using json = nlohmann::json;

struct ScoredPost {
    Post post;
    SentimentResult sentiment;
};

struct LabeledPost {
    Post post;
    SentimentResult sentiment;
    std::optional<TopicCategory> category;  // nullopt renders as "Unlabeled"
};

inline json post_to_json(const Post& p) {
    json j;
    j["id"] = p.id;
    j["author_id"] = p.author_id;
    j["text"] = p.text;
    j["posted_at"] = format_iso8601_utc(p.posted_at);
    if (p.coordinates) {
        j["lat"] = p.coordinates->latitude;
        j["lon"] = p.coordinates->longitude;
    }
    return j;
}

inline json sentiment_to_json(const SentimentResult& s) {
    json j;
    j["compound"] = s.compound;
    j["pos_share"] = s.pos_share;
    j["neu_share"] = s.neu_share;
    j["neg_share"] = s.neg_share;
    j["polarity"] = polarity_name(s.polarity);
    j["shares_defined"] = s.shares_defined;
    j["no_signal"] = s.no_signal;
    return j;
}

namespace io_detail {

inline Post post_from_json(const json& j, std::size_t line, std::vector<Diagnostic>& diags) {
    Post p;
    auto str_field = [&](const char* name, bool required) -> std::string {
        auto it = j.find(name);
        if (it == j.end() || it->is_null()) {
            if (required)
                diags.push_back({line, errc::malformed_record, std::string("missing field '") + name + "'"});
            return {};
        }
        if (!it->is_string()) {
            diags.push_back({line, errc::malformed_record, std::string("field '") + name + "' must be a string"});
            return {};
        }
        return it->get<std::string>();
    };
    p.id = str_field("id", true);
    p.author_id = str_field("author_id", true);
    p.text = str_field("text", true);
    const std::string ts = str_field("posted_at", true);
    if (!ts.empty()) {
        try {
            p.posted_at = parse_iso8601_utc(ts);
        } catch (const Error& e) {
            diags.push_back({line, errc::malformed_record, e.what()});
        }
    }
    auto num_field = [&](const char* name) -> std::optional<double> {
        auto it = j.find(name);
        if (it == j.end() || it->is_null()) return std::nullopt;
        if (!it->is_number()) {
            diags.push_back({line, errc::malformed_record, std::string("field '") + name + "' must be a number"});
            return std::nullopt;
        }
        return it->get<double>();
    };
    auto lat = num_field("lat");
    auto lon = num_field("lon");
    if (lat && lon) p.coordinates = GeoPoint{*lat, *lon};
    if (lat.has_value() != lon.has_value())
        diags.push_back({line, errc::invalid_coordinate, "lat/lon must be present together"});
    else if (lat && !valid_coordinates(*lat, *lon))
        diags.push_back({line, errc::invalid_coordinate,
                         "lat " + std::to_string(*lat) + ", lon " + std::to_string(*lon)});
    return p;
}

} // namespace io_detail

/// Parse a corpus file. Every bad record produces a line-numbered diagnostic;
/// good records come back in file order.
inline LoadResult load_posts(const std::string& path, InputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::file_unreadable, path);

    LoadResult result;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string> header;
    if (format == InputFormat::Csv) {
        if (!std::getline(in, line))
            return result;  // empty file: empty corpus
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string err;
        if (!ingest_detail::split_csv_row(line, header, err) ||
            header != std::vector<std::string>{"id", "author_id", "text", "posted_at", "lat", "lon"}) {
            result.diagnostics.push_back({line_no, errc::malformed_record,
                                          "expected header id,author_id,text,posted_at,lat,lon"});
            return result;
        }
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        const std::size_t before = result.diagnostics.size();
        Post p;
        if (format == InputFormat::Jsonl) {
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object()) {
                result.diagnostics.push_back({line_no, errc::malformed_record, "invalid JSON object"});
                continue;
            }
            p = io_detail::post_from_json(j, line_no, result.diagnostics);
        } else {
            std::vector<std::string> f;
            std::string err;
            if (!ingest_detail::split_csv_row(line, f, err)) {
                result.diagnostics.push_back({line_no, errc::malformed_record, err});
                continue;
            }
            if (f.size() != 6) {
                result.diagnostics.push_back({line_no, errc::malformed_record,
                                              "expected 6 fields, got " + std::to_string(f.size())});
                continue;
            }
            p.id = f[0];
            p.author_id = f[1];
            p.text = f[2];
            try {
                p.posted_at = parse_iso8601_utc(f[3]);
            } catch (const Error& e) {
                result.diagnostics.push_back({line_no, errc::malformed_record, e.what()});
            }
            if (!f[4].empty() || !f[5].empty()) {
                double lat = 0, lon = 0;
                if (!detail::parse_double(f[4], lat) || !detail::parse_double(f[5], lon)) {
                    result.diagnostics.push_back({line_no, errc::invalid_coordinate,
                                                  "bad lat/lon '" + f[4] + "','" + f[5] + "'"});
                } else if (!valid_coordinates(lat, lon)) {
                    result.diagnostics.push_back({line_no, errc::invalid_coordinate,
                                                  "lat " + f[4] + ", lon " + f[5]});
                } else {
                    p.coordinates = GeoPoint{lat, lon};
                }
            }
        }

        if (p.id.empty())
            result.diagnostics.push_back({line_no, errc::malformed_record, "empty id"});
        else if (!seen_ids.insert(p.id).second)
            result.diagnostics.push_back({line_no, errc::malformed_record, "duplicate id '" + p.id + "'"});
        if (p.text.empty())
            result.diagnostics.push_back({line_no, errc::malformed_record, "empty text"});

        if (result.diagnostics.size() == before)
            result.posts.push_back(std::move(p));
    }
    return result;
}

/// load_posts that refuses files with any bad record.
inline std::vector<Post> load_posts_strict(const std::string& path, InputFormat format) {
    LoadResult r = load_posts(path, format);
    if (!r.diagnostics.empty()) {
        std::ostringstream msg;
        msg << path << ": " << r.diagnostics.size() << " bad record(s); first at line "
            << r.diagnostics.front().line << ": " << r.diagnostics.front().message;
        throw Error(r.diagnostics.front().code, msg.str());
    }
    return std::move(r.posts);
}

inline void write_posts_jsonl(const std::vector<Post>& posts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::file_unreadable, "cannot write " + path);
    for (const Post& p : posts) out << post_to_json(p).dump() << '\n';
}

inline void write_posts_csv(const std::vector<Post>& posts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::file_unreadable, "cannot write " + path);
    out << "id,author_id,text,posted_at,lat,lon\n";
    for (const Post& p : posts) {
        out << ingest_detail::csv_escape(p.id) << ',' << ingest_detail::csv_escape(p.author_id)
            << ',' << ingest_detail::csv_escape(p.text) << ',' << format_iso8601_utc(p.posted_at) << ',';
        if (p.coordinates) {
            json lat = p.coordinates->latitude, lon = p.coordinates->longitude;
            out << lat.dump() << ',' << lon.dump();
        } else {
            out << ',';
        }
        out << '\n';
    }
}

inline SentimentResult sentiment_from_json(const json& j) {
    SentimentResult s;
    s.compound = j.at("compound").get<double>();
    s.pos_share = j.at("pos_share").get<double>();
    s.neu_share = j.at("neu_share").get<double>();
    s.neg_share = j.at("neg_share").get<double>();
    auto p = polarity_from_name(j.at("polarity").get<std::string>());
    if (!p) throw Error(errc::malformed_record, "bad polarity");
    s.polarity = *p;
    s.shares_defined = j.value("shares_defined", true);
    s.no_signal = j.value("no_signal", false);
    return s;
}

inline void write_scored_jsonl(const std::vector<ScoredPost>& scored, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::file_unreadable, "cannot write " + path);
    for (const auto& sp : scored) {
        json j = post_to_json(sp.post);
        j.update(sentiment_to_json(sp.sentiment));
        out << j.dump() << '\n';
    }
}

inline std::vector<ScoredPost> load_scored_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::file_unreadable, path);
    std::vector<ScoredPost> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw Error(errc::malformed_record, "line " + std::to_string(line_no));
        std::vector<Diagnostic> diags;
        ScoredPost sp;
        sp.post = io_detail::post_from_json(j, line_no, diags);
        if (!diags.empty())
            throw Error(diags.front().code, "line " + std::to_string(line_no) + ": " + diags.front().message);
        sp.sentiment = sentiment_from_json(j);
        out.push_back(std::move(sp));
    }
    return out;
}

inline void write_labeled_jsonl(const std::vector<LabeledPost>& labeled, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::file_unreadable, "cannot write " + path);
    for (const auto& lp : labeled) {
        json j = post_to_json(lp.post);
        j.update(sentiment_to_json(lp.sentiment));
        j["category"] = lp.category ? category_name(*lp.category) : "Unlabeled";
        out << j.dump() << '\n';
    }
}

inline std::vector<LabeledPost> load_labeled_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::file_unreadable, path);
    std::vector<LabeledPost> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw Error(errc::malformed_record, "line " + std::to_string(line_no));
        std::vector<Diagnostic> diags;
        LabeledPost lp;
        lp.post = io_detail::post_from_json(j, line_no, diags);
        if (!diags.empty())
            throw Error(diags.front().code, "line " + std::to_string(line_no) + ": " + diags.front().message);
        lp.sentiment = sentiment_from_json(j);
        const std::string cat = j.at("category").get<std::string>();
        if (cat != "Unlabeled") {
            auto c = category_from_name(cat);
            if (!c) throw Error(errc::malformed_record, "line " + std::to_string(line_no) + ": bad category '" + cat + "'");
            lp.category = *c;
        }
        out.push_back(std::move(lp));
    }
    return out;
}

inline json manifest_to_json(const CorpusManifest& m) {
    json j;
    j["source_path"] = m.source_path;
    j["raw_count"] = m.raw_count;
    j["post_count"] = m.post_count;
    j["duplicates_removed"] = m.duplicates_removed;
    j["links_stripped"] = m.links_stripped;
    j["dropped_link_only"] = m.dropped_link_only;
    j["keywords_removed"] = m.keywords_removed;
    j["sample_removed"] = m.sample_removed;
    if (m.sample_seed) {
        j["sample_seed"] = *m.sample_seed;
        j["sampler"] = m.sampler;
    }
    if (m.date_range) {
        j["date_range"] = {format_iso8601_utc(m.date_range->first),
                           format_iso8601_utc(m.date_range->second)};
    } else {
        j["date_range"] = nullptr;
    }
    return j;
}

inline void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::file_unreadable, "cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace ridepulse
