#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ridepulse/errors.hpp"
#include "ridepulse/ingest.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

struct SynthSpec {
    std::array<double, 4> category_mix{0.046, 0.168, 0.215, 0.571};  // canonical category order
    std::array<double, 3> sentiment_mix{0.35, 0.30, 0.35};           // Positive, Neutral, Negative
    std::size_t n = 1000;
    std::uint64_t seed = 42;
    std::int64_t start_time = 1640995200;  // 2022-01-01T00:00:00Z
    std::int64_t end_time = 1672531199;    // 2022-12-31T23:59:59Z
    double geo_fraction = 0.85;            // remainder get no coordinates
    std::array<double, 4> bbox{40.60, 40.85, -74.05, -73.75};  // lat lo/hi, lon lo/hi
};

struct TruthRecord {
    std::string id;
    TopicCategory category = TopicCategory::Other;
    Polarity polarity = Polarity::Neutral;
};

struct SynthCorpus {
    std::vector<Post> posts;
    std::vector<TruthRecord> truth;  // same order as posts
};

/// Integer apportionment of n by the given proportions: floor everything,
/// then hand out the remainder by descending fractional part (ties to the
/// earlier index).
inline std::vector<std::size_t> largest_remainder(const std::vector<double>& proportions,
                                                  std::size_t n) {
    double sum = std::accumulate(proportions.begin(), proportions.end(), 0.0);
    if (std::fabs(sum - 1.0) > 1e-9)
        throw Error(errc::invalid_mix, "proportions sum to " + std::to_string(sum));
    for (double p : proportions)
        if (p < 0.0) throw Error(errc::invalid_mix, "negative proportion");

    std::vector<std::size_t> counts(proportions.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < proportions.size(); ++i) {
        const double target = proportions[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(target));
        assigned += counts[i];
        remainders.emplace_back(target - std::floor(target), i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned)
        counts[remainders[i % remainders.size()].second] += 1;
    return counts;
}

namespace synth_detail {

// template vocabulary is curated against the pinned lexicon: category and
// filler words carry no valence, so the sentiment clause alone fixes polarity
inline const std::vector<std::string>& phrases(TopicCategory c) {
    // every template mentions "subway station" so the stock keyword list
    // retains the whole corpus
    static const std::vector<std::string> kServiceMaintenance = {
        "repair crew at the subway station escalator this morning",
        "elevator maintenance and turnstile repairs at the subway station today",
        "litter on the subway station mezzanine and cleanliness of the platform",
        "mop crew did maintenance of the subway station concourse",
    };
    static const std::vector<std::string> kSchedule = {
        "timetable and headway of the subway station line today",
        "arrival and departure minutes on the weekday subway station schedule",
        "late train and a wait of minutes at the subway station",
        "subway station schedule reroute and frequency of the line this evening",
    };
    static const std::vector<std::string> kSafetySecurity = {
        "police patrol and camera report at the subway station",
        "incident report from the officer on the subway station platform tonight",
        "patrol presence and lighting at the subway station entrance",
        "camera and police presence near the subway station exit",
    };
    static const std::vector<std::string> kOther = {
        "coffee and a book on the subway station ride this morning",
        "weather and sunset photo from the subway station train on the weekend",
        "music from a subway station busker and the city skyline street",
        "tourist photo of the street near the subway station",
    };
    switch (c) {
        case TopicCategory::ServiceMaintenance: return kServiceMaintenance;
        case TopicCategory::Schedule:           return kSchedule;
        case TopicCategory::SafetySecurity:     return kSafetySecurity;
        case TopicCategory::Other:              return kOther;
    }
    return kOther;
}

inline const std::vector<std::string>& sentiment_clause(Polarity p) {
    static const std::vector<std::string> kPositive = {
        "it was great", "everyone was happy about it", "riders love it",
        "what a wonderful trip", "excellent and wonderful today",
    };
    static const std::vector<std::string> kNegative = {
        "it was terrible", "this is horrible", "it was awful",
        "broken and miserable today", "disgusting this morning",
    };
    static const std::vector<std::string> kNeutral = {
        "", "on the line today", "for the morning commute",
    };
    switch (p) {
        case Polarity::Positive: return kPositive;
        case Polarity::Negative: return kNegative;
        case Polarity::Neutral:  return kNeutral;
    }
    return kNeutral;
}

inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

} // namespace synth_detail

/// Deterministic labeled corpus. Category and sentiment counts follow the
/// mix by largest remainder; every text is unique and mentions the subway,
/// so keyword filtering and dedup keep the corpus intact.
inline SynthCorpus generate_synthetic_corpus(const SynthSpec& spec) {
    if (spec.end_time < spec.start_time)
        throw Error(errc::config_invalid, "synth end_time before start_time");

    const auto cat_counts = largest_remainder(
        {spec.category_mix[0], spec.category_mix[1], spec.category_mix[2], spec.category_mix[3]},
        spec.n);

    // (category, polarity) assignment list, then one deterministic shuffle
    std::vector<std::pair<TopicCategory, Polarity>> plan;
    plan.reserve(spec.n);
    for (std::size_t ci = 0; ci < 4; ++ci) {
        const auto pol_counts = largest_remainder(
            {spec.sentiment_mix[0], spec.sentiment_mix[1], spec.sentiment_mix[2]}, cat_counts[ci]);
        for (std::size_t pi = 0; pi < 3; ++pi)
            for (std::size_t k = 0; k < pol_counts[pi]; ++k)
                plan.emplace_back(kAllCategories[ci], kAllPolarities[pi]);
    }

    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = plan.size(); i > 1; --i)
        std::swap(plan[i - 1],
                  plan[ingest_detail::bounded_rand(rng, i)]);

    SynthCorpus corpus;
    corpus.posts.reserve(spec.n);
    corpus.truth.reserve(spec.n);
    const std::int64_t span = spec.end_time - spec.start_time;
    char buf[64];

    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto [cat, pol] = plan[i];
        Post p;
        std::snprintf(buf, sizeof(buf), "synth-%06zu", i + 1);
        p.id = buf;
        std::snprintf(buf, sizeof(buf), "user%04llu",
                      static_cast<unsigned long long>(ingest_detail::bounded_rand(rng, 211)));
        p.author_id = buf;

        const auto& cat_bank = synth_detail::phrases(cat);
        const auto& pol_bank = synth_detail::sentiment_clause(pol);
        std::string text = cat_bank[ingest_detail::bounded_rand(rng, cat_bank.size())];
        const std::string& clause = pol_bank[ingest_detail::bounded_rand(rng, pol_bank.size())];
        if (!clause.empty()) {
            text += ", ";
            text += clause;
        }
        std::snprintf(buf, sizeof(buf), ". trip %06zu", i + 1);
        text += buf;
        p.text = text;

        p.posted_at = spec.start_time +
                      (plan.size() > 1
                           ? static_cast<std::int64_t>(
                                 (static_cast<double>(i) / static_cast<double>(plan.size() - 1)) *
                                 static_cast<double>(span))
                           : 0);
        if (synth_detail::unit_double(rng) < spec.geo_fraction) {
            const double lat = spec.bbox[0] + synth_detail::unit_double(rng) * (spec.bbox[1] - spec.bbox[0]);
            const double lon = spec.bbox[2] + synth_detail::unit_double(rng) * (spec.bbox[3] - spec.bbox[2]);
            p.coordinates = GeoPoint{lat, lon};
        }

        corpus.truth.push_back({p.id, cat, pol});
        corpus.posts.push_back(std::move(p));
    }
    return corpus;
}

inline void write_truth_jsonl(const std::vector<TruthRecord>& truth, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::file_unreadable, "cannot write " + path);
    for (const auto& t : truth) {
        nlohmann::json j;
        j["id"] = t.id;
        j["category"] = category_name(t.category);
        j["polarity"] = polarity_name(t.polarity);
        out << j.dump() << '\n';
    }
}

inline std::vector<TruthRecord> load_truth_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::file_unreadable, path);
    std::vector<TruthRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error(errc::malformed_record, path + " line " + std::to_string(line_no));
        TruthRecord t;
        t.id = j.at("id").get<std::string>();
        auto cat = category_from_name(j.at("category").get<std::string>());
        if (!cat) throw Error(errc::malformed_record, path + " line " + std::to_string(line_no));
        t.category = *cat;
        if (j.contains("polarity")) {
            auto pol = polarity_from_name(j.at("polarity").get<std::string>());
            if (!pol) throw Error(errc::malformed_record, path + " line " + std::to_string(line_no));
            t.polarity = *pol;
        }
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace ridepulse
