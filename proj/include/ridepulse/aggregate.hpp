#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ridepulse/errors.hpp"
#include "ridepulse/geo.hpp"
#include "ridepulse/io.hpp"
#include "ridepulse/timeutil.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

struct CategorySlice {
    std::size_t count = 0;
    double cumulative_abs_compound = 0.0;
};

struct StationAggregate {
    std::string station_id;
    std::size_t post_count = 0;
    double cumulative_abs_compound = 0.0;  // |compound| adds; signs never cancel
    std::array<CategorySlice, 4> per_category{};
    std::array<std::size_t, 3> per_polarity{};  // Positive, Neutral, Negative

    /// Commutative, associative combine for parallel reduction.
    void merge(const StationAggregate& other) {
        post_count += other.post_count;
        cumulative_abs_compound += other.cumulative_abs_compound;
        for (std::size_t i = 0; i < per_category.size(); ++i) {
            per_category[i].count += other.per_category[i].count;
            per_category[i].cumulative_abs_compound += other.per_category[i].cumulative_abs_compound;
        }
        for (std::size_t i = 0; i < per_polarity.size(); ++i)
            per_polarity[i] += other.per_polarity[i];
    }
};

struct MonthlyAggregate {
    std::string month;                     // "YYYY-MM"
    std::array<std::size_t, 3> counts{};   // Positive, Neutral, Negative
    std::array<double, 3> shares{};        // percent; meaningful only when defined
    bool shares_defined = false;
};

struct AggregateOptions {
    double radius_m = kMileMeters;
    bool multi_assign = false;  // literal every-station-within-radius reading
};

/// Per-station roll-up of scored, classified posts. Stations with nothing
/// assigned still appear, zeroed. Output ordered by station id.
inline std::vector<StationAggregate> aggregate_stations(const std::vector<LabeledPost>& posts,
                                                        const std::vector<Station>& stations,
                                                        const AggregateOptions& opt = {}) {
    std::map<std::string, StationAggregate> by_id;
    for (const Station& s : stations) {
        StationAggregate agg;
        agg.station_id = s.id;
        by_id.emplace(s.id, std::move(agg));
    }

    auto add = [&](StationAggregate& agg, const LabeledPost& lp) {
        agg.post_count += 1;
        const double a = std::fabs(lp.sentiment.compound);
        agg.cumulative_abs_compound += a;
        if (lp.category) {
            auto& slice = agg.per_category[static_cast<std::size_t>(*lp.category)];
            slice.count += 1;
            slice.cumulative_abs_compound += a;
        }
        agg.per_polarity[static_cast<std::size_t>(lp.sentiment.polarity)] += 1;
    };

    for (const LabeledPost& lp : posts) {
        if (!lp.post.coordinates) continue;
        if (opt.multi_assign) {
            for (const Station& s : stations) {
                const double d = haversine(*lp.post.coordinates, GeoPoint{s.latitude, s.longitude});
                if (d <= opt.radius_m) add(by_id.at(s.id), lp);
            }
        } else {
            auto id = map_to_station(lp.post, stations, opt.radius_m);
            if (id) add(by_id.at(*id), lp);
        }
    }

    std::vector<StationAggregate> out;
    out.reserve(by_id.size());
    for (auto& [id, agg] : by_id) out.push_back(std::move(agg));
    return out;
}

/// Month buckets over the UTC calendar. Every month inside the range is
/// emitted; empty months carry zero counts and undefined shares.
inline std::vector<MonthlyAggregate> aggregate_monthly(
    const std::vector<ScoredPost>& posts,
    std::optional<std::pair<std::int64_t, std::int64_t>> date_range = std::nullopt) {
    std::vector<MonthlyAggregate> out;
    if (!date_range) {
        if (posts.empty()) return out;
        std::int64_t lo = posts.front().post.posted_at, hi = lo;
        for (const auto& sp : posts) {
            lo = std::min(lo, sp.post.posted_at);
            hi = std::max(hi, sp.post.posted_at);
        }
        date_range = {{lo, hi}};
    }

    std::map<std::string, std::array<std::size_t, 3>> buckets;
    {
        CivilTime from = to_civil(date_range->first);
        CivilTime to = to_civil(date_range->second);
        int y = from.year;
        unsigned m = from.month;
        while (y < to.year || (y == to.year && m <= to.month)) {
            char key[16];
            std::snprintf(key, sizeof(key), "%04d-%02u", y, m);
            buckets[key] = {};
            if (++m > 12) {
                m = 1;
                ++y;
            }
        }
    }

    for (const auto& sp : posts) {
        if (sp.post.posted_at < date_range->first || sp.post.posted_at > date_range->second)
            continue;
        buckets[year_month(sp.post.posted_at)][static_cast<std::size_t>(sp.sentiment.polarity)] += 1;
    }

    for (const auto& [month, counts] : buckets) {
        MonthlyAggregate agg;
        agg.month = month;
        agg.counts = counts;
        const std::size_t total = counts[0] + counts[1] + counts[2];
        if (total > 0) {
            for (std::size_t i = 0; i < 3; ++i)
                agg.shares[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(total);
            agg.shares_defined = true;
        }
        out.push_back(std::move(agg));
    }
    return out;
}

inline nlohmann::json station_aggregates_to_geojson(const std::vector<StationAggregate>& aggs,
                                                    const std::vector<Station>& stations) {
    std::map<std::string, const Station*> by_id;
    for (const Station& s : stations) by_id[s.id] = &s;

    nlohmann::json features = nlohmann::json::array();
    for (const auto& agg : aggs) {
        const Station* s = by_id.at(agg.station_id);
        nlohmann::json props;
        props["station_id"] = agg.station_id;
        props["name"] = s->name;
        props["post_count"] = agg.post_count;
        props["cumulative_abs_compound"] = agg.cumulative_abs_compound;
        for (TopicCategory c : kAllCategories) {
            const auto& slice = agg.per_category[static_cast<std::size_t>(c)];
            props["per_category"][category_name(c)] = {
                {"count", slice.count},
                {"cumulative_abs_compound", slice.cumulative_abs_compound}};
        }
        for (Polarity p : kAllPolarities)
            props["per_polarity"][polarity_name(p)] = agg.per_polarity[static_cast<std::size_t>(p)];
        nlohmann::json feature;
        feature["type"] = "Feature";
        feature["geometry"] = {{"type", "Point"},
                               {"coordinates", {s->longitude, s->latitude}}};
        feature["properties"] = props;
        features.push_back(std::move(feature));
    }
    nlohmann::json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = std::move(features);
    return fc;
}

inline std::string station_aggregates_to_csv(const std::vector<StationAggregate>& aggs,
                                             const std::vector<Station>& stations) {
    std::map<std::string, const Station*> by_id;
    for (const Station& s : stations) by_id[s.id] = &s;

    std::string out =
        "station_id,name,lat,lon,post_count,cumulative_abs_compound,"
        "n_positive,n_neutral,n_negative,"
        "n_service_maintenance,abs_service_maintenance,n_schedule,abs_schedule,"
        "n_safety_security,abs_safety_security,n_other,abs_other\n";
    for (const auto& agg : aggs) {
        const Station* s = by_id.at(agg.station_id);
        out += ingest_detail::csv_escape(s->id) + ',' + ingest_detail::csv_escape(s->name) + ',';
        out += nlohmann::json(s->latitude).dump() + ',' + nlohmann::json(s->longitude).dump() + ',';
        out += std::to_string(agg.post_count) + ',' +
               nlohmann::json(agg.cumulative_abs_compound).dump();
        for (Polarity p : kAllPolarities)
            out += ',' + std::to_string(agg.per_polarity[static_cast<std::size_t>(p)]);
        for (TopicCategory c : kAllCategories) {
            const auto& slice = agg.per_category[static_cast<std::size_t>(c)];
            out += ',' + std::to_string(slice.count) + ',' +
                   nlohmann::json(slice.cumulative_abs_compound).dump();
        }
        out += '\n';
    }
    return out;
}

/// year_month,n_pos,n_neu,n_neg,pct_pos,pct_neu,pct_neg; undefined shares
/// render as empty cells.
inline std::string monthly_aggregates_to_csv(const std::vector<MonthlyAggregate>& aggs) {
    std::string out = "year_month,n_pos,n_neu,n_neg,pct_pos,pct_neu,pct_neg\n";
    char buf[64];
    for (const auto& m : aggs) {
        out += m.month;
        out += ',' + std::to_string(m.counts[0]) + ',' + std::to_string(m.counts[1]) + ',' +
               std::to_string(m.counts[2]);
        if (m.shares_defined) {
            for (double s : m.shares) {
                std::snprintf(buf, sizeof(buf), ",%.6f", s);
                out += buf;
            }
        } else {
            out += ",,,";
        }
        out += '\n';
    }
    return out;
}

} // namespace ridepulse
