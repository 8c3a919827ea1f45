#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ridepulse/errors.hpp"
#include "ridepulse/ingest.hpp"
#include "ridepulse/text.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

inline constexpr double kEarthRadiusMeters = 6371000.0;
inline constexpr double kMileMeters = 1609.34;

/// Great-circle distance on a spherical Earth (R = 6,371,000 m).
inline double haversine(const GeoPoint& a, const GeoPoint& b) {
    if (!valid_coordinates(a.latitude, a.longitude) || !valid_coordinates(b.latitude, b.longitude))
        throw Error(errc::invalid_coordinate, "haversine input out of range");
    const double deg = M_PI / 180.0;
    const double phi1 = a.latitude * deg;
    const double phi2 = b.latitude * deg;
    const double dphi = (b.latitude - a.latitude) * deg;
    const double dlambda = (b.longitude - a.longitude) * deg;
    const double s = std::sin(dphi / 2.0);
    const double t = std::sin(dlambda / 2.0);
    const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
    return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

struct Station {
    std::string id;
    std::string name;
    double latitude = 0.0;
    double longitude = 0.0;
};

/// Station registry CSV: header id,name,lat,lon; unique ids, valid ranges.
inline std::vector<Station> load_stations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::file_unreadable, path);
    std::vector<Station> out;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::string err;
        if (!ingest_detail::split_csv_row(line, f, err))
            throw Error(errc::malformed_record, path + " line " + std::to_string(line_no) + ": " + err);
        if (!header_seen) {
            header_seen = true;
            if (f != std::vector<std::string>{"id", "name", "lat", "lon"})
                throw Error(errc::malformed_record, path + ": expected header id,name,lat,lon");
            continue;
        }
        if (f.size() != 4)
            throw Error(errc::malformed_record, path + " line " + std::to_string(line_no));
        Station s;
        s.id = f[0];
        s.name = f[1];
        if (s.id.empty() || !ids.insert(s.id).second)
            throw Error(errc::malformed_record,
                        path + " line " + std::to_string(line_no) + ": missing or duplicate id");
        if (!detail::parse_double(f[2], s.latitude) || !detail::parse_double(f[3], s.longitude) ||
            !valid_coordinates(s.latitude, s.longitude))
            throw Error(errc::invalid_coordinate, path + " line " + std::to_string(line_no));
        out.push_back(std::move(s));
    }
    return out;
}

/// Nearest station within the radius, or nullopt (also for posts without
/// coordinates). Distance ties go to the lexicographically smaller id.
inline std::optional<std::string> map_to_station(const Post& post,
                                                 const std::vector<Station>& stations,
                                                 double radius_m = kMileMeters) {
    if (!post.coordinates) return std::nullopt;
    std::optional<std::string> best_id;
    double best_dist = 0.0;
    for (const Station& s : stations) {
        const double d = haversine(*post.coordinates, GeoPoint{s.latitude, s.longitude});
        if (d > radius_m) continue;
        if (!best_id || d < best_dist || (d == best_dist && s.id < *best_id)) {
            best_id = s.id;
            best_dist = d;
        }
    }
    return best_id;
}

} // namespace ridepulse
