#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ridepulse/errors.hpp"

namespace ridepulse {

struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;
};

inline bool valid_coordinates(double lat, double lon) {
    return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

/// One ingested social-media message.
struct Post {
    std::string id;
    std::string author_id;
    std::string text;
    std::int64_t posted_at = 0;  // epoch seconds, UTC
    std::optional<GeoPoint> coordinates;
};

enum class TopicCategory { ServiceMaintenance, Schedule, SafetySecurity, Other };

inline constexpr std::array<TopicCategory, 4> kAllCategories = {
    TopicCategory::ServiceMaintenance,
    TopicCategory::Schedule,
    TopicCategory::SafetySecurity,
    TopicCategory::Other,
};

inline const char* category_name(TopicCategory c) {
    switch (c) {
        case TopicCategory::ServiceMaintenance: return "ServiceMaintenance";
        case TopicCategory::Schedule:           return "Schedule";
        case TopicCategory::SafetySecurity:     return "SafetySecurity";
        case TopicCategory::Other:              return "Other";
    }
    return "?";
}

/// Human-readable form used in prompts and reports.
inline const char* category_display_name(TopicCategory c) {
    switch (c) {
        case TopicCategory::ServiceMaintenance: return "Service and Maintenance";
        case TopicCategory::Schedule:           return "Schedule";
        case TopicCategory::SafetySecurity:     return "Safety and Security";
        case TopicCategory::Other:              return "Other";
    }
    return "?";
}

inline std::optional<TopicCategory> category_from_name(std::string_view name) {
    for (TopicCategory c : kAllCategories)
        if (name == category_name(c)) return c;
    return std::nullopt;
}

enum class Polarity { Positive, Neutral, Negative };

inline constexpr std::array<Polarity, 3> kAllPolarities = {
    Polarity::Positive, Polarity::Neutral, Polarity::Negative};

inline const char* polarity_name(Polarity p) {
    switch (p) {
        case Polarity::Positive: return "Positive";
        case Polarity::Neutral:  return "Neutral";
        case Polarity::Negative: return "Negative";
    }
    return "?";
}

inline std::optional<Polarity> polarity_from_name(std::string_view name) {
    for (Polarity p : kAllPolarities)
        if (name == polarity_name(p)) return p;
    return std::nullopt;
}

} // namespace ridepulse
