#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "ridepulse/errors.hpp"

namespace ridepulse {

struct CivilTime {
    int year;
    unsigned month;   // 1..12
    unsigned day;     // 1..31
    unsigned hour;    // 0..23
    unsigned minute;  // 0..59
    unsigned second;  // 0..59
};

namespace detail {

// days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm)
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

inline bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline unsigned days_in_month(int y, unsigned m) {
    static const unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
}

} // namespace detail

inline std::int64_t to_epoch_seconds(const CivilTime& t) {
    return detail::days_from_civil(t.year, t.month, t.day) * 86400
           + t.hour * 3600 + t.minute * 60 + t.second;
}

inline CivilTime to_civil(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    CivilTime t{};
    detail::civil_from_days(days, t.year, t.month, t.day);
    t.hour = static_cast<unsigned>(rem / 3600);
    t.minute = static_cast<unsigned>((rem % 3600) / 60);
    t.second = static_cast<unsigned>(rem % 60);
    return t;
}

/// Parse "YYYY-MM-DDTHH:MM:SSZ" (also accepts a trailing "+00:00") to epoch
/// seconds. Anything else throws InvalidTimestamp.
inline std::int64_t parse_iso8601_utc(std::string_view s) {
    auto fail = [&] { throw Error(errc::invalid_timestamp, "expected ISO-8601 UTC, got '" + std::string(s) + "'"); };
    auto digits = [&](std::size_t pos, std::size_t n) -> int {
        int v = 0;
        for (std::size_t i = pos; i < pos + n; ++i) {
            if (i >= s.size() || s[i] < '0' || s[i] > '9') fail();
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    if (s.size() < 20) fail();
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') fail();
    CivilTime t{};
    t.year = digits(0, 4);
    t.month = static_cast<unsigned>(digits(5, 2));
    t.day = static_cast<unsigned>(digits(8, 2));
    t.hour = static_cast<unsigned>(digits(11, 2));
    t.minute = static_cast<unsigned>(digits(14, 2));
    t.second = static_cast<unsigned>(digits(17, 2));
    std::string_view tz = s.substr(19);
    if (!(tz == "Z" || tz == "+00:00")) fail();
    if (t.month < 1 || t.month > 12) fail();
    if (t.day < 1 || t.day > detail::days_in_month(t.year, t.month)) fail();
    if (t.hour > 23 || t.minute > 59 || t.second > 59) fail();
    return to_epoch_seconds(t);
}

inline std::string format_iso8601_utc(std::int64_t epoch_seconds) {
    const CivilTime t = to_civil(epoch_seconds);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02u:%02u:%02uZ",
                  t.year, t.month, t.day, t.hour, t.minute, t.second);
    return buf;
}

/// "YYYY-MM" month bucket of a UTC timestamp.
inline std::string year_month(std::int64_t epoch_seconds) {
    const CivilTime t = to_civil(epoch_seconds);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", t.year, t.month);
    return buf;
}

} // namespace ridepulse
