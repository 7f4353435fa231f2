#include "heavytails/civil_time.hpp"

#include "heavytails/errors.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace heavytails {

// Proleptic Gregorian conversions after H. Hinnant's chrono-compatible
// low-level date algorithms.
std::int64_t days_from_civil(const CivilDate& date) {
    const std::int64_t y = static_cast<std::int64_t>(date.year) - (date.month <= 2 ? 1 : 0);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned m = date.month;
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + date.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return CivilDate{static_cast<int>(y + (m <= 2 ? 1 : 0)), m, d};
}

int weekday_from_days(std::int64_t days) {
    // 1970-01-01 was a Thursday (index 3 with Monday = 0).
    const std::int64_t w = (days + 3) % 7;
    return static_cast<int>(w < 0 ? w + 7 : w);
}

namespace {

template <typename T>
T parse_fixed(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    T value{};
    if (pos + len > text.size()) {
        throw ParseError("truncated timestamp: '" + std::string(whole) + "'");
    }
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw ParseError("invalid timestamp: '" + std::string(whole) + "'");
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c) {
        throw ParseError("invalid timestamp: '" + std::string(whole) + "'");
    }
}

unsigned days_in_month(int year, unsigned month) {
    static constexpr std::array<unsigned, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29u : kDays[month - 1];
}

}  // namespace

CivilDate parse_civil_date(std::string_view text) {
    if (text.size() != 10) {
        throw ParseError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    CivilDate date;
    date.year = parse_fixed<int>(text, 0, 4, text);
    expect_char(text, 4, '-', text);
    date.month = parse_fixed<unsigned>(text, 5, 2, text);
    expect_char(text, 7, '-', text);
    date.day = parse_fixed<unsigned>(text, 8, 2, text);
    if (date.month < 1 || date.month > 12 || date.day < 1 ||
        date.day > days_in_month(date.year, date.month)) {
        throw ParseError("date out of range: '" + std::string(text) + "'");
    }
    return date;
}

EpochMs parse_iso8601(std::string_view text) {
    const std::string_view whole = text;
    const CivilDate date = parse_civil_date(text.substr(0, std::min<std::size_t>(10, text.size())));
    std::int64_t ms = days_from_civil(date) * kMsPerDay;
    if (text.size() == 10) {
        return ms;
    }
    if (text[10] != 'T' && text[10] != ' ') {
        throw ParseError("invalid timestamp: '" + std::string(whole) + "'");
    }
    const auto hh = parse_fixed<int>(text, 11, 2, whole);
    expect_char(text, 13, ':', whole);
    const auto mm = parse_fixed<int>(text, 14, 2, whole);
    int ss = 0;
    int frac_ms = 0;
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        ss = parse_fixed<int>(text, 17, 2, whole);
        pos = 19;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            int digits = 0;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                if (digits < 3) {
                    frac_ms = frac_ms * 10 + (text[pos] - '0');
                }
                ++digits;
                ++pos;
            }
            if (digits == 0) {
                throw ParseError("invalid fractional seconds: '" + std::string(whole) + "'");
            }
            for (int d = digits; d < 3; ++d) {
                frac_ms *= 10;
            }
        }
    }
    if (hh > 24 || mm > 59 || ss > 60 || (hh == 24 && (mm != 0 || ss != 0 || frac_ms != 0))) {
        throw ParseError("time of day out of range: '" + std::string(whole) + "'");
    }
    ms += hh * kMsPerHour + mm * kMsPerMinute + ss * kMsPerSecond + frac_ms;

    if (pos == text.size()) {
        return ms;
    }
    if (text[pos] == 'Z' && pos + 1 == text.size()) {
        return ms;
    }
    if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
        const int sign = text[pos] == '+' ? 1 : -1;
        const auto oh = parse_fixed<int>(text, pos + 1, 2, whole);
        expect_char(text, pos + 3, ':', whole);
        const auto om = parse_fixed<int>(text, pos + 4, 2, whole);
        return ms - sign * (oh * kMsPerHour + om * kMsPerMinute);
    }
    throw ParseError("invalid timezone suffix: '" + std::string(whole) + "'");
}

std::string format_iso8601(EpochMs t) {
    const std::int64_t days = floor_days(t);
    const std::int64_t rem = t - days * kMsPerDay;
    const CivilDate d = civil_from_days(days);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", d.year, d.month, d.day,
                  static_cast<int>(rem / kMsPerHour), static_cast<int>(rem / kMsPerMinute % 60),
                  static_cast<int>(rem / kMsPerSecond % 60), static_cast<int>(rem % kMsPerSecond));
    return buf;
}

// ---------------------------------------------------------------------------
// Time zones
// ---------------------------------------------------------------------------

namespace {

std::int64_t last_sunday(int year, unsigned month) {
    const std::int64_t last = days_from_civil({year, month, days_in_month(year, month)});
    return last - (weekday_from_days(last) + 1) % 7;
}

std::int64_t nth_sunday(int year, unsigned month, int n) {
    const std::int64_t first = days_from_civil({year, month, 1});
    const std::int64_t first_sunday = first + (6 - weekday_from_days(first));
    return first_sunday + 7 * (n - 1);
}

struct DstWindow {
    EpochMs start;
    EpochMs end;
};

DstWindow dst_window(const TimeZone& tz, int year) {
    switch (tz.dst_rule()) {
    case TimeZone::DstRule::european_union:
        // 01:00 UTC on the last Sundays of March and October.
        return {last_sunday(year, 3) * kMsPerDay + kMsPerHour,
                last_sunday(year, 10) * kMsPerDay + kMsPerHour};
    case TimeZone::DstRule::united_states: {
        // 02:00 local on the second Sunday of March / first Sunday of November.
        const std::int64_t std_off = tz.standard_offset_minutes() * kMsPerMinute;
        return {nth_sunday(year, 3, 2) * kMsPerDay + 2 * kMsPerHour - std_off,
                nth_sunday(year, 11, 1) * kMsPerDay + 2 * kMsPerHour - std_off - kMsPerHour};
    }
    case TimeZone::DstRule::none:
        break;
    }
    return {0, 0};
}

const std::array<TimeZone, 16>& zone_table() {
    using R = TimeZone::DstRule;
    static const std::array<TimeZone, 16> table{
        TimeZone{"UTC", 0, R::none},
        TimeZone{"Etc/UTC", 0, R::none},
        TimeZone{"GMT", 0, R::none},
        TimeZone{"CET", 60, R::european_union},
        TimeZone{"Europe/Berlin", 60, R::european_union},
        TimeZone{"Europe/Paris", 60, R::european_union},
        TimeZone{"Europe/Amsterdam", 60, R::european_union},
        TimeZone{"Europe/Zurich", 60, R::european_union},
        TimeZone{"Europe/Madrid", 60, R::european_union},
        TimeZone{"Europe/London", 0, R::european_union},
        TimeZone{"America/New_York", -300, R::united_states},
        TimeZone{"America/Chicago", -360, R::united_states},
        TimeZone{"Asia/Tokyo", 540, R::none},
        TimeZone{"Asia/Hong_Kong", 480, R::none},
        TimeZone{"Asia/Shanghai", 480, R::none},
        TimeZone{"Australia/Brisbane", 600, R::none},
    };
    return table;
}

}  // namespace

const TimeZone& TimeZone::lookup(std::string_view name) {
    for (const auto& tz : zone_table()) {
        if (tz.name() == name) {
            return tz;
        }
    }
    throw ParseError("unknown time zone '" + std::string(name) + "'");
}

const TimeZone& TimeZone::utc() { return zone_table()[0]; }

int TimeZone::offset_minutes_at(EpochMs utc) const {
    if (rule_ == DstRule::none) {
        return std_offset_min_;
    }
    const int year = civil_from_days(floor_days(utc)).year;
    const DstWindow w = dst_window(*this, year);
    return (utc >= w.start && utc < w.end) ? std_offset_min_ + 60 : std_offset_min_;
}

EpochMs TimeZone::local_to_utc(std::int64_t local_ms) const {
    const std::int64_t std_off = std_offset_min_ * kMsPerMinute;
    if (rule_ == DstRule::none) {
        return local_ms - std_off;
    }
    const EpochMs as_daylight = local_ms - std_off - kMsPerHour;
    if (offset_minutes_at(as_daylight) == std_offset_min_ + 60) {
        return as_daylight;
    }
    return local_ms - std_off;
}

}  // namespace heavytails
