#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace heavytails {

/// Milliseconds since the Unix epoch, UTC.
using EpochMs = std::int64_t;

inline constexpr std::int64_t kMsPerSecond = 1000;
inline constexpr std::int64_t kMsPerMinute = 60 * kMsPerSecond;
inline constexpr std::int64_t kMsPerHour = 60 * kMsPerMinute;
inline constexpr std::int64_t kMsPerDay = 24 * kMsPerHour;

struct CivilDate {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    friend bool operator==(const CivilDate&, const CivilDate&) = default;
};

std::int64_t days_from_civil(const CivilDate& date);
CivilDate civil_from_days(std::int64_t days);

/// 0 = Monday ... 6 = Sunday.
int weekday_from_days(std::int64_t days);

/// Floor division of an epoch timestamp into whole days.
inline std::int64_t floor_days(EpochMs t) {
    return t >= 0 ? t / kMsPerDay : -((-t + kMsPerDay - 1) / kMsPerDay);
}

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDThh:mm[:ss[.fff]]" with optional "Z" or
/// "+hh:mm"/"-hh:mm" suffix. A space may replace the 'T'. No suffix means UTC.
EpochMs parse_iso8601(std::string_view text);

/// "YYYY-MM-DDThh:mm:ss.fffZ"
std::string format_iso8601(EpochMs t);

CivilDate parse_civil_date(std::string_view text);

/// Fixed-offset zone with an optional rule-based daylight-saving schedule.
/// Only zones in the built-in table are available; unknown names throw.
class TimeZone {
public:
    enum class DstRule { none, european_union, united_states };

    static const TimeZone& lookup(std::string_view name);
    static const TimeZone& utc();

    const std::string& name() const { return name_; }
    int standard_offset_minutes() const { return std_offset_min_; }
    DstRule dst_rule() const { return rule_; }

    /// UTC offset in minutes in effect at the given instant.
    int offset_minutes_at(EpochMs utc) const;

    /// Convert a local wall-clock instant (ms since epoch in local time) to UTC.
    /// Times skipped by a spring-forward transition map forward by the gap;
    /// repeated times resolve to the first occurrence.
    EpochMs local_to_utc(std::int64_t local_ms) const;

    std::int64_t utc_to_local(EpochMs utc) const {
        return utc + static_cast<std::int64_t>(offset_minutes_at(utc)) * kMsPerMinute;
    }

    TimeZone(std::string name, int std_offset_min, DstRule rule)
        : name_(std::move(name)), std_offset_min_(std_offset_min), rule_(rule) {}

private:
    std::string name_;
    int std_offset_min_ = 0;
    DstRule rule_ = DstRule::none;
};

}  // namespace heavytails
