#pragma once

#include "heavytails/civil_time.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace heavytails {

/// Half-open UTC interval [start, end).
struct UtcInterval {
    EpochMs start = 0;
    EpochMs end = 0;

    bool contains(EpochMs t) const { return t >= start && t < end; }
    friend bool operator==(const UtcInterval&, const UtcInterval&) = default;
};

/// One weekly trading window in the calendar's civil time.
struct Session {
    int weekday = 0;       ///< 0 = Monday ... 6 = Sunday
    int open_minute = 0;   ///< minutes after local midnight
    int close_minute = 0;  ///< exclusive; up to 1440

    friend bool operator==(const Session&, const Session&) = default;
};

/// Weekly session schedule in a named civil time zone, plus holiday dates on
/// which no session opens. Civil times are converted to UTC through the
/// zone's daylight-saving table when intervals are requested.
///
/// Text format (one directive per line, '#' starts a comment):
///
///     timezone = Europe/Berlin
///     session  = Mon-Fri 00:00-23:00
///     session  = Sat 10:00-12:30
///     holiday  = 2020-12-25
class TradingCalendar {
public:
    TradingCalendar() = default;
    TradingCalendar(std::string timezone, std::vector<Session> sessions,
                    std::vector<CivilDate> holidays = {});

    /// Every day 00:00-24:00 UTC.
    static TradingCalendar always_open();

    static TradingCalendar parse(std::string_view text);
    static TradingCalendar load(const std::filesystem::path& path);

    /// "always" selects always_open(); anything else is read as a file.
    static TradingCalendar resolve(std::string_view name_or_path);

    const TimeZone& timezone() const { return *tz_; }
    const std::vector<Session>& sessions() const { return sessions_; }
    const std::vector<CivilDate>& holidays() const { return holidays_; }
    bool empty() const { return sessions_.empty(); }

    /// Individual session windows (one per weekday entry and local date)
    /// intersecting [from, to), sorted by start. Windows are not merged.
    std::vector<UtcInterval> session_pieces(EpochMs from, EpochMs to) const;

    /// Like session_pieces, with abutting or overlapping windows merged.
    std::vector<UtcInterval> sessions_between(EpochMs from, EpochMs to) const;

    bool is_open(EpochMs t) const;

    std::string to_text() const;

private:
    const TimeZone* tz_ = &TimeZone::utc();
    std::vector<Session> sessions_;
    std::vector<CivilDate> holidays_;
    std::vector<std::int64_t> holiday_days_;  // sorted
};

/// Merge sorted intervals whose ends touch or overlap.
std::vector<UtcInterval> merge_intervals(std::vector<UtcInterval> intervals);

}  // namespace heavytails
