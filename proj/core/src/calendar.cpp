#include "heavytails/calendar.hpp"

#include "heavytails/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace heavytails {

namespace {

constexpr std::array<std::string_view, 7> kWeekdayNames{"Mon", "Tue", "Wed", "Thu",
                                                        "Fri", "Sat", "Sun"};

int parse_weekday(std::string_view s) {
    for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
        if (detail::iequals(s, kWeekdayNames[i])) {
            return static_cast<int>(i);
        }
    }
    throw ParseError("unknown weekday '" + std::string(s) + "'");
}

int parse_clock(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) {
        throw ParseError("expected hh:mm, got '" + std::string(s) + "'");
    }
    int h = 0;
    int m = 0;
    const auto hs = s.substr(0, colon);
    const auto ms = s.substr(colon + 1);
    if (std::from_chars(hs.data(), hs.data() + hs.size(), h).ptr != hs.data() + hs.size() ||
        std::from_chars(ms.data(), ms.data() + ms.size(), m).ptr != ms.data() + ms.size() ||
        hs.empty() || ms.size() != 2 || h < 0 || h > 24 || m < 0 || m > 59 ||
        (h == 24 && m != 0)) {
        throw ParseError("invalid clock time '" + std::string(s) + "'");
    }
    return h * 60 + m;
}

std::string format_clock(int minutes) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
    return buf;
}

}  // namespace

TradingCalendar::TradingCalendar(std::string timezone, std::vector<Session> sessions,
                                 std::vector<CivilDate> holidays)
    : tz_(&TimeZone::lookup(timezone)), sessions_(std::move(sessions)),
      holidays_(std::move(holidays)) {
    for (const auto& s : sessions_) {
        if (s.weekday < 0 || s.weekday > 6 || s.open_minute < 0 || s.close_minute > 1440 ||
            s.open_minute >= s.close_minute) {
            throw DomainError("invalid session window");
        }
    }
    std::sort(sessions_.begin(), sessions_.end(), [](const Session& a, const Session& b) {
        return std::tie(a.weekday, a.open_minute) < std::tie(b.weekday, b.open_minute);
    });
    for (std::size_t i = 1; i < sessions_.size(); ++i) {
        if (sessions_[i].weekday == sessions_[i - 1].weekday &&
            sessions_[i].open_minute < sessions_[i - 1].close_minute) {
            throw DomainError("overlapping sessions on " +
                              std::string(kWeekdayNames[sessions_[i].weekday]));
        }
    }
    holiday_days_.reserve(holidays_.size());
    for (const auto& d : holidays_) {
        holiday_days_.push_back(days_from_civil(d));
    }
    std::sort(holiday_days_.begin(), holiday_days_.end());
}

TradingCalendar TradingCalendar::always_open() {
    std::vector<Session> sessions;
    for (int d = 0; d < 7; ++d) {
        sessions.push_back({d, 0, 1440});
    }
    return TradingCalendar("UTC", std::move(sessions));
}

TradingCalendar TradingCalendar::parse(std::string_view text) {
    std::string tz = "UTC";
    std::vector<Session> sessions;
    std::vector<CivilDate> holidays;
    std::size_t line_no = 0;
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        line = detail::trim(detail::strip_comment(line));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("calendar line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key == "timezone") {
            tz = std::string(value);
        } else if (key == "holiday") {
            holidays.push_back(parse_civil_date(value));
        } else if (key == "session") {
            const auto space = value.find_first_of(" \t");
            if (space == std::string_view::npos) {
                throw ParseError("calendar line " + std::to_string(line_no) +
                                 ": expected '<days> hh:mm-hh:mm'");
            }
            const auto days = value.substr(0, space);
            const auto hours = detail::trim(value.substr(space));
            const auto dash = hours.find('-');
            if (dash == std::string_view::npos) {
                throw ParseError("calendar line " + std::to_string(line_no) + ": bad hours");
            }
            const int open = parse_clock(hours.substr(0, dash));
            const int close = parse_clock(hours.substr(dash + 1));
            int first = 0;
            int last = 0;
            if (const auto d = days.find('-'); d != std::string_view::npos) {
                first = parse_weekday(days.substr(0, d));
                last = parse_weekday(days.substr(d + 1));
            } else {
                first = last = parse_weekday(days);
            }
            if (last < first) {
                throw ParseError("calendar line " + std::to_string(line_no) +
                                 ": weekday range must run forward");
            }
            for (int wd = first; wd <= last; ++wd) {
                sessions.push_back({wd, open, close});
            }
        } else {
            throw ParseError("calendar line " + std::to_string(line_no) + ": unknown key '" +
                             std::string(key) + "'");
        }
    }
    return TradingCalendar(tz, std::move(sessions), std::move(holidays));
}

TradingCalendar TradingCalendar::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open calendar file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

TradingCalendar TradingCalendar::resolve(std::string_view name_or_path) {
    if (name_or_path == "always") {
        return always_open();
    }
    return load(std::filesystem::path(name_or_path));
}

std::vector<UtcInterval> TradingCalendar::session_pieces(EpochMs from, EpochMs to) const {
    std::vector<UtcInterval> out;
    if (sessions_.empty() || to <= from) {
        return out;
    }
    // Local dates that can touch [from, to) given offsets of at most +-14 h.
    const std::int64_t first_day = floor_days(from) - 1;
    const std::int64_t last_day = floor_days(to) + 1;
    for (std::int64_t day = first_day; day <= last_day; ++day) {
        if (std::binary_search(holiday_days_.begin(), holiday_days_.end(), day)) {
            continue;
        }
        const int wd = weekday_from_days(day);
        for (const auto& s : sessions_) {
            if (s.weekday != wd) {
                continue;
            }
            const std::int64_t local0 = day * kMsPerDay;
            const UtcInterval iv{tz_->local_to_utc(local0 + s.open_minute * kMsPerMinute),
                                 tz_->local_to_utc(local0 + s.close_minute * kMsPerMinute)};
            if (iv.end > from && iv.start < to && iv.end > iv.start) {
                out.push_back(iv);
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const UtcInterval& a, const UtcInterval& b) { return a.start < b.start; });
    return out;
}

std::vector<UtcInterval> merge_intervals(std::vector<UtcInterval> intervals) {
    std::vector<UtcInterval> out;
    for (const auto& iv : intervals) {
        if (!out.empty() && iv.start <= out.back().end) {
            out.back().end = std::max(out.back().end, iv.end);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

std::vector<UtcInterval> TradingCalendar::sessions_between(EpochMs from, EpochMs to) const {
    return merge_intervals(session_pieces(from, to));
}

bool TradingCalendar::is_open(EpochMs t) const {
    for (const auto& iv : session_pieces(t, t + 1)) {
        if (iv.contains(t)) {
            return true;
        }
    }
    return false;
}

std::string TradingCalendar::to_text() const {
    std::string out = "timezone = " + tz_->name() + "\n";
    for (const auto& s : sessions_) {
        out += "session = " + std::string(kWeekdayNames[s.weekday]) + " " +
               format_clock(s.open_minute) + "-" + format_clock(s.close_minute) + "\n";
    }
    for (const auto& d : holidays_) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
        out += "holiday = " + std::string(buf) + "\n";
    }
    return out;
}

}  // namespace heavytails
