#pragma once

#include "heavytails/calendar.hpp"
#include "heavytails/civil_time.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heavytails {

/// One timestamped quote or trade. At least one of {trade_price} or
/// {bid, ask} is present; when both quotes are present, ask >= bid > 0.
struct Tick {
    EpochMs timestamp = 0;
    std::optional<double> bid;
    std::optional<double> ask;
    std::optional<double> trade_price;

    friend bool operator==(const Tick&, const Tick&) = default;
};

bool is_valid(const Tick& tick);

/// Which field of a tick supplies the analysed price.
enum class PriceBasis { mid, bid, ask, trade };

PriceBasis parse_price_basis(std::string_view name);
std::string_view to_string(PriceBasis basis);

/// (bid + ask) / 2 when both quotes are present, else the trade price.
double mid_price(const Tick& tick);

/// Price under the requested basis. Throws DomainError when the tick does not
/// carry the needed field.
double tick_price(const Tick& tick, PriceBasis basis);

struct TickSeries {
    std::string asset_id;
    std::vector<Tick> ticks;

    std::size_t size() const { return ticks.size(); }
    bool empty() const { return ticks.empty(); }
    friend bool operator==(const TickSeries&, const TickSeries&) = default;
};

enum class TimestampUnit { milliseconds, seconds, iso8601 };

enum class TickColumn { timestamp, bid, ask, trade_price, ignore };

/// Column layout of a delimiter-separated tick file.
///
/// Descriptor syntax: a column list followed by optional settings, e.g.
/// "ts,bid,ask;unit=ms;delim=,;header=1". Column names are ts, bid, ask,
/// price (trade price) and '_' for an ignored column. Units are ms, s, iso.
struct TickFormat {
    std::vector<TickColumn> columns{TickColumn::timestamp, TickColumn::bid, TickColumn::ask};
    TimestampUnit unit = TimestampUnit::milliseconds;
    char delimiter = ',';
    bool header = true;

    static TickFormat parse(std::string_view descriptor);
    std::string descriptor() const;
};

inline constexpr EpochMs kReorderToleranceMs = 1000;
inline constexpr double kMaxMalformedFraction = 0.5;

struct ParseStats {
    std::size_t rows = 0;              ///< non-blank data rows seen
    std::size_t skipped_malformed = 0;
    std::size_t dropped_reordered = 0;  ///< backwards jitter within tolerance
    std::size_t superseded_duplicates = 0;  ///< earlier ticks at a repeated millisecond
};

struct ParsedTicks {
    TickSeries series;
    ParseStats stats;
};

/// Parse a tick stream. Rows that fail to parse or violate the Tick
/// invariants are skipped and counted. Timestamps that step backwards by at
/// most kReorderToleranceMs are dropped; larger reversals throw ParseError,
/// as does a malformed fraction above kMaxMalformedFraction. A repeated
/// millisecond keeps the later row.
ParsedTicks parse_ticks(std::istream& in, const TickFormat& format, std::string asset_id = {});
ParsedTicks parse_tick_file(const std::filesystem::path& path, const TickFormat& format,
                            std::string asset_id = {});

/// Inverse of parse_ticks: field-exact for valid series.
void serialize_ticks(std::ostream& out, const TickSeries& series, const TickFormat& format);

/// Keep ticks whose timestamp falls inside a calendar session.
TickSeries session_filter(const TickSeries& series, const TradingCalendar& calendar);

}  // namespace heavytails
