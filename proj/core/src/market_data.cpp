#include "heavytails/market_data.hpp"

#include "heavytails/errors.hpp"
#include "text_util.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace heavytails {

bool is_valid(const Tick& t) {
    auto ok = [](const std::optional<double>& v) { return !v || (std::isfinite(*v) && *v >= 0.0); };
    if (!ok(t.bid) || !ok(t.ask) || !ok(t.trade_price)) {
        return false;
    }
    const bool quotes = t.bid.has_value() && t.ask.has_value();
    if (!quotes && !t.trade_price) {
        return false;
    }
    if (quotes && !(*t.bid > 0.0 && *t.ask >= *t.bid)) {
        return false;
    }
    return true;
}

PriceBasis parse_price_basis(std::string_view name) {
    if (name == "mid") return PriceBasis::mid;
    if (name == "bid") return PriceBasis::bid;
    if (name == "ask") return PriceBasis::ask;
    if (name == "trade" || name == "price") return PriceBasis::trade;
    throw ParseError("unknown price basis '" + std::string(name) + "'");
}

std::string_view to_string(PriceBasis basis) {
    switch (basis) {
    case PriceBasis::mid: return "mid";
    case PriceBasis::bid: return "bid";
    case PriceBasis::ask: return "ask";
    case PriceBasis::trade: return "trade";
    }
    return "mid";
}

double mid_price(const Tick& tick) {
    if (tick.bid && tick.ask) {
        return 0.5 * (*tick.bid + *tick.ask);
    }
    return *tick.trade_price;
}

double tick_price(const Tick& tick, PriceBasis basis) {
    switch (basis) {
    case PriceBasis::mid:
        if ((tick.bid && tick.ask) || tick.trade_price) {
            return mid_price(tick);
        }
        break;
    case PriceBasis::bid:
        if (tick.bid) return *tick.bid;
        break;
    case PriceBasis::ask:
        if (tick.ask) return *tick.ask;
        break;
    case PriceBasis::trade:
        if (tick.trade_price) return *tick.trade_price;
        break;
    }
    throw DomainError("tick at " + format_iso8601(tick.timestamp) + " has no " +
                      std::string(to_string(basis)) + " price");
}

// ---------------------------------------------------------------------------
// Format descriptor
// ---------------------------------------------------------------------------

namespace {

std::string_view column_name(TickColumn c) {
    switch (c) {
    case TickColumn::timestamp: return "ts";
    case TickColumn::bid: return "bid";
    case TickColumn::ask: return "ask";
    case TickColumn::trade_price: return "price";
    case TickColumn::ignore: return "_";
    }
    return "_";
}

TickColumn parse_column(std::string_view s) {
    if (s == "ts" || s == "timestamp" || s == "time") return TickColumn::timestamp;
    if (s == "bid") return TickColumn::bid;
    if (s == "ask") return TickColumn::ask;
    if (s == "price" || s == "trade" || s == "trade_price") return TickColumn::trade_price;
    if (s == "_" || s == "skip") return TickColumn::ignore;
    throw ParseError("unknown tick column '" + std::string(s) + "'");
}

}  // namespace

TickFormat TickFormat::parse(std::string_view descriptor) {
    TickFormat fmt;
    const auto parts = detail::split(descriptor, ';');
    fmt.columns.clear();
    for (auto col : detail::split(parts.front(), ',')) {
        fmt.columns.push_back(parse_column(detail::trim(col)));
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto part = detail::trim(parts[i]);
        if (part.empty()) {
            continue;
        }
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("format setting '" + std::string(part) + "' lacks '='");
        }
        const auto key = detail::trim(part.substr(0, eq));
        const auto value = part.substr(eq + 1);
        if (key == "unit") {
            const auto v = detail::trim(value);
            if (v == "ms") fmt.unit = TimestampUnit::milliseconds;
            else if (v == "s") fmt.unit = TimestampUnit::seconds;
            else if (v == "iso") fmt.unit = TimestampUnit::iso8601;
            else throw ParseError("unknown timestamp unit '" + std::string(v) + "'");
        } else if (key == "delim") {
            if (value == "tab" || value == "\\t") fmt.delimiter = '\t';
            else if (value.size() == 1) fmt.delimiter = value.front();
            else throw ParseError("delimiter must be a single character");
        } else if (key == "header") {
            const auto v = detail::trim(value);
            fmt.header = (v == "1" || v == "true" || v == "yes");
        } else {
            throw ParseError("unknown format setting '" + std::string(key) + "'");
        }
    }
    int ts_cols = 0;
    bool has_bid = false;
    bool has_ask = false;
    bool has_trade = false;
    for (auto c : fmt.columns) {
        ts_cols += c == TickColumn::timestamp;
        has_bid |= c == TickColumn::bid;
        has_ask |= c == TickColumn::ask;
        has_trade |= c == TickColumn::trade_price;
    }
    if (ts_cols != 1) {
        throw ParseError("format must name exactly one timestamp column");
    }
    if (!has_trade && !(has_bid && has_ask)) {
        throw ParseError("format must provide a trade price or both bid and ask");
    }
    return fmt;
}

std::string TickFormat::descriptor() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += column_name(columns[i]);
    }
    out += ";unit=";
    out += unit == TimestampUnit::milliseconds ? "ms" : unit == TimestampUnit::seconds ? "s" : "iso";
    out += ";delim=";
    if (delimiter == '\t') out += "tab";
    else out += delimiter;
    out += header ? ";header=1" : ";header=0";
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::optional<EpochMs> parse_timestamp(std::string_view cell, TimestampUnit unit) {
    cell = detail::trim(cell);
    switch (unit) {
    case TimestampUnit::milliseconds:
        return detail::to_int<std::int64_t>(cell);
    case TimestampUnit::seconds: {
        if (auto whole = detail::to_int<std::int64_t>(cell)) {
            return *whole * kMsPerSecond;
        }
        const auto v = detail::to_double(cell);
        if (!v || !std::isfinite(*v)) {
            return std::nullopt;
        }
        return static_cast<EpochMs>(std::llround(*v * 1000.0));
    }
    case TimestampUnit::iso8601:
        try {
            return parse_iso8601(cell);
        } catch (const ParseError&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::optional<Tick> parse_row(std::string_view line, const TickFormat& fmt) {
    Tick tick;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(fmt.delimiter, start);
        const auto cell =
            line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        if (col >= fmt.columns.size()) {
            return std::nullopt;
        }
        const auto kind = fmt.columns[col];
        if (kind == TickColumn::timestamp) {
            const auto ts = parse_timestamp(cell, fmt.unit);
            if (!ts) return std::nullopt;
            tick.timestamp = *ts;
        } else if (kind != TickColumn::ignore) {
            const auto trimmed = detail::trim(cell);
            if (!trimmed.empty()) {
                const auto v = detail::to_double(trimmed);
                if (!v) return std::nullopt;
                if (kind == TickColumn::bid) tick.bid = *v;
                else if (kind == TickColumn::ask) tick.ask = *v;
                else tick.trade_price = *v;
            }
        }
        ++col;
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    if (col != fmt.columns.size() || !is_valid(tick)) {
        return std::nullopt;
    }
    return tick;
}

ParsedTicks parse_buffer(std::string_view text, const TickFormat& fmt, std::string asset_id) {
    ParsedTicks out;
    out.series.asset_id = std::move(asset_id);
    auto& ticks = out.series.ticks;
    auto& stats = out.stats;
    ticks.reserve(text.size() / 32);

    bool header_pending = fmt.header;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        ++stats.rows;
        const auto tick = parse_row(line, fmt);
        if (!tick) {
            ++stats.skipped_malformed;
            continue;
        }
        if (!ticks.empty()) {
            const EpochMs last = ticks.back().timestamp;
            if (tick->timestamp == last) {
                ticks.back() = *tick;
                ++stats.superseded_duplicates;
                continue;
            }
            if (tick->timestamp < last) {
                if (last - tick->timestamp > kReorderToleranceMs) {
                    throw ParseError("timestamp " + format_iso8601(tick->timestamp) +
                                     " precedes " + format_iso8601(last) + " by more than " +
                                     std::to_string(kReorderToleranceMs) + " ms (row " +
                                     std::to_string(stats.rows) + ")");
                }
                ++stats.dropped_reordered;
                continue;
            }
        }
        ticks.push_back(*tick);
    }
    if (stats.rows > 0 &&
        static_cast<double>(stats.skipped_malformed) > kMaxMalformedFraction * static_cast<double>(stats.rows)) {
        throw ParseError(std::to_string(stats.skipped_malformed) + " of " +
                         std::to_string(stats.rows) +
                         " rows are malformed; check the format descriptor '" + fmt.descriptor() + "'");
    }
    return out;
}

}  // namespace

ParsedTicks parse_ticks(std::istream& in, const TickFormat& format, std::string asset_id) {
    if (!in) {
        throw ParseError("unreadable tick stream");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw ParseError("error while reading tick stream");
    }
    const std::string text = std::move(buf).str();
    return parse_buffer(text, format, std::move(asset_id));
}

ParsedTicks parse_tick_file(const std::filesystem::path& path, const TickFormat& format,
                            std::string asset_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open tick file " + path.string());
    }
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::string text(size, '\0');
    in.read(text.data(), static_cast<std::streamsize>(size));
    if (!in) {
        throw ParseError("error while reading " + path.string());
    }
    if (asset_id.empty()) {
        asset_id = path.stem().string();
    }
    return parse_buffer(text, format, std::move(asset_id));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

void append_timestamp(std::string& out, EpochMs t, TimestampUnit unit) {
    switch (unit) {
    case TimestampUnit::milliseconds:
        out += std::to_string(t);
        break;
    case TimestampUnit::seconds: {
        if (t < 0) {
            out += '-';
            t = -t;
        }
        out += std::to_string(t / kMsPerSecond);
        if (const auto frac = t % kMsPerSecond; frac != 0) {
            char buf[8];
            std::snprintf(buf, sizeof buf, ".%03d", static_cast<int>(frac));
            out += buf;
        }
        break;
    }
    case TimestampUnit::iso8601:
        out += format_iso8601(t);
        break;
    }
}

}  // namespace

void serialize_ticks(std::ostream& os, const TickSeries& series, const TickFormat& format) {
    std::string out;
    out.reserve(64 * 1024);
    if (format.header) {
        for (std::size_t i = 0; i < format.columns.size(); ++i) {
            if (i) out += format.delimiter;
            out += column_name(format.columns[i]);
        }
        out += '\n';
    }
    for (const auto& tick : series.ticks) {
        for (std::size_t i = 0; i < format.columns.size(); ++i) {
            if (i) out += format.delimiter;
            switch (format.columns[i]) {
            case TickColumn::timestamp: append_timestamp(out, tick.timestamp, format.unit); break;
            case TickColumn::bid: if (tick.bid) detail::append_double(out, *tick.bid); break;
            case TickColumn::ask: if (tick.ask) detail::append_double(out, *tick.ask); break;
            case TickColumn::trade_price:
                if (tick.trade_price) detail::append_double(out, *tick.trade_price);
                break;
            case TickColumn::ignore: break;
            }
        }
        out += '\n';
        if (out.size() > 60 * 1024) {
            os.write(out.data(), static_cast<std::streamsize>(out.size()));
            out.clear();
        }
    }
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

TickSeries session_filter(const TickSeries& series, const TradingCalendar& calendar) {
    TickSeries out;
    out.asset_id = series.asset_id;
    if (series.empty() || calendar.empty()) {
        return out;
    }
    const auto sessions = calendar.sessions_between(series.ticks.front().timestamp,
                                                    series.ticks.back().timestamp + 1);
    out.ticks.reserve(series.size());
    std::size_t s = 0;
    for (const auto& tick : series.ticks) {
        while (s < sessions.size() && sessions[s].end <= tick.timestamp) {
            ++s;
        }
        if (s < sessions.size() && sessions[s].contains(tick.timestamp)) {
            out.ticks.push_back(tick);
        }
    }
    return out;
}

}  // namespace heavytails
