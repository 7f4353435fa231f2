#include "heavytails/series_io.hpp"

#include "heavytails/errors.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace heavytails {
namespace {

using Meta = std::map<std::string, std::string, std::less<>>;

Meta read_meta(std::istream& in, std::string_view kind) {
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#') {
        throw ParseError("missing series metadata line");
    }
    auto fields = detail::split(std::string_view(line).substr(1), ' ');
    Meta meta;
    bool kind_seen = false;
    for (auto f : fields) {
        f = detail::trim(f);
        if (f.empty()) continue;
        const auto eq = f.find('=');
        if (eq == std::string_view::npos) {
            if (f != kind) {
                throw ParseError("expected a " + std::string(kind) + " series, found '" +
                                 std::string(f) + "'");
            }
            kind_seen = true;
            continue;
        }
        meta.emplace(std::string(f.substr(0, eq)), std::string(f.substr(eq + 1)));
    }
    if (!kind_seen) {
        throw ParseError("series metadata lacks the '" + std::string(kind) + "' tag");
    }
    if (!std::getline(in, line)) {
        throw ParseError("missing series column header");
    }
    return meta;
}

template <class T>
T meta_number(const Meta& meta, std::string_view key) {
    auto it = meta.find(key);
    if (it == meta.end()) {
        throw ParseError("series metadata lacks '" + std::string(key) + "'");
    }
    std::optional<T> v;
    if constexpr (std::is_floating_point_v<T>) {
        v = detail::to_double(it->second);
    } else {
        v = detail::to_int<T>(it->second);
    }
    if (!v) {
        throw ParseError("bad metadata value for '" + std::string(key) + "'");
    }
    return *v;
}

std::vector<std::string_view> row_fields(std::string_view line, std::size_t expected,
                                         std::size_t line_no) {
    auto fields = detail::split(line, ',');
    if (fields.size() != expected) {
        throw ParseError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(expected) + " columns");
    }
    return fields;
}

double need_double(std::string_view s, std::size_t line_no) {
    auto v = detail::to_double(detail::trim(s));
    if (!v) throw ParseError("line " + std::to_string(line_no) + ": bad number");
    return *v;
}

template <class Int>
Int need_int(std::string_view s, std::size_t line_no) {
    auto v = detail::to_int<Int>(detail::trim(s));
    if (!v) throw ParseError("line " + std::to_string(line_no) + ": bad integer");
    return *v;
}

}  // namespace

void write_price_series(std::ostream& out, const PriceSeries& series) {
    std::string buf = "# price asset=" + series.asset_id + " dt=" + std::to_string(series.dt_s) +
                      " grid_start=" + std::to_string(series.grid_start) +
                      " slots=" + std::to_string(series.size()) + "\nslot_time,segment,price\n";
    for (std::size_t s = 0; s < series.segments.size(); ++s) {
        const auto& seg = series.segments[s];
        for (std::size_t k = seg.first; k <= seg.last; ++k) {
            if (!series.defined(k)) continue;
            buf += std::to_string(series.slot_time(k));
            buf += ',';
            buf += std::to_string(s);
            buf += ',';
            detail::append_double(buf, series.prices[k]);
            buf += '\n';
        }
    }
    out << buf;
}

PriceSeries read_price_series(std::istream& in) {
    const Meta meta = read_meta(in, "price");
    PriceSeries out;
    if (auto it = meta.find("asset"); it != meta.end()) out.asset_id = it->second;
    out.dt_s = meta_number<std::int64_t>(meta, "dt");
    out.grid_start = meta_number<EpochMs>(meta, "grid_start");
    const auto slots = meta_number<std::size_t>(meta, "slots");
    if (out.dt_s <= 0) throw ParseError("series dt must be positive");
    out.prices.assign(slots, std::numeric_limits<double>::quiet_NaN());
    out.defined_mask.assign(slots, 0);

    // Segments are rebuilt from the slots they contain; undefined slots at a
    // segment's edges are not recorded, which does not affect returns.
    std::string line;
    std::size_t line_no = 2;
    std::optional<std::size_t> current_id;
    const std::int64_t dt_ms = out.dt_s * kMsPerSecond;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto f = row_fields(line, 3, line_no);
        const auto t = need_int<EpochMs>(f[0], line_no);
        const auto seg = need_int<std::size_t>(f[1], line_no);
        const double p = need_double(f[2], line_no);
        const auto offset = t - out.grid_start;
        if (offset < 0 || offset % dt_ms != 0 || static_cast<std::size_t>(offset / dt_ms) >= slots) {
            throw ParseError("line " + std::to_string(line_no) + ": slot time off the grid");
        }
        const auto k = static_cast<std::size_t>(offset / dt_ms);
        out.prices[k] = p;
        out.defined_mask[k] = 1;
        if (current_id && *current_id == seg) {
            out.segments.back().last = k;
        } else {
            out.segments.push_back({k, k});
            current_id = seg;
        }
    }
    return out;
}

void write_return_series(std::ostream& out, const ReturnSeries& series) {
    std::string buf = "# returns asset=" + series.asset_id + " dt=" + std::to_string(series.dt_s) +
                      " raw_mean=" + detail::format_double(series.raw_mean) +
                      " raw_std=" + detail::format_double(series.raw_std) +
                      "\nslot_time,raw,normalized\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        buf += std::to_string(series.slot_times[i]);
        buf += ',';
        detail::append_double(buf, series.raw[i]);
        buf += ',';
        detail::append_double(buf, series.values[i]);
        buf += '\n';
    }
    out << buf;
}

ReturnSeries read_return_series(std::istream& in) {
    const Meta meta = read_meta(in, "returns");
    ReturnSeries out;
    if (auto it = meta.find("asset"); it != meta.end()) out.asset_id = it->second;
    out.dt_s = meta_number<std::int64_t>(meta, "dt");
    out.raw_mean = meta_number<double>(meta, "raw_mean");
    out.raw_std = meta_number<double>(meta, "raw_std");
    std::string line;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto f = row_fields(line, 3, line_no);
        out.slot_times.push_back(need_int<EpochMs>(f[0], line_no));
        out.raw.push_back(need_double(f[1], line_no));
        out.values.push_back(need_double(f[2], line_no));
    }
    return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return in;
}

}  // namespace

void save_price_series(const std::filesystem::path& path, const PriceSeries& series) {
    auto out = open_out(path);
    write_price_series(out, series);
}

PriceSeries load_price_series(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_price_series(in);
}

void save_return_series(const std::filesystem::path& path, const ReturnSeries& series) {
    auto out = open_out(path);
    write_return_series(out, series);
}

ReturnSeries load_return_series(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_return_series(in);
}

}  // namespace heavytails
