#pragma once

#include "heavytails/sampling.hpp"

#include <filesystem>
#include <iosfwd>

namespace heavytails {

// Text layout: one metadata line starting with '#', a column header, then
// comma-separated rows. Times are epoch milliseconds; values are written in
// shortest round-trip form, so reading back is exact.
//
//   # price asset=X dt=60 grid_start=1514764800000 slots=1440
//   slot_time,segment,price          (defined slots only)
//
//   # returns asset=X dt=60 raw_mean=... raw_std=...
//   slot_time,raw,normalized

void write_price_series(std::ostream& out, const PriceSeries& series);
PriceSeries read_price_series(std::istream& in);

void write_return_series(std::ostream& out, const ReturnSeries& series);
ReturnSeries read_return_series(std::istream& in);

void save_price_series(const std::filesystem::path& path, const PriceSeries& series);
PriceSeries load_price_series(const std::filesystem::path& path);
void save_return_series(const std::filesystem::path& path, const ReturnSeries& series);
ReturnSeries load_return_series(const std::filesystem::path& path);

}  // namespace heavytails
