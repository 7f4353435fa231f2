#pragma once

#include "heavytails/calendar.hpp"
#include "heavytails/empirical_dist.hpp"
#include "heavytails/market_data.hpp"
#include "heavytails/sampling.hpp"
#include "heavytails/tail_models.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heavytails {

/// Equal-weight quote sum I(t) = sum_i P_i(t). The series behaves as a
/// price series, so log_returns applies directly.
struct IndexSeries {
    std::vector<std::string> constituent_ids;
    PriceSeries series;
};

/// Sums prices on the common part of the constituents' grids, at slots where
/// every constituent is defined. Two index slots are continuous only when
/// they are continuous in every constituent. Throws DomainError for an empty
/// set, differing dt or grids that are not aligned to a common slot phase.
IndexSeries build_index(std::span<const PriceSeries> constituents, std::string index_id = "INDEX");

struct IndexDtResult {
    std::int64_t dt_s = 0;
    std::optional<ReturnSeries> returns;
    std::optional<EmpiricalCcdf> ccdf;
    FitSet fits;
    std::string error;  ///< set when the dt could not be processed
    bool ok() const { return ccdf.has_value(); }
};

/// Per dt: optional tick-level excision, resampling, index construction,
/// normalized returns, CCDF and all tail fits. `calendars` holds one shared
/// calendar or one per constituent.
std::vector<IndexDtResult> index_tail_experiment(std::span<const TickSeries> constituents,
                                                 std::span<const std::int64_t> dt_list,
                                                 std::span<const TradingCalendar> calendars,
                                                 const std::optional<PeriodMask>& mask = std::nullopt,
                                                 const FitConfig& fit_config = {},
                                                 PriceBasis basis = PriceBasis::mid);

}  // namespace heavytails
