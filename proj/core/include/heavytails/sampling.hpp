#pragma once

#include "heavytails/calendar.hpp"
#include "heavytails/market_data.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace heavytails {

/// The five sampling intervals analysed by default: 1 s, 10 s, 1 min, 10 min, 1 h.
inline constexpr std::array<std::int64_t, 5> kDefaultDtGrid{1, 10, 60, 600, 3600};

/// Sorted, disjoint set of half-open UTC windows removed from analysis.
class PeriodMask {
public:
    PeriodMask() = default;
    /// Sorts the windows; throws DomainError on empty or overlapping windows.
    explicit PeriodMask(std::vector<UtcInterval> intervals);

    const std::vector<UtcInterval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }
    bool contains(EpochMs t) const;
    /// True when some window intersects the closed range [lo, hi].
    bool touches(EpochMs lo, EpochMs hi) const;

private:
    std::vector<UtcInterval> intervals_;
};

/// Inclusive range of slot indices over which prices are continuous: same
/// trading session, no excised window in between.
struct SlotRange {
    std::size_t first = 0;
    std::size_t last = 0;
    friend bool operator==(const SlotRange&, const SlotRange&) = default;
};

/// Evenly spaced previous-tick prices. Undefined slots hold NaN.
struct PriceSeries {
    std::string asset_id;
    std::int64_t dt_s = 0;
    EpochMs grid_start = 0;
    std::vector<double> prices;
    std::vector<std::uint8_t> defined_mask;
    std::vector<SlotRange> segments;

    std::size_t size() const { return prices.size(); }
    bool defined(std::size_t k) const { return defined_mask[k] != 0; }
    EpochMs slot_time(std::size_t k) const {
        return grid_start + static_cast<EpochMs>(k) * dt_s * kMsPerSecond;
    }
};

/// Raw log-returns R(t) = log P(t + dt) - log P(t), stamped with t.
struct RawReturns {
    std::string asset_id;
    std::int64_t dt_s = 0;
    std::vector<EpochMs> slot_times;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Normalized returns r = (R - mean) / std with the population standard
/// deviation, so the values have mean 0 and unit variance. The raw returns
/// are kept alongside for zero-return filtering.
struct ReturnSeries {
    std::string asset_id;
    std::int64_t dt_s = 0;
    double raw_mean = 0.0;
    double raw_std = 1.0;
    std::vector<double> values;
    std::vector<double> raw;
    std::vector<EpochMs> slot_times;

    std::size_t size() const { return values.size(); }
};

/// Previous-tick sampling on a grid anchored at the opening of the session
/// containing the first tick. A slot is defined when it lies inside a
/// session (closing instant included), outside every excluded window, and
/// some tick at or before it was seen since the last excluded window.
/// The grid ends at the first slot at or after the last tick, capped at the
/// close of that tick's session.
PriceSeries sample_prices(const TickSeries& ticks, std::int64_t dt_s,
                          const TradingCalendar& calendar, const PeriodMask& excluded = {},
                          PriceBasis basis = PriceBasis::mid);

/// One return per adjacent pair of defined slots within a segment.
RawReturns log_returns(const PriceSeries& prices);

/// Throws InsufficientDataError for fewer than two returns and
/// NormalizationError when every return is identical.
ReturnSeries normalize(const RawReturns& raw);

/// Wrap a plain sample as returns stamped at unit spacing, for feeding
/// synthetic draws through the distribution pipeline.
RawReturns make_raw_returns(std::span<const double> values, std::int64_t dt_s = 1,
                            EpochMs start = 0, std::string asset_id = {});

/// Drop ticks inside the mask.
TickSeries excise(const TickSeries& ticks, const PeriodMask& mask);

/// Mark masked slots undefined and split segments at masked windows.
/// Prices carried across a window are left as they are; resample from
/// excised ticks to avoid them.
PriceSeries excise(const PriceSeries& prices, const PeriodMask& mask);

/// Drop returns whose interval [t, t + dt] touches a masked window.
RawReturns excise(const RawReturns& returns, const PeriodMask& mask);

}  // namespace heavytails
