#include "heavytails/sampling.hpp"

#include "heavytails/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heavytails {

PeriodMask::PeriodMask(std::vector<UtcInterval> intervals) : intervals_(std::move(intervals)) {
    std::sort(intervals_.begin(), intervals_.end(),
              [](const UtcInterval& a, const UtcInterval& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (intervals_[i].end <= intervals_[i].start) {
            throw DomainError("empty excision window");
        }
        if (i > 0 && intervals_[i].start < intervals_[i - 1].end) {
            throw DomainError("overlapping excision windows");
        }
    }
}

bool PeriodMask::contains(EpochMs t) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](EpochMs v, const UtcInterval& iv) { return v < iv.start; });
    return it != intervals_.begin() && std::prev(it)->contains(t);
}

bool PeriodMask::touches(EpochMs lo, EpochMs hi) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), hi,
                               [](EpochMs v, const UtcInterval& iv) { return v < iv.start; });
    return it != intervals_.begin() && std::prev(it)->end > lo;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Walks mask windows in step with a monotone clock.
class MaskCursor {
public:
    explicit MaskCursor(const PeriodMask& mask) : iv_(mask.intervals()) {}

    void advance_to(EpochMs t) {
        while (next_ < iv_.size() && iv_[next_].start <= t) {
            ++next_;
        }
    }
    /// Latest window starting at or before the clock ends after `since`.
    bool touched_since(EpochMs since) const { return next_ > 0 && iv_[next_ - 1].end > since; }
    bool inside(EpochMs t) const { return next_ > 0 && iv_[next_ - 1].contains(t); }

private:
    const std::vector<UtcInterval>& iv_;
    std::size_t next_ = 0;
};

}  // namespace

PriceSeries sample_prices(const TickSeries& ticks, std::int64_t dt_s,
                          const TradingCalendar& calendar, const PeriodMask& excluded,
                          PriceBasis basis) {
    if (dt_s <= 0) {
        throw DomainError("sampling interval must be positive");
    }
    PriceSeries out;
    out.asset_id = ticks.asset_id;
    out.dt_s = dt_s;

    const auto& tk = ticks.ticks;
    std::size_t first_idx = 0;
    while (first_idx < tk.size() && excluded.contains(tk[first_idx].timestamp)) {
        ++first_idx;
    }
    if (first_idx == tk.size() || calendar.empty()) {
        return out;
    }
    std::size_t last_idx = tk.size() - 1;
    while (excluded.contains(tk[last_idx].timestamp)) {
        --last_idx;
    }
    const EpochMs first_ts = tk[first_idx].timestamp;
    const EpochMs last_ts = tk[last_idx].timestamp;
    const std::int64_t dt_ms = dt_s * kMsPerSecond;

    const auto pieces = calendar.session_pieces(first_ts - 8 * kMsPerDay, last_ts + 8 * kMsPerDay);
    const UtcInterval* anchor = nullptr;
    for (const auto& p : pieces) {
        if (p.start <= first_ts) {
            anchor = &p;
        }
        if (p.contains(first_ts)) {
            break;
        }
    }
    if (anchor == nullptr) {
        throw DomainError("first tick of " + ticks.asset_id + " precedes every session");
    }
    out.grid_start = anchor->start;
    const auto sessions = merge_intervals(pieces);

    EpochMs cap = std::numeric_limits<EpochMs>::max();
    for (const auto& s : sessions) {
        if (s.start <= last_ts && last_ts <= s.end) {
            cap = s.end;
            break;
        }
    }
    const std::int64_t span = last_ts - out.grid_start;
    std::int64_t n_slots = (span + dt_ms - 1) / dt_ms;
    if (out.grid_start + n_slots * dt_ms > cap) {
        n_slots = (cap - out.grid_start) / dt_ms;
    }
    const auto n = static_cast<std::size_t>(n_slots + 1);
    out.prices.assign(n, kNaN);
    out.defined_mask.assign(n, 0);

    MaskCursor mask(excluded);
    std::size_t ti = first_idx;
    bool have_tick = false;
    EpochMs carried_ts = 0;
    double carried_price = 0.0;
    std::size_t si = 0;
    std::size_t prev_session = std::numeric_limits<std::size_t>::max();
    bool in_run = false;
    SlotRange run;

    for (std::size_t k = 0; k < n; ++k) {
        const EpochMs t = out.slot_time(k);
        while (ti <= last_idx && tk[ti].timestamp <= t) {
            if (!excluded.empty() && excluded.contains(tk[ti].timestamp)) {
                ++ti;
                continue;
            }
            carried_price = tick_price(tk[ti], basis);
            if (!(carried_price > 0.0)) {
                throw DomainError("non-positive price in " + ticks.asset_id + " at " +
                                  format_iso8601(tk[ti].timestamp));
            }
            carried_ts = tk[ti].timestamp;
            have_tick = true;
            ++ti;
        }
        while (si < sessions.size() && sessions[si].end < t) {
            ++si;
        }
        const bool in_session = si < sessions.size() && sessions[si].start <= t;
        mask.advance_to(t);
        const bool masked = mask.inside(t);
        const bool carry_ok = have_tick && !mask.touched_since(carried_ts);

        if (in_session && !masked && carry_ok) {
            out.prices[k] = carried_price;
            out.defined_mask[k] = 1;
        }

        // Continuity: same merged session and no masked window since the
        // previous slot.
        const bool usable = in_session && !masked;
        const bool continues = usable && in_run && si == prev_session &&
                               !mask.touched_since(t - dt_ms);
        if (usable) {
            if (continues) {
                run.last = k;
            } else {
                if (in_run) out.segments.push_back(run);
                run = {k, k};
                in_run = true;
            }
            prev_session = si;
        } else if (in_run) {
            out.segments.push_back(run);
            in_run = false;
        }
    }
    if (in_run) {
        out.segments.push_back(run);
    }
    return out;
}

RawReturns log_returns(const PriceSeries& prices) {
    RawReturns out;
    out.asset_id = prices.asset_id;
    out.dt_s = prices.dt_s;
    for (const auto& seg : prices.segments) {
        double prev_log = 0.0;
        bool prev_ok = false;
        for (std::size_t k = seg.first; k <= seg.last; ++k) {
            if (!prices.defined(k)) {
                prev_ok = false;
                continue;
            }
            const double lp = std::log(prices.prices[k]);
            if (prev_ok) {
                out.slot_times.push_back(prices.slot_time(k - 1));
                out.values.push_back(lp - prev_log);
            }
            prev_log = lp;
            prev_ok = true;
        }
    }
    return out;
}

ReturnSeries normalize(const RawReturns& raw) {
    const std::size_t n = raw.values.size();
    if (n < 2) {
        throw InsufficientDataError("normalization needs at least two returns, got " +
                                    std::to_string(n));
    }
    const auto [lo, hi] = std::minmax_element(raw.values.begin(), raw.values.end());
    if (*lo == *hi) {
        throw NormalizationError("all " + std::to_string(n) + " returns of " + raw.asset_id +
                                 " are equal; standard deviation is zero");
    }
    long double sum = 0.0L;
    for (double v : raw.values) sum += v;
    const double mean = static_cast<double>(sum / static_cast<long double>(n));
    long double ss = 0.0L;
    for (double v : raw.values) {
        const long double d = static_cast<long double>(v) - mean;
        ss += d * d;
    }
    const double sd = static_cast<double>(std::sqrt(ss / static_cast<long double>(n)));

    ReturnSeries out;
    out.asset_id = raw.asset_id;
    out.dt_s = raw.dt_s;
    out.raw_mean = mean;
    out.raw_std = sd;
    out.raw = raw.values;
    out.slot_times = raw.slot_times;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = (raw.values[i] - mean) / sd;
    }
    return out;
}

RawReturns make_raw_returns(std::span<const double> values, std::int64_t dt_s, EpochMs start,
                            std::string asset_id) {
    RawReturns out;
    out.asset_id = std::move(asset_id);
    out.dt_s = dt_s;
    out.values.assign(values.begin(), values.end());
    out.slot_times.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.slot_times[i] = start + static_cast<EpochMs>(i) * dt_s * kMsPerSecond;
    }
    return out;
}

TickSeries excise(const TickSeries& ticks, const PeriodMask& mask) {
    if (mask.empty()) {
        return ticks;
    }
    TickSeries out;
    out.asset_id = ticks.asset_id;
    out.ticks.reserve(ticks.size());
    MaskCursor cur(mask);
    for (const auto& t : ticks.ticks) {
        cur.advance_to(t.timestamp);
        if (!cur.inside(t.timestamp)) {
            out.ticks.push_back(t);
        }
    }
    return out;
}

PriceSeries excise(const PriceSeries& prices, const PeriodMask& mask) {
    if (mask.empty()) {
        return prices;
    }
    PriceSeries out = prices;
    out.segments.clear();
    const std::int64_t dt_ms = prices.dt_s * kMsPerSecond;
    for (const auto& seg : prices.segments) {
        bool in_run = false;
        SlotRange run;
        for (std::size_t k = seg.first; k <= seg.last; ++k) {
            const EpochMs t = prices.slot_time(k);
            if (mask.contains(t)) {
                out.defined_mask[k] = 0;
                out.prices[k] = kNaN;
                if (in_run) out.segments.push_back(run);
                in_run = false;
                continue;
            }
            if (in_run && !mask.touches(t - dt_ms, t)) {
                run.last = k;
            } else {
                if (in_run) out.segments.push_back(run);
                run = {k, k};
                in_run = true;
            }
        }
        if (in_run) out.segments.push_back(run);
    }
    return out;
}

RawReturns excise(const RawReturns& returns, const PeriodMask& mask) {
    if (mask.empty()) {
        return returns;
    }
    RawReturns out;
    out.asset_id = returns.asset_id;
    out.dt_s = returns.dt_s;
    const std::int64_t dt_ms = returns.dt_s * kMsPerSecond;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const EpochMs t = returns.slot_times[i];
        if (!mask.touches(t, t + dt_ms)) {
            out.slot_times.push_back(t);
            out.values.push_back(returns.values[i]);
        }
    }
    return out;
}

}  // namespace heavytails
