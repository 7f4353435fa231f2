#include "heavytails/index_builder.hpp"

#include "heavytails/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heavytails {

namespace {

// Segment number of every slot, -1 outside all segments.
std::vector<std::int64_t> segment_ids(const PriceSeries& s) {
    std::vector<std::int64_t> ids(s.size(), -1);
    for (std::size_t g = 0; g < s.segments.size(); ++g) {
        for (std::size_t k = s.segments[g].first; k <= s.segments[g].last; ++k) {
            ids[k] = static_cast<std::int64_t>(g);
        }
    }
    return ids;
}

}  // namespace

IndexSeries build_index(std::span<const PriceSeries> constituents, std::string index_id) {
    if (constituents.empty()) {
        throw DomainError("an index needs at least one constituent");
    }
    const std::int64_t dt_s = constituents.front().dt_s;
    const std::int64_t dt_ms = dt_s * kMsPerSecond;
    const EpochMs phase = constituents.front().grid_start;
    EpochMs start = std::numeric_limits<EpochMs>::min();
    EpochMs end = std::numeric_limits<EpochMs>::max();  // exclusive
    IndexSeries out;
    for (const auto& c : constituents) {
        if (c.dt_s != dt_s) {
            throw DomainError("index constituents must share dt");
        }
        if ((c.grid_start - phase) % dt_ms != 0) {
            throw DomainError("grid of " + c.asset_id + " is not aligned with " +
                              constituents.front().asset_id);
        }
        start = std::max(start, c.grid_start);
        end = std::min(end, c.slot_time(c.size()));
        out.constituent_ids.push_back(c.asset_id);
    }

    auto& s = out.series;
    s.asset_id = std::move(index_id);
    s.dt_s = dt_s;
    s.grid_start = start;
    const std::size_t n = end > start ? static_cast<std::size_t>((end - start) / dt_ms) : 0;
    s.prices.assign(n, std::numeric_limits<double>::quiet_NaN());
    s.defined_mask.assign(n, 0);

    std::vector<std::vector<std::int64_t>> seg_ids;
    std::vector<std::size_t> offsets;
    for (const auto& c : constituents) {
        seg_ids.push_back(segment_ids(c));
        offsets.push_back(static_cast<std::size_t>((start - c.grid_start) / dt_ms));
    }

    bool in_run = false;
    SlotRange run;
    for (std::size_t k = 0; k < n; ++k) {
        bool all_defined = true;
        bool continues = in_run;
        double sum = 0.0;
        for (std::size_t c = 0; c < constituents.size(); ++c) {
            const std::size_t kc = k + offsets[c];
            if (!constituents[c].defined(kc) || seg_ids[c][kc] < 0) {
                all_defined = false;
                break;
            }
            sum += constituents[c].prices[kc];
            if (continues && seg_ids[c][kc - 1] != seg_ids[c][kc]) {
                continues = false;
            }
        }
        if (!all_defined) {
            if (in_run) s.segments.push_back(run);
            in_run = false;
            continue;
        }
        s.prices[k] = sum;
        s.defined_mask[k] = 1;
        if (continues) {
            run.last = k;
        } else {
            if (in_run) s.segments.push_back(run);
            run = {k, k};
            in_run = true;
        }
    }
    if (in_run) s.segments.push_back(run);
    return out;
}

std::vector<IndexDtResult> index_tail_experiment(std::span<const TickSeries> constituents,
                                                 std::span<const std::int64_t> dt_list,
                                                 std::span<const TradingCalendar> calendars,
                                                 const std::optional<PeriodMask>& mask,
                                                 const FitConfig& fit_config, PriceBasis basis) {
    if (constituents.empty()) {
        throw DomainError("an index needs at least one constituent");
    }
    if (calendars.size() != 1 && calendars.size() != constituents.size()) {
        throw DomainError("need one shared calendar or one per constituent");
    }
    std::vector<TickSeries> excised;
    std::span<const TickSeries> ticks = constituents;
    if (mask && !mask->empty()) {
        excised.reserve(constituents.size());
        for (const auto& t : constituents) excised.push_back(excise(t, *mask));
        ticks = excised;
    }
    const PeriodMask no_mask;
    const PeriodMask& slot_mask = mask ? *mask : no_mask;

    std::vector<IndexDtResult> results;
    for (const auto dt : dt_list) {
        IndexDtResult r;
        r.dt_s = dt;
        try {
            std::vector<PriceSeries> prices;
            prices.reserve(ticks.size());
            for (std::size_t i = 0; i < ticks.size(); ++i) {
                const auto& cal = calendars.size() == 1 ? calendars[0] : calendars[i];
                prices.push_back(sample_prices(ticks[i], dt, cal, slot_mask, basis));
            }
            const auto index = build_index(prices);
            r.returns = normalize(log_returns(index.series));
            r.ccdf = build_ccdf(*r.returns);
            r.fits = fit_all(*r.ccdf, fit_config);
        } catch (const Error& e) {
            r.error = e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace heavytails
