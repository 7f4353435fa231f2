#include "heavytails/cross_correlation.hpp"

#include "heavytails/errors.hpp"
#include "heavytails/rng.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace heavytails {

ZeroFilter parse_zero_filter(std::string_view text) {
    text = detail::trim(text);
    for (auto s : {"off", "false", "no", "0"}) {
        if (detail::iequals(text, s)) return ZeroFilter::off;
    }
    for (auto s : {"either", "on", "true", "yes", "1"}) {
        if (detail::iequals(text, s)) return ZeroFilter::either;
    }
    if (detail::iequals(text, "both")) return ZeroFilter::both;
    throw ParseError("unknown zero filter '" + std::string(text) + "'");
}

std::string_view to_string(ZeroFilter filter) {
    switch (filter) {
        case ZeroFilter::off: return "off";
        case ZeroFilter::either: return "either";
        case ZeroFilter::both: return "both";
    }
    return "off";
}

namespace {

// View over a contiguous time range of a ReturnSeries.
struct ReturnView {
    const ReturnSeries* series;
    std::size_t lo;
    std::size_t hi;
};

ReturnView full_view(const ReturnSeries& s) { return {&s, 0, s.size()}; }

double pearson_view(const ReturnView& a, const ReturnView& b, ZeroFilter filter) {
    const auto& sa = *a.series;
    const auto& sb = *b.series;
    if (sa.dt_s != sb.dt_s) {
        throw DomainError("pearson needs series with equal dt");
    }
    const bool raw_a = sa.raw.size() == sa.values.size();
    const bool raw_b = sb.raw.size() == sb.values.size();
    std::vector<double> xa;
    std::vector<double> xb;
    std::size_t i = a.lo;
    std::size_t j = b.lo;
    while (i < a.hi && j < b.hi) {
        const EpochMs ta = sa.slot_times[i];
        const EpochMs tb = sb.slot_times[j];
        if (ta < tb) {
            ++i;
        } else if (tb < ta) {
            ++j;
        } else {
            if (filter != ZeroFilter::off) {
                const bool za = (raw_a ? sa.raw[i] : sa.values[i]) == 0.0;
                const bool zb = (raw_b ? sb.raw[j] : sb.values[j]) == 0.0;
                const bool drop = filter == ZeroFilter::either ? (za || zb) : (za && zb);
                if (drop) {
                    ++i;
                    ++j;
                    continue;
                }
            }
            xa.push_back(sa.values[i]);
            xb.push_back(sb.values[j]);
            ++i;
            ++j;
        }
    }
    const std::size_t n = xa.size();
    if (n < kMinOverlap) {
        throw InsufficientDataError("only " + std::to_string(n) + " aligned returns for " +
                                    sa.asset_id + "/" + sb.asset_id + ", need " +
                                    std::to_string(kMinOverlap));
    }
    long double ma = 0.0L;
    long double mb = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        ma += xa[k];
        mb += xb[k];
    }
    ma /= static_cast<long double>(n);
    mb /= static_cast<long double>(n);
    long double saa = 0.0L;
    long double sbb = 0.0L;
    long double sab = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        const long double da = xa[k] - ma;
        const long double db = xb[k] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0L || sbb == 0.0L) {
        throw NormalizationError("zero variance after alignment for " + sa.asset_id + "/" +
                                 sb.asset_id);
    }
    const double r = static_cast<double>(sab / std::sqrt(saa * sbb));
    return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix matrix_from_views(std::span<const ReturnView> views, ZeroFilter filter) {
    const std::size_t n = views.size();
    if (n < 2) {
        throw DomainError("a correlation matrix needs at least two series");
    }
    CorrelationMatrix c;
    c.dt_s = views[0].series->dt_s;
    for (const auto& v : views) {
        if (v.series->dt_s != c.dt_s) {
            throw DomainError("correlation matrix series must share dt");
        }
        c.asset_ids.push_back(v.series->asset_id);
    }
    c.entries.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        c.entries[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double r = 0.0;
            try {
                r = pearson_view(views[i], views[j], filter);
            } catch (const InsufficientDataError&) {
                c.missing.emplace_back(i, j);
            } catch (const NormalizationError&) {
                c.missing.emplace_back(i, j);
            }
            c.entries[i * n + j] = r;
            c.entries[j * n + i] = r;
        }
    }
    const double pairs = static_cast<double>(n * (n - 1) / 2);
    if (static_cast<double>(c.missing.size()) > kMaxMissingPairFraction * pairs) {
        throw InsufficientDataError(std::to_string(c.missing.size()) + " of " +
                                    std::to_string(n * (n - 1) / 2) +
                                    " correlation pairs lack sufficient overlap");
    }
    return c;
}

}  // namespace

double pearson(const ReturnSeries& a, const ReturnSeries& b, ZeroFilter filter) {
    return pearson_view(full_view(a), full_view(b), filter);
}

CorrelationMatrix correlation_matrix(std::span<const ReturnSeries> series, ZeroFilter filter) {
    std::vector<ReturnView> views;
    views.reserve(series.size());
    for (const auto& s : series) views.push_back(full_view(s));
    return matrix_from_views(views, filter);
}

double mean_offdiag(const CorrelationMatrix& c) {
    const std::size_t n = c.size();
    if (n < 2) {
        throw DomainError("mean off-diagonal needs N >= 2");
    }
    long double sum = 0.0L;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) sum += c(i, j);
    }
    return static_cast<double>(sum / static_cast<long double>(n * (n - 1) / 2));
}

EigenEstimate largest_eigenvalue(std::span<const double> a, std::size_t n, std::uint64_t seed) {
    if (n == 0 || a.size() != n * n) {
        throw DomainError("eigenvalue input must be a non-empty square matrix");
    }
    EigenEstimate est;
    est.seed = seed;
    // Shift so every eigenvalue is non-negative; the largest algebraic
    // eigenvalue then dominates in magnitude.
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) radius += std::abs(a[i * n + j]);
        }
        shift = std::max(shift, radius - a[i * n + i]);
    }

    SplitMix64 rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform() + 0.5;
    auto normalize_vec = [](std::vector<double>& x) {
        double s = 0.0;
        for (double e : x) s += e * e;
        s = std::sqrt(s);
        for (auto& e : x) e /= s;
    };
    normalize_vec(v);

    std::vector<double> w(n);
    const double tol = 1e-12 * static_cast<double>(n);
    double prev = 0.0;
    for (std::size_t it = 1; it <= kMaxPowerIterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = shift * v[i];
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * v[j];
            w[i] = s;
        }
        double rq = 0.0;
        for (std::size_t i = 0; i < n; ++i) rq += v[i] * w[i];
        est.value = rq - shift;
        est.iterations = it;
        double norm = 0.0;
        for (double e : w) norm += e * e;
        if (norm == 0.0) {
            // Shifted matrix annihilates v: the spectrum is {-shift} only.
            est.converged = true;
            return est;
        }
        v = w;
        normalize_vec(v);
        if (it > 1 && std::abs(est.value - prev) < tol) {
            est.converged = true;
            break;
        }
        prev = est.value;
    }
    return est;
}

EigenEstimate largest_eigenvalue(const CorrelationMatrix& c, std::uint64_t seed) {
    return largest_eigenvalue(c.entries, c.size(), seed);
}

EppsCurve epps_curve(std::span<const TickSeries> ticks, std::span<const std::int64_t> dt_grid,
                     std::span<const TradingCalendar> calendars, ZeroFilter filter,
                     const PeriodMask& excluded, PriceBasis basis) {
    if (!std::is_sorted(dt_grid.begin(), dt_grid.end()) ||
        std::adjacent_find(dt_grid.begin(), dt_grid.end()) != dt_grid.end()) {
        throw DomainError("dt grid must be strictly ascending");
    }
    if (calendars.size() != 1 && calendars.size() != ticks.size()) {
        throw DomainError("need one shared calendar or one per series");
    }
    EppsCurve curve;
    curve.zero_filter = filter;
    for (const auto dt : dt_grid) {
        try {
            std::vector<ReturnSeries> returns;
            returns.reserve(ticks.size());
            for (std::size_t i = 0; i < ticks.size(); ++i) {
                const auto& cal = calendars.size() == 1 ? calendars[0] : calendars[i];
                returns.push_back(normalize(log_returns(sample_prices(ticks[i], dt, cal, excluded, basis))));
            }
            const auto c = correlation_matrix(returns, filter);
            curve.dt_grid.push_back(dt);
            curve.mean_coeff.push_back(mean_offdiag(c));
            curve.lambda_max.push_back(largest_eigenvalue(c).value);
        } catch (const Error& e) {
            curve.warnings.push_back("dt=" + std::to_string(dt) + " s omitted: " + e.what());
        }
    }
    return curve;
}

RollingResult rolling_mean_correlation(std::span<const ReturnSeries> series,
                                       const RollingOptions& options) {
    if (options.window_ms <= 0 || options.step_ms <= 0) {
        throw DomainError("rolling window and step must be positive");
    }
    if (series.size() < 2) {
        throw DomainError("rolling correlation needs at least two series");
    }
    EpochMs t0 = 0;
    EpochMs t1 = 0;
    bool any = false;
    for (const auto& s : series) {
        if (s.slot_times.empty()) continue;
        t0 = any ? std::min(t0, s.slot_times.front()) : s.slot_times.front();
        // a return stamped t covers [t, t + dt)
        const EpochMs end = s.slot_times.back() + s.dt_s * kMsPerSecond;
        t1 = any ? std::max(t1, end) : end;
        any = true;
    }
    if (!any || t1 - t0 < options.window_ms) {
        throw InsufficientDataError("return span is shorter than the rolling window");
    }
    RollingResult result;
    std::vector<ReturnView> views(series.size());
    for (EpochMs ws = t0; ws + options.window_ms <= t1; ws += options.step_ms) {
        const EpochMs we = ws + options.window_ms;
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& times = series[i].slot_times;
            const auto lo = std::lower_bound(times.begin(), times.end(), ws) - times.begin();
            const auto hi = std::lower_bound(times.begin(), times.end(), we) - times.begin();
            views[i] = {&series[i], static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
        }
        try {
            const auto c = matrix_from_views(views, options.zero_filter);
            result.points.push_back({we, mean_offdiag(c)});
        } catch (const InsufficientDataError&) {
            ++result.skipped_windows;
        }
    }
    return result;
}

void write_epps_curve(std::ostream& out, const EppsCurve& curve) {
    std::string buf = "# dt_s mean_coeff lambda_max zero_filter=";
    buf += to_string(curve.zero_filter);
    buf += '\n';
    for (std::size_t i = 0; i < curve.dt_grid.size(); ++i) {
        buf += std::to_string(curve.dt_grid[i]);
        buf += ' ';
        detail::append_double(buf, curve.mean_coeff[i]);
        buf += ' ';
        detail::append_double(buf, curve.lambda_max[i]);
        buf += '\n';
    }
    out << buf;
}

void write_rolling(std::ostream& out, const RollingResult& result) {
    std::string buf = "# window_end_ms mean_coeff skipped=" + std::to_string(result.skipped_windows) + "\n";
    for (const auto& p : result.points) {
        buf += std::to_string(p.window_end);
        buf += ' ';
        detail::append_double(buf, p.mean_coeff);
        buf += '\n';
    }
    out << buf;
}

void write_matrix(std::ostream& out, const CorrelationMatrix& c) {
    std::string buf = "asset";
    for (const auto& id : c.asset_ids) {
        buf += ' ';
        buf += id;
    }
    buf += '\n';
    for (std::size_t i = 0; i < c.size(); ++i) {
        buf += c.asset_ids[i];
        for (std::size_t j = 0; j < c.size(); ++j) {
            buf += ' ';
            detail::append_double(buf, c(i, j));
        }
        buf += '\n';
    }
    out << buf;
}

}  // namespace heavytails
