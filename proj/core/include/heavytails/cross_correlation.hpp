#pragma once

#include "heavytails/calendar.hpp"
#include "heavytails/market_data.hpp"
#include "heavytails/sampling.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace heavytails {

/// Which aligned slots are dropped for carrying a zero raw return.
enum class ZeroFilter {
    off,
    either,  ///< drop when either member of the pair is zero
    both,    ///< drop only when both are zero
};

/// Accepts off/false/no/0, either/on/true/yes/1 and both.
ZeroFilter parse_zero_filter(std::string_view text);
std::string_view to_string(ZeroFilter filter);

inline constexpr std::size_t kMinOverlap = 30;
inline constexpr double kMaxMissingPairFraction = 0.2;

/// Pearson coefficient over returns aligned on equal slot times. Throws
/// DomainError for different dt, InsufficientDataError when fewer than 30
/// pairs survive and NormalizationError when either side has zero variance.
double pearson(const ReturnSeries& a, const ReturnSeries& b, ZeroFilter filter = ZeroFilter::off);

struct CorrelationMatrix {
    std::vector<std::string> asset_ids;
    std::int64_t dt_s = 0;
    std::vector<double> entries;  ///< row-major N x N
    /// Pairs (i < j) that could not be estimated and were set to 0.
    std::vector<std::pair<std::size_t, std::size_t>> missing;

    std::size_t size() const { return asset_ids.size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries[i * size() + j]; }
};

/// Throws DomainError for fewer than two series or mixed dt, and
/// InsufficientDataError when more than 20% of the pairs are missing.
CorrelationMatrix correlation_matrix(std::span<const ReturnSeries> series,
                                     ZeroFilter filter = ZeroFilter::off);

/// Mean of the strictly lower triangle; requires N >= 2.
double mean_offdiag(const CorrelationMatrix& c);

struct EigenEstimate {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;  ///< seed of the start vector
};

inline constexpr std::uint64_t kEigenStartSeed = 0x5EED5EEDULL;
inline constexpr std::size_t kMaxPowerIterations = 100000;

/// Largest (algebraic) eigenvalue of a symmetric n x n row-major matrix by
/// power iteration on the Gershgorin-shifted matrix, with Rayleigh quotient
/// estimates. Stops when successive estimates differ by less than 1e-12 * n.
EigenEstimate largest_eigenvalue(std::span<const double> symmetric, std::size_t n,
                                 std::uint64_t seed = kEigenStartSeed);
EigenEstimate largest_eigenvalue(const CorrelationMatrix& c, std::uint64_t seed = kEigenStartSeed);

struct EppsCurve {
    std::vector<std::int64_t> dt_grid;
    std::vector<double> mean_coeff;
    std::vector<double> lambda_max;
    ZeroFilter zero_filter = ZeroFilter::off;
    std::vector<std::string> warnings;  ///< one per omitted dt
};

/// Per dt: resample, log-returns, normalize, correlation matrix, mean
/// off-diagonal. `calendars` holds either one shared calendar or one per
/// series. A dt whose computation fails is omitted with a warning.
EppsCurve epps_curve(std::span<const TickSeries> ticks, std::span<const std::int64_t> dt_grid,
                     std::span<const TradingCalendar> calendars, ZeroFilter filter,
                     const PeriodMask& excluded = {}, PriceBasis basis = PriceBasis::mid);

struct RollingOptions {
    std::int64_t window_ms = 30 * kMsPerDay;
    std::int64_t step_ms = kMsPerDay;
    ZeroFilter zero_filter = ZeroFilter::off;
};

struct RollingPoint {
    EpochMs window_end = 0;  ///< exclusive end of the window
    double mean_coeff = 0.0;
};

struct RollingResult {
    std::vector<RollingPoint> points;
    std::size_t skipped_windows = 0;
};

/// Windows [s, s + W) start at the earliest return time and advance by the
/// step while they fit inside the data span, which ends one dt after the
/// last return time. Throws InsufficientDataError
/// when the span is shorter than one window.
RollingResult rolling_mean_correlation(std::span<const ReturnSeries> series,
                                       const RollingOptions& options = {});

/// "dt_s mean_coeff lambda_max" rows.
void write_epps_curve(std::ostream& out, const EppsCurve& curve);
/// "window_end_ms mean_coeff" rows.
void write_rolling(std::ostream& out, const RollingResult& result);
/// Header row of asset ids, then one labelled row per asset.
void write_matrix(std::ostream& out, const CorrelationMatrix& c);

}  // namespace heavytails
