#pragma once

#include "heavytails/sampling.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace heavytails {

/// One point of a complementary CDF: P(|r| >= x).
struct CcdfPoint {
    double x = 0.0;
    double p = 0.0;
    /// Number of observations >= x; 0 when the point does not come from a
    /// sample (model-generated points), which disables count weighting.
    std::size_t count = 0;
};

/// Rank-based (unbinned) distribution of absolute values with the closed
/// exceedance convention P(|r| >= x) = #{i : |r_i| >= x} / n, so the
/// largest observation carries probability 1/n.
class EmpiricalCcdf {
public:
    EmpiricalCcdf() = default;
    /// Takes absolute values and sorts them.
    explicit EmpiricalCcdf(std::span<const double> values);

    std::size_t size() const { return sorted_.size(); }
    bool empty() const { return sorted_.empty(); }
    const std::vector<double>& sorted_values() const { return sorted_; }

    double exceedance(double x) const;
    std::size_t count_at_least(double x) const;

    /// Every distinct value with its exceedance probability, ascending in x.
    std::vector<CcdfPoint> distinct_points() const;

    /// Samples below this size give meaningless tail fits.
    static constexpr std::size_t kRecommendedMinimum = 100;
    bool below_recommended_size() const { return sorted_.size() < kRecommendedMinimum; }

    /// CCDF of the pooled sample.
    friend EmpiricalCcdf merge(const EmpiricalCcdf& a, const EmpiricalCcdf& b);

private:
    std::vector<double> sorted_;
};

/// Throws InsufficientDataError on an empty series.
EmpiricalCcdf build_ccdf(const ReturnSeries& returns);
EmpiricalCcdf build_ccdf(std::span<const double> values);

inline constexpr std::size_t kMinTailPoints = 20;

/// Distinct-value points drawn from the ceil(tail_fraction * n) largest
/// observations, ties pooled into one point. Throws InsufficientDataError when
/// fewer than `min_observations` observations are selected.
std::vector<CcdfPoint> tail_points(const EmpiricalCcdf& ccdf, double tail_fraction,
                                   std::size_t min_observations = kMinTailPoints);

/// Distinct points whose exceedance probability lies in [p_min, p_max].
std::vector<CcdfPoint> region_points(const EmpiricalCcdf& ccdf, double p_min, double p_max);

/// Two-column "x P" text, one row per distinct value.
void write_ccdf(std::ostream& out, const EmpiricalCcdf& ccdf);

}  // namespace heavytails
