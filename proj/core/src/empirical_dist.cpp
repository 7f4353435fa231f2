#include "heavytails/empirical_dist.hpp"

#include "heavytails/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace heavytails {

EmpiricalCcdf::EmpiricalCcdf(std::span<const double> values) : sorted_(values.size()) {
    std::transform(values.begin(), values.end(), sorted_.begin(),
                   [](double v) { return std::fabs(v); });
    std::sort(sorted_.begin(), sorted_.end());
}

std::size_t EmpiricalCcdf::count_at_least(double x) const {
    return static_cast<std::size_t>(
        sorted_.end() - std::lower_bound(sorted_.begin(), sorted_.end(), x));
}

double EmpiricalCcdf::exceedance(double x) const {
    if (sorted_.empty()) {
        return 0.0;
    }
    return static_cast<double>(count_at_least(x)) / static_cast<double>(sorted_.size());
}

std::vector<CcdfPoint> EmpiricalCcdf::distinct_points() const {
    std::vector<CcdfPoint> out;
    const auto n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size();) {
        std::size_t j = i;
        while (j < sorted_.size() && sorted_[j] == sorted_[i]) ++j;
        const std::size_t count = sorted_.size() - i;
        out.push_back({sorted_[i], static_cast<double>(count) / n, count});
        i = j;
    }
    return out;
}

EmpiricalCcdf merge(const EmpiricalCcdf& a, const EmpiricalCcdf& b) {
    EmpiricalCcdf out;
    out.sorted_.resize(a.size() + b.size());
    std::merge(a.sorted_.begin(), a.sorted_.end(), b.sorted_.begin(), b.sorted_.end(),
               out.sorted_.begin());
    return out;
}

EmpiricalCcdf build_ccdf(std::span<const double> values) {
    if (values.empty()) {
        throw InsufficientDataError("cannot build a CCDF from an empty sample");
    }
    return EmpiricalCcdf(values);
}

EmpiricalCcdf build_ccdf(const ReturnSeries& returns) { return build_ccdf(returns.values); }

std::vector<CcdfPoint> tail_points(const EmpiricalCcdf& ccdf, double tail_fraction,
                                   std::size_t min_observations) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw DomainError("tail fraction must lie in (0, 1]");
    }
    const std::size_t n = ccdf.size();
    // Guard against 0.01 * 1000 landing a hair above 10.
    const auto m = static_cast<std::size_t>(
        std::ceil(tail_fraction * static_cast<double>(n) - 1e-9));
    if (m < min_observations || m == 0) {
        throw InsufficientDataError("tail region holds " + std::to_string(m) +
                                    " observations; need at least " +
                                    std::to_string(std::max<std::size_t>(min_observations, 1)));
    }
    const auto& v = ccdf.sorted_values();
    const auto nd = static_cast<double>(n);
    std::vector<CcdfPoint> out;
    std::size_t i = n - m;
    // The cut may fall inside a run of ties; start the run at its first member.
    i = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), v[i]) - v.begin());
    while (i < n) {
        std::size_t j = i;
        while (j < n && v[j] == v[i]) ++j;
        const std::size_t count = n - i;
        out.push_back({v[i], static_cast<double>(count) / nd, count});
        i = j;
    }
    return out;
}

std::vector<CcdfPoint> region_points(const EmpiricalCcdf& ccdf, double p_min, double p_max) {
    std::vector<CcdfPoint> out;
    for (const auto& pt : ccdf.distinct_points()) {
        if (pt.p >= p_min && pt.p <= p_max) {
            out.push_back(pt);
        }
    }
    return out;
}

void write_ccdf(std::ostream& os, const EmpiricalCcdf& ccdf) {
    std::string out = "# x P(|r|>=x)\n";
    for (const auto& pt : ccdf.distinct_points()) {
        detail::append_double(out, pt.x);
        out += ' ';
        detail::append_double(out, pt.p);
        out += '\n';
    }
    os << out;
}

}  // namespace heavytails
