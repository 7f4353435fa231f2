#include "heavytails/cross_correlation.hpp"
#include "heavytails/errors.hpp"
#include "heavytails/sampling.hpp"
#include "heavytails/synth.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace heavytails;

namespace {

ReturnSeries series_from(const std::vector<double>& v, std::string id, std::int64_t dt_s = 600,
                         EpochMs start = 0) {
    return normalize(make_raw_returns(v, dt_s, start, std::move(id)));
}

std::vector<ReturnSeries> factor_series(std::size_t n_assets, std::size_t n, double rho, unsigned seed,
                                        std::int64_t dt_s = 600) {
    const auto raw = oracle::factor_returns(n_assets, n, rho, seed);
    std::vector<ReturnSeries> out;
    for (std::size_t i = 0; i < n_assets; ++i) out.push_back(series_from(raw[i], "S" + std::to_string(i), dt_s));
    return out;
}

CorrelationMatrix manual_matrix(std::size_t n, const std::vector<double>& entries) {
    CorrelationMatrix c;
    for (std::size_t i = 0; i < n; ++i) c.asset_ids.push_back("A" + std::to_string(i));
    c.entries = entries;
    return c;
}

}  // namespace

TEST(ZeroFilterNames, Parse) {
    EXPECT_EQ(parse_zero_filter("off"), ZeroFilter::off);
    EXPECT_EQ(parse_zero_filter("false"), ZeroFilter::off);
    EXPECT_EQ(parse_zero_filter("true"), ZeroFilter::either);
    EXPECT_EQ(parse_zero_filter("either"), ZeroFilter::either);
    EXPECT_EQ(parse_zero_filter("both"), ZeroFilter::both);
    EXPECT_THROW(parse_zero_filter("sometimes"), Error);
    EXPECT_EQ(to_string(ZeroFilter::both), "both");
}

TEST(Pearson, SelfAndAntiCorrelation) {
    const auto v = generate(StudentTDist{4.0}, 5000, 1);
    std::vector<double> neg(v.size());
    std::transform(v.begin(), v.end(), neg.begin(), [](double x) { return -x; });
    const auto a = series_from(v, "a");
    EXPECT_NEAR(pearson(a, a), 1.0, 1e-14);
    EXPECT_NEAR(pearson(a, series_from(neg, "b")), -1.0, 1e-14);
}

TEST(Pearson, BivariateNormal) {
    const std::size_t n = 100000;
    const auto z1 = generate(GaussianDist{}, n, 11);
    const auto z2 = generate(GaussianDist{}, n, 12);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.6 * z1[i] + 0.8 * z2[i];
    const double r = pearson(series_from(z1, "x"), series_from(y, "y"));
    EXPECT_GE(r, 0.594);
    EXPECT_LE(r, 0.606);
}

TEST(Pearson, SymmetricAndAffineInvariant) {
    const auto raw = oracle::factor_returns(2, 4000, 0.4, 3);
    auto a = series_from(raw[0], "a");
    const auto b = series_from(raw[1], "b");
    const double r = pearson(a, b);
    EXPECT_EQ(r, pearson(b, a));
    for (auto& v : a.values) v = 3.5 * v + 2.0;
    EXPECT_NEAR(pearson(a, b), r, 1e-12);
}

TEST(Pearson, AlignsOnSlotTimes) {
    const auto raw = oracle::factor_returns(2, 3000, 0.5, 9);
    const auto a = series_from(raw[0], "a");
    // b starts 1000 slots later; only the overlap should count.
    std::vector<double> tail(raw[1].begin() + 1000, raw[1].end());
    const auto b = series_from(tail, "b", 600, 1000 * 600 * kMsPerSecond);
    std::vector<double> head(raw[0].begin() + 1000, raw[0].end());
    const double expect = pearson(series_from(head, "a2", 600, 1000 * 600 * kMsPerSecond), b);
    EXPECT_NEAR(pearson(a, b), expect, 1e-12);
}

TEST(Pearson, Errors) {
    const auto v = generate(GaussianDist{}, 100, 2);
    EXPECT_THROW(pearson(series_from(v, "a", 60), series_from(v, "b", 600)), DomainError);
    const std::vector<double> short_v(v.begin(), v.begin() + 20);
    EXPECT_THROW(pearson(series_from(short_v, "a"), series_from(short_v, "b")), InsufficientDataError);
    ReturnSeries flat = series_from(v, "c");
    std::fill(flat.values.begin(), flat.values.end(), 0.0);
    EXPECT_THROW(pearson(series_from(v, "a"), flat), NormalizationError);
}

TEST(Pearson, ZeroFilterDropsPairs) {
    auto raw = oracle::factor_returns(2, 3000, 0.5, 5);
    for (std::size_t i = 0; i < 3000; i += 7) raw[0][i] = 0.0;
    for (std::size_t i = 0; i < 3000; i += 11) raw[1][i] = 0.0;
    const auto a = series_from(raw[0], "a");
    const auto b = series_from(raw[1], "b");

    const auto oracle_r = [&](auto keep) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < 3000; ++i) {
            if (keep(raw[0][i], raw[1][i])) {
                x.push_back(a.values[i]);
                y.push_back(b.values[i]);
            }
        }
        const double mx = oracle::mean(x), my = oracle::mean(y);
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        return sxy / std::sqrt(sxx * syy);
    };
    EXPECT_NEAR(pearson(a, b, ZeroFilter::either), oracle_r([](double p, double q) { return p != 0 && q != 0; }),
                1e-12);
    EXPECT_NEAR(pearson(a, b, ZeroFilter::both), oracle_r([](double p, double q) { return p != 0 || q != 0; }),
                1e-12);
    EXPECT_NEAR(pearson(a, b, ZeroFilter::off), oracle_r([](double, double) { return true; }), 1e-12);
}

TEST(Pearson, ZeroFilterNoOpWithoutZeros) {
    const auto s = factor_series(2, 5000, 0.3, 8);
    EXPECT_EQ(pearson(s[0], s[1], ZeroFilter::off), pearson(s[0], s[1], ZeroFilter::either));
    EXPECT_EQ(pearson(s[0], s[1], ZeroFilter::off), pearson(s[0], s[1], ZeroFilter::both));
}

TEST(CorrelationMatrix, IdenticalPair) {
    const auto v = generate(GaussianDist{}, 1000, 4);
    const std::vector<ReturnSeries> s{series_from(v, "a"), series_from(v, "b")};
    const auto c = correlation_matrix(s);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(c(i, j), 1.0, 1e-14);
    EXPECT_TRUE(c.missing.empty());
}

TEST(CorrelationMatrix, IndependentNull) {
    const auto c = correlation_matrix(factor_series(3, 100000, 0.0, 21));
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(c(i, i), 1.0);
        for (std::size_t j = 0; j < i; ++j) {
            EXPECT_NEAR(c(i, j), 0.0, 0.01);
            EXPECT_EQ(c(i, j), c(j, i));
        }
    }
}

TEST(CorrelationMatrix, FactorModel) {
    const auto c = correlation_matrix(factor_series(30, 100000, 0.3, 22));
    const double m = mean_offdiag(c);
    EXPECT_GE(m, 0.29);
    EXPECT_LE(m, 0.31);
    // Factor loading squared, which is rho here.
    EXPECT_NEAR(m, 0.3, 0.01);
}

TEST(CorrelationMatrix, MissingPairs) {
    auto s = factor_series(6, 2000, 0.3, 23);
    // Asset 5 overlaps nobody: 5 of 15 pairs missing.
    for (auto& t : s[5].slot_times) t += 10000LL * 600 * kMsPerSecond;
    EXPECT_THROW(correlation_matrix(s), InsufficientDataError);
    // Only the 4-5 pair missing when asset 5 overlaps the first four only.
    s = factor_series(6, 2000, 0.3, 23);
    s[4].slot_times.resize(1000);
    s[4].values.resize(1000);
    s[4].raw.resize(1000);
    for (std::size_t k = 0; k < 1000; ++k) s[5].slot_times[k] += 1000LL * 600 * kMsPerSecond;
    s[5].slot_times.resize(1000);
    s[5].values.resize(1000);
    s[5].raw.resize(1000);
    const auto c = correlation_matrix(s);
    ASSERT_EQ(c.missing.size(), 1u);
    EXPECT_EQ(c(4, 5), 0.0);
    EXPECT_EQ(c(5, 4), 0.0);
    EXPECT_THROW(correlation_matrix(std::span<const ReturnSeries>(s.data(), 1)), DomainError);
}

TEST(MeanOffdiag, HandValues) {
    EXPECT_EQ(mean_offdiag(manual_matrix(3, {1, 0, 0, 0, 1, 0, 0, 0, 1})), 0.0);
    EXPECT_EQ(mean_offdiag(manual_matrix(2, {1, 1, 1, 1})), 1.0);
    EXPECT_NEAR(mean_offdiag(manual_matrix(3, {1, 0.1, 0.2, 0.1, 1, 0.3, 0.2, 0.3, 1})), 0.2, 1e-15);
}

TEST(LargestEigenvalue, IdentityAndCompoundSymmetry) {
    std::vector<double> id(25, 0.0);
    for (int i = 0; i < 5; ++i) id[i * 6] = 1.0;
    EXPECT_NEAR(largest_eigenvalue(id, 5).value, 1.0, 1e-12);

    const std::size_t n = 30;
    std::vector<double> cs(n * n, 0.3);
    for (std::size_t i = 0; i < n; ++i) cs[i * n + i] = 1.0;
    const auto e = largest_eigenvalue(cs, n);
    EXPECT_TRUE(e.converged);
    EXPECT_EQ(e.seed, kEigenStartSeed);
    EXPECT_NEAR(e.value, 1.0 + 29 * 0.3, 1e-10);
}

TEST(LargestEigenvalue, MatchesJacobiOracle) {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 10;
        std::vector<double> m(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) m[i * n + j] = m[j * n + i] = u(eng);
        const auto ev = oracle::jacobi_eigenvalues(m, n);
        const double top = *std::max_element(ev.begin(), ev.end());
        const auto e = largest_eigenvalue(m, n);
        EXPECT_NEAR(e.value, top, 1e-9) << "trial " << trial;
    }
}

TEST(LargestEigenvalue, AtLeastOneForCorrelationMatrices) {
    for (double rho : {0.0, 0.05, 0.5, 0.9}) {
        const auto c = correlation_matrix(factor_series(8, 200, rho, 30));
        EXPECT_GE(largest_eigenvalue(c).value, 1.0 - 1e-12) << rho;
    }
}

TEST(EppsCurve, IdenticalStreamsAreOne) {
    auto t = simulate_async_pair(0.0, 5.0, 2 * 86400.0, 40).first;
    auto u = t;
    u.asset_id = "B";
    const std::vector<TickSeries> ticks{t, u};
    const std::vector<std::int64_t> grid{1, 10, 60, 600};
    const std::vector<TradingCalendar> cal{TradingCalendar::always_open()};
    const auto curve = epps_curve(ticks, grid, cal, ZeroFilter::off, {}, PriceBasis::trade);
    ASSERT_EQ(curve.dt_grid, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_NEAR(curve.mean_coeff[k], 1.0, 1e-12);
        EXPECT_NEAR(curve.lambda_max[k], 2.0, 1e-9);
    }
}

TEST(EppsCurve, IndependentStreamsNearZero) {
    const auto pair = simulate_async_pair(0.0, 5.0, 5 * 86400.0, 41);
    const std::vector<TickSeries> ticks{pair.first, pair.second};
    const std::vector<std::int64_t> grid{10, 60, 600};
    const std::vector<TradingCalendar> cal{TradingCalendar::always_open()};
    const auto curve = epps_curve(ticks, grid, cal, ZeroFilter::either, {}, PriceBasis::trade);
    ASSERT_EQ(curve.mean_coeff.size(), 3u);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double n = 5.0 * 86400.0 / static_cast<double>(grid[k]);
        EXPECT_LT(std::abs(curve.mean_coeff[k]), 3.0 / std::sqrt(n)) << grid[k];
    }
}

TEST(EppsCurve, AsynchronousObservationShape) {
    const auto pair = simulate_async_pair(0.7, 10.0, 10 * 86400.0, 42);
    const std::vector<TickSeries> ticks{pair.first, pair.second};
    const std::vector<std::int64_t> grid{1, 10, 60, 600};
    const std::vector<TradingCalendar> cal{TradingCalendar::always_open()};
    const auto curve = epps_curve(ticks, grid, cal, ZeroFilter::off, {}, PriceBasis::trade);
    ASSERT_EQ(curve.mean_coeff.size(), 4u);
    EXPECT_LE(curve.mean_coeff.front(), 0.3);
    EXPECT_GE(curve.mean_coeff.back(), 0.6);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_GT(curve.mean_coeff[k], curve.mean_coeff[k - 1]);
}

TEST(EppsCurve, ZeroFilterAtFineScale) {
    // Keeping only slots where both assets ticked, each 1 s return carries
    // the diffusion since that asset's previous tick. With exponential gaps
    // of mean L the shared part averages L/2, so C ~ rho / 2.
    const auto pair = simulate_async_pair(0.7, 10.0, 10 * 86400.0, 42);
    const std::vector<TickSeries> ticks{pair.first, pair.second};
    const std::vector<std::int64_t> grid{1};
    const std::vector<TradingCalendar> cal{TradingCalendar::always_open()};
    const auto curve = epps_curve(ticks, grid, cal, ZeroFilter::either, {}, PriceBasis::trade);
    ASSERT_EQ(curve.mean_coeff.size(), 1u);
    EXPECT_NEAR(curve.mean_coeff[0], 0.35, 0.03);
}

TEST(EppsCurve, FailedDtIsOmittedWithWarning) {
    const auto pair = simulate_async_pair(0.5, 5.0, 3600.0, 43);
    const std::vector<TickSeries> ticks{pair.first, pair.second};
    const std::vector<std::int64_t> grid{10, 600};  // one hour gives 6 returns at 10 min
    const std::vector<TradingCalendar> cal{TradingCalendar::always_open()};
    const auto curve = epps_curve(ticks, grid, cal, ZeroFilter::off, {}, PriceBasis::trade);
    EXPECT_EQ(curve.dt_grid, std::vector<std::int64_t>{10});
    EXPECT_EQ(curve.warnings.size(), 1u);
}

namespace {

constexpr std::int64_t kDt = 600;
constexpr std::size_t kPerDay = 144;

}  // namespace

TEST(Rolling, StationaryFactor) {
    const auto s = factor_series(10, 120 * kPerDay, 0.3, 50, kDt);
    const auto r = rolling_mean_correlation(s);
    EXPECT_EQ(r.points.size(), 91u);
    EXPECT_EQ(r.skipped_windows, 0u);
    for (const auto& p : r.points) {
        EXPECT_GE(p.mean_coeff, 0.25);
        EXPECT_LE(p.mean_coeff, 0.35);
    }
}

TEST(Rolling, ChangepointCrossesOnce) {
    const std::size_t half = 90 * kPerDay;
    const auto a = oracle::factor_returns(10, half, 0.1, 51);
    const auto b = oracle::factor_returns(10, half, 0.8, 52);
    std::vector<ReturnSeries> s;
    for (std::size_t i = 0; i < 10; ++i) {
        auto v = a[i];
        v.insert(v.end(), b[i].begin(), b[i].end());
        s.push_back(series_from(v, "S" + std::to_string(i), kDt));
    }
    const EpochMs changepoint = static_cast<EpochMs>(half) * kDt * kMsPerSecond;
    const auto r = rolling_mean_correlation(s);
    int crossings = 0;
    EpochMs at = 0;
    for (std::size_t k = 1; k < r.points.size(); ++k) {
        const bool before = r.points[k - 1].mean_coeff < 0.45;
        const bool after = r.points[k].mean_coeff < 0.45;
        if (before != after) {
            ++crossings;
            at = r.points[k].window_end;
        }
    }
    EXPECT_EQ(crossings, 1);
    EXPECT_GE(at, changepoint);
    EXPECT_LE(at, changepoint + 30 * kMsPerDay);
}

TEST(Rolling, SingleWindowEqualsGlobal) {
    const auto s = factor_series(5, 30 * kPerDay, 0.4, 53, kDt);
    RollingOptions opt;
    const auto r = rolling_mean_correlation(s, opt);
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_NEAR(r.points[0].mean_coeff, mean_offdiag(correlation_matrix(s)), 1e-12);
    const auto short_s = factor_series(5, 29 * kPerDay, 0.4, 53, kDt);
    EXPECT_THROW(rolling_mean_correlation(short_s, opt), InsufficientDataError);
}

TEST(Rolling, SparseWindowsSkipped) {
    auto s = factor_series(3, 60 * kPerDay, 0.4, 54, kDt);
    // Asset 0 goes quiet for days 20-50; windows inside that gap lack pairs.
    for (auto& series : s) {
        std::vector<EpochMs> t;
        std::vector<double> v, raw;
        for (std::size_t k = 0; k < series.size(); ++k) {
            const auto day = series.slot_times[k] / kMsPerDay;
            if (&series == &s[0] && day >= 20 && day < 60) continue;
            t.push_back(series.slot_times[k]);
            v.push_back(series.values[k]);
            raw.push_back(series.raw[k]);
        }
        series.slot_times = t;
        series.values = v;
        series.raw = raw;
    }
    const auto r = rolling_mean_correlation(s);
    EXPECT_GT(r.skipped_windows, 0u);
    EXPECT_EQ(r.points.size() + r.skipped_windows, 31u);
}

TEST(Writers, EppsAndMatrixText) {
    EppsCurve curve;
    curve.dt_grid = {1, 60};
    curve.mean_coeff = {0.1, 0.5};
    curve.lambda_max = {1.1, 1.5};
    std::ostringstream out;
    write_epps_curve(out, curve);
    EXPECT_NE(out.str().find("60 0.5 1.5"), std::string::npos);

    std::ostringstream m;
    write_matrix(m, manual_matrix(2, {1, 0.25, 0.25, 1}));
    EXPECT_NE(m.str().find("A0"), std::string::npos);
    EXPECT_NE(m.str().find("0.25"), std::string::npos);
}
