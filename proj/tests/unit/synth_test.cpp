#include "heavytails/cross_correlation.hpp"
#include "heavytails/errors.hpp"
#include "heavytails/market_data.hpp"
#include "heavytails/rng.hpp"
#include "heavytails/sampling.hpp"
#include "heavytails/synth.hpp"
#include "heavytails/tail_models.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

using namespace heavytails;

TEST(SplitMix64, ReferenceOutputs) {
    // Published reference stream for seed 0.
    SplitMix64 g(0);
    EXPECT_EQ(g(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(g(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(g(), 0x06C45D188009454FULL);
    EXPECT_EQ(SplitMix64::at(0, 2), 0x06C45D188009454FULL);
    SplitMix64 h(1234567);
    for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(h(), SplitMix64::at(1234567, i));
    EXPECT_NE(derive_seed(5, 1), derive_seed(5, 2));
}

TEST(DistSpec, ParseAndPrint) {
    EXPECT_TRUE(std::holds_alternative<GaussianDist>(parse_dist_spec("gaussian")));
    EXPECT_TRUE(std::holds_alternative<GaussianDist>(parse_dist_spec("normal")));
    const auto p = std::get<ParetoDist>(parse_dist_spec("pareto(alpha=3, x_min=2)"));
    EXPECT_EQ(p.alpha, 3.0);
    EXPECT_EQ(p.x_min, 2.0);
    EXPECT_EQ(std::get<StudentTDist>(parse_dist_spec("student_t(nu=3)")).nu, 3.0);
    EXPECT_EQ(std::get<LevyStableDist>(parse_dist_spec("levy_stable(alpha=1.5)")).alpha, 1.5);
    EXPECT_EQ(std::get<QGaussianDist>(parse_dist_spec("q_gaussian(q=1.5)")).q, 1.5);
    for (const char* text : {"gaussian", "pareto(alpha=3,x_min=1)", "student_t(nu=4)", "levy_stable(alpha=1.2)",
                              "q_gaussian(q=1.7)"}) {
        const auto spec = parse_dist_spec(text);
        EXPECT_EQ(to_string(parse_dist_spec(to_string(spec))), to_string(spec));
    }
    EXPECT_THROW(parse_dist_spec("cauchy"), Error);
    EXPECT_THROW(parse_dist_spec("pareto(alpha=-1)"), Error);
    EXPECT_THROW(parse_dist_spec("levy_stable(alpha=2.5)"), Error);
    EXPECT_THROW(parse_dist_spec("q_gaussian(q=3)"), Error);
    EXPECT_THROW(parse_dist_spec("student_t(nu=3"), Error);
}

TEST(TailIndex, PerFamily) {
    EXPECT_EQ(tail_index_of(QGaussianDist{1.5}), 3.0);
    EXPECT_EQ(tail_index_of(LevyStableDist{1.5}), 1.5);
    EXPECT_EQ(tail_index_of(ParetoDist{2.5}), 2.5);
    EXPECT_EQ(tail_index_of(StudentTDist{4.0}), 4.0);
    EXPECT_TRUE(std::isinf(tail_index_of(GaussianDist{})));
}

TEST(Generate, Deterministic) {
    for (const DistSpec& d : {DistSpec{GaussianDist{}}, DistSpec{ParetoDist{3.0}}, DistSpec{StudentTDist{3.0}},
                              DistSpec{LevyStableDist{1.5}}, DistSpec{QGaussianDist{1.5}}}) {
        EXPECT_EQ(generate(d, 1000, 77), generate(d, 1000, 77)) << to_string(d);
        EXPECT_NE(generate(d, 1000, 77), generate(d, 1000, 78)) << to_string(d);
    }
    EXPECT_THROW(generate(GaussianDist{}, 0, 1), Error);
}

TEST(Generate, GaussianMoments) {
    const auto v = generate(GaussianDist{}, 1000000, 1);
    EXPECT_LT(std::abs(oracle::mean(v)), 0.005);
    const double s = oracle::population_std(v);
    EXPECT_GE(s, 0.995);
    EXPECT_LE(s, 1.005);
}

TEST(Generate, ParetoAtTwo) {
    const auto v = generate(ParetoDist{3.0, 1.0}, 1000000, 2);
    std::size_t hits = 0;
    for (double x : v) {
        EXPECT_GE(x, 1.0);
        hits += x >= 2.0;
    }
    EXPECT_NEAR(static_cast<double>(hits) / 1e6, 0.125, 0.001);
}

namespace {

// x with ccdf(x) = p for a decreasing ccdf, by bisection in log x.
double quantile(const std::function<double(double)>& ccdf, double p) {
    double lo = std::log(1e-6), hi = std::log(1e6);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ccdf(std::exp(mid)) > p ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

void shape_check(const DistSpec& d, const std::function<double(double)>& ccdf, std::uint64_t seed) {
    const std::size_t n = 1000000;
    const auto v = generate(d, n, seed);
    for (double p : {0.1, 0.01, 0.001}) {
        const double x = quantile(ccdf, p);
        std::size_t hits = 0;
        for (double r : v) hits += std::abs(r) >= x;
        const double emp = static_cast<double>(hits) / static_cast<double>(n);
        EXPECT_NEAR(emp, p, 3.0 * oracle::binomial_sigma(p, n)) << to_string(d) << " p=" << p;
    }
}

}  // namespace

TEST(Generate, ShapeGaussian) { shape_check(GaussianDist{}, oracle::normal_abs_ccdf, 11); }

TEST(Generate, ShapePareto) {
    shape_check(ParetoDist{3.0}, [](double x) { return oracle::pareto_ccdf(x, 3.0); }, 12);
}

TEST(Generate, ShapeStudentT) {
    shape_check(StudentTDist{3.0}, [](double x) { return oracle::student_t_abs_ccdf(x, 3.0); }, 13);
    shape_check(StudentTDist{1.5}, [](double x) { return oracle::student_t_abs_ccdf(x, 1.5); }, 14);
}

TEST(Generate, ShapeLevyStable) {
    shape_check(LevyStableDist{1.5}, [](double x) { return oracle::stable_abs_ccdf(x, 1.5); }, 15);
    shape_check(LevyStableDist{1.0}, [](double x) { return 1.0 - 2.0 / std::numbers::pi * std::atan(x); }, 16);
}

TEST(Generate, ShapeQGaussian) {
    // The generalized Box-Muller construction yields B = 1 / (3 - q).
    for (double q : {1.2, 1.5, 2.0}) {
        shape_check(QGaussianDist{q}, [q](double x) { return oracle::q_gaussian_abs_ccdf(x, q, 1.0 / (3.0 - q)); },
                    17);
    }
}

TEST(Generate, PowerLawRecovery) {
    for (const DistSpec& d : {DistSpec{ParetoDist{2.0}}, DistSpec{ParetoDist{3.0}}, DistSpec{ParetoDist{4.0}},
                              DistSpec{StudentTDist{3.0}}, DistSpec{LevyStableDist{1.5}}}) {
        const auto fit = fit_power_law(build_ccdf(generate(d, 1000000, 21)));
        const double a = std::get<PowerLawParams>(fit.params).alpha;
        EXPECT_NEAR(a / tail_index_of(d), 1.0, 0.05) << to_string(d);
    }
}

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("heavytails_synth_" + name);
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST(WriteTicks, RowsAndHeader) {
    RandomWalkOptions opt;
    opt.n_ticks = 3;
    const auto ticks = random_walk_ticks(GaussianDist{}, opt, 1);
    const auto fmt = TickFormat::parse("ts,price;unit=ms");
    const auto path = temp_file("three.csv");
    write_ticks(ticks, path, fmt);
    EXPECT_EQ(lines_of(path).size(), 4u);
    write_ticks(TickSeries{"E", {}}, path, fmt);
    EXPECT_EQ(lines_of(path).size(), 1u);
    std::filesystem::remove(path);
    EXPECT_THROW(write_ticks(ticks, "/nonexistent/dir/x.csv", fmt), Error);
}

TEST(WriteTicks, MillionTickRoundTrip) {
    RandomWalkOptions opt;
    opt.n_ticks = 1000000;
    opt.spacing_ms = 250;
    const auto ticks = random_walk_ticks(StudentTDist{3.0}, opt, 5);
    const auto fmt = TickFormat::parse("ts,price;unit=ms");
    const auto path = temp_file("million.csv");
    write_ticks(ticks, path, fmt);
    const auto back = parse_tick_file(path, fmt, ticks.asset_id);
    std::filesystem::remove(path);
    EXPECT_EQ(back.stats.skipped_malformed, 0u);
    EXPECT_EQ(back.series, ticks);
}

TEST(RandomWalk, Bookkeeping) {
    RandomWalkOptions opt;
    opt.n_ticks = 500;
    opt.start = 1000;
    opt.spacing_ms = 2000;
    opt.start_price = 50.0;
    const auto t = random_walk_ticks(ParetoDist{3.0}, opt, 9);
    ASSERT_EQ(t.size(), 500u);
    EXPECT_EQ(t.ticks.front().timestamp, 1000);
    EXPECT_EQ(t.ticks.back().timestamp, 1000 + 499 * 2000);
    EXPECT_NEAR(*t.ticks.front().trade_price, 50.0, 1e-12);
    const auto draws = generate(ParetoDist{3.0}, 499, 9);
    int negative = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double inc = std::log(*t.ticks[i].trade_price / *t.ticks[i - 1].trade_price);
        EXPECT_NEAR(std::abs(inc), 1e-4 * draws[i - 1], 1e-12);
        negative += inc < 0;
    }
    EXPECT_GT(negative, 200);
    EXPECT_LT(negative, 300);
}

TEST(AsyncPair, ArrivalsAndDeterminism) {
    const auto a = simulate_async_pair(0.5, 10.0, 86400.0, 3);
    const auto b = simulate_async_pair(0.5, 10.0, 86400.0, 3);
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
    EXPECT_EQ(a.first.asset_id, "A");
    EXPECT_EQ(a.second.asset_id, "B");
    // Poisson count over a day: mean 8640, std ~93.
    EXPECT_NEAR(static_cast<double>(a.first.size()), 8640.0, 5 * 93.0);
    EXPECT_NEAR(static_cast<double>(a.second.size()), 8640.0, 5 * 93.0);
    for (std::size_t i = 1; i < a.first.size(); ++i) EXPECT_LT(a.first.ticks[i - 1].timestamp, a.first.ticks[i].timestamp);
    EXPECT_THROW(simulate_async_pair(1.0, 10.0, 100.0, 1), Error);
    EXPECT_THROW(simulate_async_pair(0.5, 0.0, 100.0, 1), Error);
}

namespace {

double pair_corr(const std::pair<TickSeries, TickSeries>& p, std::int64_t dt) {
    const auto cal = TradingCalendar::always_open();
    const auto a = normalize(log_returns(sample_prices(p.first, dt, cal, {}, PriceBasis::trade)));
    const auto b = normalize(log_returns(sample_prices(p.second, dt, cal, {}, PriceBasis::trade)));
    return pearson(a, b);
}

}  // namespace

TEST(AsyncPair, NullAndSynchronousLimit) {
    const auto null_pair = simulate_async_pair(0.0, 5.0, 3 * 86400.0, 31);
    for (std::int64_t dt : {10, 60, 600}) {
        const double n = 3 * 86400.0 / static_cast<double>(dt);
        EXPECT_LT(std::abs(pair_corr(null_pair, dt)), 3.0 / std::sqrt(n)) << dt;
    }
    const auto dense = simulate_async_pair(0.6, 0.5, 10 * 86400.0, 32);
    EXPECT_NEAR(pair_corr(dense, 60), 0.6, 0.02);
}

TEST(AsyncPair, EppsShape) {
    const auto p = simulate_async_pair(0.7, 10.0, 5 * 86400.0, 33);
    EXPECT_LT(pair_corr(p, 1), pair_corr(p, 600));
}
