#pragma once

#include "heavytails/market_data.hpp"
#include "heavytails/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace heavytails {

struct GaussianDist {};
struct ParetoDist {
    double alpha = 3.0;
    double x_min = 1.0;
};
struct StudentTDist {
    double nu = 3.0;
};
/// Symmetric alpha-stable law with characteristic function exp(-|t|^alpha).
struct LevyStableDist {
    double alpha = 1.5;
};
/// q-Gaussian with B_q = 1 / (3 - q) (unit q-variance).
struct QGaussianDist {
    double q = 1.5;
};

using DistSpec = std::variant<GaussianDist, ParetoDist, StudentTDist, LevyStableDist, QGaussianDist>;

/// Throws DomainError for parameters outside each family's domain.
void validate(const DistSpec& spec);

/// Grammar: family name with optional named parameters, e.g. "gaussian",
/// "pareto(alpha=3, x_min=1)", "student_t(nu=3)", "levy_stable(alpha=1.5)",
/// "q_gaussian(q=1.5)".
DistSpec parse_dist_spec(std::string_view text);
std::string to_string(const DistSpec& spec);

/// Tail exponent of the CCDF; +infinity for the Gaussian.
double tail_index_of(const DistSpec& spec);

/// Sequential sampler over one SplitMix64 stream. Gaussian deviates use the
/// polar method, Pareto the inverse CDF, Student-t the normal / chi ratio,
/// Levy-stable the Chambers-Mallows-Stuck construction and the q-Gaussian
/// the generalized (q-analog) Box-Muller transform.
class Sampler {
public:
    Sampler(DistSpec spec, std::uint64_t seed);
    Sampler(const Sampler&) = delete;
    Sampler& operator=(const Sampler&) = delete;

    double operator()();

    const DistSpec& spec() const { return spec_; }

private:
    double gamma(double shape);

    DistSpec spec_;
    SplitMix64 rng_;
    GaussianSource normal_;
};

/// Deterministic for fixed (spec, n, seed).
std::vector<double> generate(const DistSpec& spec, std::size_t n, std::uint64_t seed);

/// Writes a parseable tick file; throws Error when the path is unwritable.
void write_ticks(const TickSeries& series, const std::filesystem::path& path,
                 const TickFormat& format);

struct RandomWalkOptions {
    std::string asset_id = "SYN";
    std::size_t n_ticks = 1000;
    EpochMs start = 1514764800000;  // 2018-01-01T00:00:00Z
    std::int64_t spacing_ms = 1000;
    double scale = 1e-4;  ///< log-price increment = scale * draw
    double start_price = 100.0;
    bool random_sign = true;  ///< flip one-sided draws (Pareto) with a fair coin
};

/// Trade ticks on a regular clock whose log-price increments are i.i.d.
/// draws from `increments`.
TickSeries random_walk_ticks(const DistSpec& increments, const RandomWalkOptions& options,
                             std::uint64_t seed);

struct AsyncPairOptions {
    EpochMs start = 1514764800000;
    double volatility = 1e-4;  ///< latent log-price std per sqrt(second)
    double start_price = 100.0;
};

/// Latent bivariate Brownian log-prices with instantaneous correlation rho,
/// each observed at its own independent Poisson arrival times with the given
/// mean spacing. Tick prices are start_price * exp(latent).
std::pair<TickSeries, TickSeries> simulate_async_pair(double rho, double mean_intertick_s,
                                                      double duration_s, std::uint64_t seed,
                                                      const AsyncPairOptions& options = {});

}  // namespace heavytails
