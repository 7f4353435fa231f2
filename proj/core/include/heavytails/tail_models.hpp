#pragma once

#include "heavytails/empirical_dist.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace heavytails {

enum class TailFamily { power_law, stretched_exp, q_gaussian };

std::string_view to_string(TailFamily family);

/// CCDF ~ exp(log_amplitude) * x^-alpha
struct PowerLawParams {
    double alpha = 0.0;
    double log_amplitude = 0.0;
};

/// CCDF ~ exp(-(x / x0)^beta)
struct StretchedExpParams {
    double beta = 0.0;
    double x0 = 1.0;
};

/// density ~ [1 + (q - 1) B x^2]^(1 / (1 - q)), centred at zero
struct QGaussianParams {
    double q = 1.5;
    double b_q = 1.0;
};

using TailParams = std::variant<PowerLawParams, StretchedExpParams, QGaussianParams>;

enum class FitStatus {
    ok,
    non_physical,       ///< power law with alpha <= 0, stretched exponential with beta <= 0
    beta_at_least_one,  ///< stretched exponential fit outside the expected 0 < beta < 1
    not_converged,      ///< optimizer budget exhausted; best-so-far parameters kept
    q_below_one,        ///< q-Gaussian fit under a relaxed lower bound landed at q <= 1
};

std::string_view to_string(FitStatus status);

struct TailFitResult {
    TailParams params;
    double x_min = 0.0;  ///< fit range within the data support
    double x_max = 0.0;
    std::size_t n_points = 0;
    double sse = 0.0;  ///< sum of squared log-CCDF residuals over the fit points
    double r_squared = 0.0;
    FitStatus status = FitStatus::ok;

    TailFamily family() const { return static_cast<TailFamily>(params.index()); }
    /// Model log P(|r| >= x).
    double log_ccdf(double x) const;
};

/// Exceedance-count weights: points supported by fewer than five
/// observations get weight count / 5. Model points (count 0) get weight 1.
double point_weight(const CcdfPoint& point);

// -- power law --------------------------------------------------------------

inline constexpr double kDefaultTailFraction = 0.01;

/// Weighted least squares of log P on log x; alpha = -slope.
TailFitResult fit_power_law(std::span<const CcdfPoint> points);
TailFitResult fit_power_law(const EmpiricalCcdf& ccdf, double tail_fraction = kDefaultTailFraction);

struct HillEstimate {
    double alpha = 0.0;
    double standard_error = 0.0;  ///< alpha / sqrt(k)
    std::size_t k = 0;
};

/// Hill tail-index estimate from the k largest order statistics, relative to
/// the (k+1)-th largest. Requires 2 <= k < n and a positive threshold.
HillEstimate hill_estimator(const EmpiricalCcdf& ccdf, std::size_t k);

// -- stretched exponential --------------------------------------------------

/// Probability band of the body region.
struct BodyRegion {
    double p_min = 1e-4;
    double p_max = 0.5;
};

/// Weighted least squares of log(-log P) on log x over points with P < 1;
/// beta = slope, x0 from the intercept. Needs at least 20 points.
TailFitResult fit_stretched_exp(std::span<const CcdfPoint> points);
TailFitResult fit_stretched_exp(const EmpiricalCcdf& ccdf, BodyRegion region = {});

// -- q-Gaussian -------------------------------------------------------------

/// Normalized q-Gaussian density with zero mean; requires 1 < q < 3, B > 0.
double q_gaussian_pdf(double x, double q, double b_q);

/// P(|X| >= x) for a q-Gaussian X, by adaptive quadrature of the density.
double q_gaussian_ccdf(double x, double q, double b_q);

struct QGaussianFitOptions {
    /// Exclusive bounds on q. Lowering q_lower below 1 admits the
    /// compact-support branch (used to check the Gaussian limit).
    double q_lower = 1.0;
    double q_upper = 3.0;
    std::vector<double> q_starts{1.2, 1.4, 1.6};
    std::vector<double> b_starts{0.5, 1.0, 2.0};
    /// Distinct points are thinned to at most this many, evenly spaced in
    /// log P. Zero keeps every point.
    std::size_t max_points = 256;
    double tolerance = 1e-6;
    std::size_t max_evaluations = 10000;
};

inline constexpr std::size_t kMinQGaussianPoints = 50;

/// Minimizes the weighted squared log-CCDF residuals over (q, B) by
/// multistart simplex descent; the model CCDF comes from quadrature.
TailFitResult fit_q_gaussian(std::span<const CcdfPoint> points, const QGaussianFitOptions& options = {});
TailFitResult fit_q_gaussian(const EmpiricalCcdf& ccdf, const QGaussianFitOptions& options = {});

/// q = (3 + alpha) / (1 + alpha); alpha > 0.
double alpha_to_q(double alpha);
/// alpha = (3 - q) / (q - 1); 1 < q < 3.
double q_to_alpha(double q);

// -- all families -----------------------------------------------------------

struct FitConfig {
    double tail_fraction = kDefaultTailFraction;
    BodyRegion body{};
    QGaussianFitOptions q_gaussian{};
};

struct FamilyOutcome {
    std::optional<TailFitResult> fit;
    std::string error;
    bool ok() const { return fit.has_value(); }
};

struct FitSet {
    FamilyOutcome power_law;
    FamilyOutcome stretched_exp;
    FamilyOutcome q_gaussian;

    const FamilyOutcome& operator[](TailFamily f) const;
    FamilyOutcome& operator[](TailFamily f);
};

/// Runs the three fits; failures are recorded per family, never thrown.
FitSet fit_all(const EmpiricalCcdf& ccdf, const FitConfig& config = {});

/// Sum of squared residuals log P - model log CCDF over the given points,
/// for comparing families on a common region.
double log_ccdf_sse(const TailFitResult& fit, std::span<const CcdfPoint> points);

}  // namespace heavytails
