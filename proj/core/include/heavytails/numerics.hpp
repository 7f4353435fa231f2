#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace heavytails::numerics {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod quadrature on [a, b]. Bisects the
/// interval with the largest error estimate until the total estimate drops
/// below max(abs_tol, rel_tol * |I|) or the interval budget is spent.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-14, double rel_tol = 1e-11,
                           std::size_t max_intervals = 2000);

/// Integral over [a, inf) through the substitution x = a + t / (1 - t).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double abs_tol = 1e-14, double rel_tol = 1e-11,
                                       std::size_t max_intervals = 2000);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double weighted_sse = 0.0;
};

/// Weighted least-squares line y = intercept + slope * x. Empty weights mean
/// unit weights. Throws DomainError when all x coincide.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w = {});

struct SimplexResult {
    std::vector<double> argmin;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead downhill simplex with the standard coefficients
/// (reflect 1, expand 2, contract 1/2, shrink 1/2). Converges when every
/// vertex lies within `tolerance` of the best one; stops unconverged after
/// `max_evaluations`.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, std::vector<double> step,
                          double tolerance = 1e-6, std::size_t max_evaluations = 10000);

/// log Gamma(z + a) - log Gamma(z + b), accurate for very large z where the
/// naive lgamma difference cancels.
double log_gamma_ratio(double z, double a, double b);

}  // namespace heavytails::numerics
