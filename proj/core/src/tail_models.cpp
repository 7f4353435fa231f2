#include "heavytails/tail_models.hpp"

#include "heavytails/errors.hpp"
#include "heavytails/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace heavytails {

std::string_view to_string(TailFamily family) {
    switch (family) {
    case TailFamily::power_law: return "power_law";
    case TailFamily::stretched_exp: return "stretched_exp";
    case TailFamily::q_gaussian: return "q_gaussian";
    }
    return "?";
}

std::string_view to_string(FitStatus status) {
    switch (status) {
    case FitStatus::ok: return "ok";
    case FitStatus::non_physical: return "non_physical";
    case FitStatus::beta_at_least_one: return "beta_at_least_one";
    case FitStatus::not_converged: return "not_converged";
    case FitStatus::q_below_one: return "q_below_one";
    }
    return "?";
}

double point_weight(const CcdfPoint& point) {
    if (point.count == 0 || point.count >= 5) {
        return 1.0;
    }
    return static_cast<double>(point.count) / 5.0;
}

namespace {

std::vector<double> weights_of(std::span<const CcdfPoint> pts) {
    std::vector<double> w(pts.size());
    std::transform(pts.begin(), pts.end(), w.begin(), point_weight);
    return w;
}

double r_squared_of(std::span<const double> y, double sse) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return ss > 0.0 ? 1.0 - sse / ss : 1.0;
}

// ---------------------------------------------------------------------------
// q-Gaussian density. Handles q <= 1 as well so optimizers may probe the
// compact-support side when the caller relaxes the lower bound.
// ---------------------------------------------------------------------------

constexpr double kQOneBand = 1e-12;

double q_log_norm(double q, double b) {
    const double pi = std::numbers::pi;
    if (std::fabs(q - 1.0) < kQOneBand) {
        return 0.5 * std::log(b / pi);
    }
    if (q > 1.0) {
        const double z = 1.0 / (q - 1.0);
        return 0.5 * std::log((q - 1.0) * b / pi) + numerics::log_gamma_ratio(z, 0.0, -0.5);
    }
    const double w = 1.0 / (1.0 - q);
    return 0.5 * std::log((1.0 - q) * b / pi) + numerics::log_gamma_ratio(w, 0.5, 0.0);
}

struct QGaussianShape {
    double q;
    double b;
    double log_c;

    QGaussianShape(double q_, double b_) : q(q_), b(b_), log_c(q_log_norm(q_, b_)) {}

    double support_edge() const {
        return q < 1.0 - kQOneBand ? 1.0 / std::sqrt((1.0 - q) * b)
                                   : std::numeric_limits<double>::infinity();
    }

    double density(double x) const {
        const double bx2 = b * x * x;
        if (std::fabs(q - 1.0) < kQOneBand) {
            return std::exp(log_c - bx2);
        }
        const double arg = (q - 1.0) * bx2;
        if (arg <= -1.0) {
            return 0.0;
        }
        return std::exp(log_c + std::log1p(arg) / (1.0 - q));
    }

    /// P(|X| >= x) at ascending abscissae, accumulated from the far tail.
    std::vector<double> ccdf(std::span<const double> xs, double rel_tol) const {
        std::vector<double> out(xs.size(), 0.0);
        if (xs.empty()) {
            return out;
        }
        auto f = [this](double x) { return density(x); };
        const double edge = support_edge();
        const double last = std::max(0.0, xs.back());
        double tail = 0.0;
        if (std::isinf(edge)) {
            tail = numerics::integrate_to_infinity(f, last, 0.0, rel_tol).value;
        } else if (last < edge) {
            tail = numerics::integrate(f, last, edge, 0.0, rel_tol).value;
        }
        double acc = 2.0 * tail;
        out.back() = acc;
        for (std::size_t i = xs.size() - 1; i-- > 0;) {
            const double lo = std::max(0.0, xs[i]);
            const double hi = std::max(0.0, std::min(xs[i + 1], edge));
            if (hi > lo) {
                acc += 2.0 * numerics::integrate(f, lo, hi, 0.0, rel_tol).value;
            }
            out[i] = std::min(acc, 1.0);
        }
        return out;
    }
};

void check_q_domain(double q, double b_q) {
    if (!(q > 1.0 && q < 3.0)) {
        throw DomainError("q-Gaussian requires 1 < q < 3, got q = " + std::to_string(q));
    }
    if (!(b_q > 0.0) || !std::isfinite(b_q)) {
        throw DomainError("q-Gaussian requires B_q > 0");
    }
}

std::vector<CcdfPoint> thin_log_p(std::span<const CcdfPoint> pts, std::size_t max_points) {
    if (max_points == 0 || pts.size() <= max_points) {
        return {pts.begin(), pts.end()};
    }
    const double lp0 = std::log(pts.front().p);
    const double lp1 = std::log(pts.back().p);
    std::vector<CcdfPoint> out;
    std::size_t last_taken = pts.size();
    for (std::size_t k = 0; k < max_points; ++k) {
        const double target =
            std::exp(lp0 + (lp1 - lp0) * static_cast<double>(k) / static_cast<double>(max_points - 1));
        // First point (p descending) with p <= target.
        auto it = std::partition_point(pts.begin(), pts.end(),
                                       [target](const CcdfPoint& c) { return c.p > target; });
        auto idx = static_cast<std::size_t>(it - pts.begin());
        if (idx >= pts.size()) idx = pts.size() - 1;
        if (idx != last_taken) {
            out.push_back(pts[idx]);
            last_taken = idx;
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double TailFitResult::log_ccdf(double x) const {
    return std::visit(
        [x](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PowerLawParams>) {
                return p.log_amplitude - p.alpha * std::log(x);
            } else if constexpr (std::is_same_v<T, StretchedExpParams>) {
                return -std::pow(x / p.x0, p.beta);
            } else {
                const double xs[] = {x};
                return std::log(QGaussianShape(p.q, p.b_q).ccdf(xs, 1e-11)[0]);
            }
        },
        params);
}

TailFitResult fit_power_law(std::span<const CcdfPoint> points) {
    if (points.size() < 2) {
        throw InsufficientDataError("power-law fit needs at least two points");
    }
    std::vector<double> x(points.size()), y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].x > 0.0) || !(points[i].p > 0.0)) {
            throw DomainError("power-law fit region contains non-positive values");
        }
        x[i] = std::log(points[i].x);
        y[i] = std::log(points[i].p);
    }
    const auto w = weights_of(points);
    const auto line = numerics::fit_line(x, y, w);

    TailFitResult res;
    res.params = PowerLawParams{-line.slope, line.intercept};
    res.x_min = points.front().x;
    res.x_max = points.back().x;
    res.n_points = points.size();
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (line.intercept + line.slope * x[i]);
        sse += r * r;
    }
    res.sse = sse;
    res.r_squared = r_squared_of(y, sse);
    res.status = -line.slope > 0.0 ? FitStatus::ok : FitStatus::non_physical;
    return res;
}

TailFitResult fit_power_law(const EmpiricalCcdf& ccdf, double tail_fraction) {
    const auto pts = tail_points(ccdf, tail_fraction, kMinTailPoints);
    return fit_power_law(pts);
}

HillEstimate hill_estimator(const EmpiricalCcdf& ccdf, std::size_t k) {
    const std::size_t n = ccdf.size();
    if (k < 2 || k >= n) {
        throw DomainError("Hill estimator needs 2 <= k < n (k = " + std::to_string(k) +
                          ", n = " + std::to_string(n) + ")");
    }
    const auto& v = ccdf.sorted_values();
    const double threshold = v[n - k - 1];
    if (!(threshold > 0.0)) {
        throw DomainError("Hill estimator window contains zero values");
    }
    const double log_t = std::log(threshold);
    double sum = 0.0;
    for (std::size_t i = n - k; i < n; ++i) {
        sum += std::log(v[i]) - log_t;
    }
    if (!(sum > 0.0)) {
        throw DomainError("Hill estimator: top order statistics are all equal");
    }
    HillEstimate est;
    est.k = k;
    est.alpha = static_cast<double>(k) / sum;
    est.standard_error = est.alpha / std::sqrt(static_cast<double>(k));
    return est;
}

TailFitResult fit_stretched_exp(std::span<const CcdfPoint> points) {
    std::vector<CcdfPoint> usable;
    for (const auto& pt : points) {
        if (pt.p < 1.0 && pt.p > 0.0 && pt.x > 0.0) {
            usable.push_back(pt);
        }
    }
    if (usable.empty()) {
        throw DomainError("stretched-exponential region holds only P = 1 points");
    }
    if (usable.size() < kMinTailPoints) {
        throw InsufficientDataError("stretched-exponential fit needs at least " +
                                    std::to_string(kMinTailPoints) + " points with P < 1, got " +
                                    std::to_string(usable.size()));
    }
    std::vector<double> x(usable.size()), y(usable.size());
    for (std::size_t i = 0; i < usable.size(); ++i) {
        x[i] = std::log(usable[i].x);
        y[i] = std::log(-std::log(usable[i].p));
    }
    const auto line = numerics::fit_line(x, y, weights_of(usable));
    const double beta = line.slope;

    TailFitResult res;
    res.x_min = usable.front().x;
    res.x_max = usable.back().x;
    res.n_points = usable.size();
    res.r_squared = line.r_squared;
    if (!(beta > 0.0)) {
        res.params = StretchedExpParams{beta, std::numeric_limits<double>::quiet_NaN()};
        res.status = FitStatus::non_physical;
        res.sse = std::numeric_limits<double>::infinity();
        return res;
    }
    const double x0 = std::exp(-line.intercept / beta);
    res.params = StretchedExpParams{beta, x0};
    double sse = 0.0;
    for (const auto& pt : usable) {
        const double r = std::log(pt.p) + std::pow(pt.x / x0, beta);
        sse += r * r;
    }
    res.sse = sse;
    res.status = beta >= 1.0 ? FitStatus::beta_at_least_one : FitStatus::ok;
    return res;
}

TailFitResult fit_stretched_exp(const EmpiricalCcdf& ccdf, BodyRegion region) {
    const auto pts = region_points(ccdf, region.p_min, region.p_max);
    return fit_stretched_exp(pts);
}

double q_gaussian_pdf(double x, double q, double b_q) {
    check_q_domain(q, b_q);
    return QGaussianShape(q, b_q).density(x);
}

double q_gaussian_ccdf(double x, double q, double b_q) {
    check_q_domain(q, b_q);
    if (x <= 0.0) {
        return 1.0;
    }
    const double xs[] = {x};
    return QGaussianShape(q, b_q).ccdf(xs, 1e-12)[0];
}

TailFitResult fit_q_gaussian(std::span<const CcdfPoint> points, const QGaussianFitOptions& opt) {
    if (points.size() < kMinQGaussianPoints) {
        throw InsufficientDataError("q-Gaussian fit needs at least " +
                                    std::to_string(kMinQGaussianPoints) + " distinct points, got " +
                                    std::to_string(points.size()));
    }
    if (!(opt.q_lower < opt.q_upper) || opt.q_upper > 3.0) {
        throw DomainError("invalid q bounds for q-Gaussian fit");
    }
    const auto pts = thin_log_p(points, opt.max_points);
    std::vector<double> xs(pts.size()), log_p(pts.size()), w(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        xs[i] = pts[i].x;
        log_p[i] = std::log(pts[i].p);
        w[i] = point_weight(pts[i]);
    }
    constexpr double kPenalty = 1e300;
    constexpr double kLogFloor = -745.0;  // log of the smallest subnormal
    auto residual_sum = [&](double q, double b, bool weighted) {
        const auto model = QGaussianShape(q, b).ccdf(xs, 1e-10);
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double lm = model[i] > 0.0 ? std::log(model[i]) : kLogFloor;
            const double r = log_p[i] - lm;
            s += (weighted ? w[i] : 1.0) * r * r;
        }
        return s;
    };
    auto objective = [&](std::span<const double> theta) {
        const double q = theta[0];
        const double b = std::exp(theta[1]);
        if (!(q > opt.q_lower && q < opt.q_upper) || !std::isfinite(b) || b <= 0.0) {
            return kPenalty;
        }
        return residual_sum(q, b, true);
    };

    numerics::SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (double q0 : opt.q_starts) {
        for (double b0 : opt.b_starts) {
            auto r = numerics::nelder_mead(objective, {q0, std::log(b0)}, {0.05, 0.25},
                                           opt.tolerance, opt.max_evaluations);
            if (r.value < best.value) {
                best = std::move(r);
            }
        }
    }
    if (best.argmin.empty() || best.value >= kPenalty) {
        throw DomainError("q-Gaussian fit found no admissible parameters");
    }
    const double q = best.argmin[0];
    const double b = std::exp(best.argmin[1]);

    TailFitResult res;
    res.params = QGaussianParams{q, b};
    res.x_min = xs.front();
    res.x_max = xs.back();
    res.n_points = xs.size();
    res.sse = residual_sum(q, b, false);
    res.r_squared = r_squared_of(log_p, res.sse);
    if (!best.converged) {
        res.status = FitStatus::not_converged;
    } else if (q <= 1.0) {
        res.status = FitStatus::q_below_one;
    }
    return res;
}

TailFitResult fit_q_gaussian(const EmpiricalCcdf& ccdf, const QGaussianFitOptions& options) {
    const auto pts = ccdf.distinct_points();
    return fit_q_gaussian(pts, options);
}

double alpha_to_q(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("alpha must be positive and finite");
    }
    return (3.0 + alpha) / (1.0 + alpha);
}

double q_to_alpha(double q) {
    if (!(q > 1.0 && q < 3.0)) {
        throw DomainError("q must lie in (1, 3)");
    }
    return (3.0 - q) / (q - 1.0);
}

const FamilyOutcome& FitSet::operator[](TailFamily f) const {
    switch (f) {
    case TailFamily::power_law: return power_law;
    case TailFamily::stretched_exp: return stretched_exp;
    case TailFamily::q_gaussian: break;
    }
    return q_gaussian;
}

FamilyOutcome& FitSet::operator[](TailFamily f) {
    return const_cast<FamilyOutcome&>(std::as_const(*this)[f]);
}

FitSet fit_all(const EmpiricalCcdf& ccdf, const FitConfig& config) {
    FitSet out;
    auto attempt = [](FamilyOutcome& slot, auto&& fn) {
        try {
            slot.fit = fn();
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    };
    attempt(out.power_law, [&] { return fit_power_law(ccdf, config.tail_fraction); });
    attempt(out.stretched_exp, [&] { return fit_stretched_exp(ccdf, config.body); });
    attempt(out.q_gaussian, [&] { return fit_q_gaussian(ccdf, config.q_gaussian); });
    return out;
}

double log_ccdf_sse(const TailFitResult& fit, std::span<const CcdfPoint> points) {
    std::vector<double> model(points.size());
    if (const auto* qp = std::get_if<QGaussianParams>(&fit.params)) {
        std::vector<double> xs(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) xs[i] = points[i].x;
        const auto s = QGaussianShape(qp->q, qp->b_q).ccdf(xs, 1e-11);
        for (std::size_t i = 0; i < s.size(); ++i) model[i] = std::log(s[i]);
    } else {
        for (std::size_t i = 0; i < points.size(); ++i) model[i] = fit.log_ccdf(points[i].x);
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double r = std::log(points[i].p) - model[i];
        sse += r * r;
    }
    return sse;
}

}  // namespace heavytails
