#include "heavytails/numerics.hpp"

#include "heavytails/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>

namespace heavytails::numerics {

namespace {

// Kronrod 15-point abscissae/weights and embedded Gauss 7-point weights.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    return {a, b, kronrod * h, std::fabs((kronrod - gauss) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, std::size_t max_intervals) {
    QuadratureResult res;
    if (a == b) {
        return res;
    }
    std::priority_queue<Piece> heap;
    Piece first = gauss_kronrod(f, a, b);
    res.evaluations = 15;
    double total = first.value;
    double err = first.error;
    heap.push(first);
    while (err > std::max(abs_tol, rel_tol * std::fabs(total)) && heap.size() < max_intervals) {
        const Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;  // interval exhausted in floating point
        }
        const Piece left = gauss_kronrod(f, worst.a, mid);
        const Piece right = gauss_kronrod(f, mid, worst.b);
        res.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed drift from the incremental updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    res.value = total;
    res.error = err;
    return res;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double abs_tol, double rel_tol, std::size_t max_intervals) {
    auto g = [&f, a](double t) {
        const double u = 1.0 - t;
        return f(a + t / u) / (u * u);
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
    const std::size_t n = x.size();
    if (n != y.size() || (!w.empty() && w.size() != n)) {
        throw DomainError("fit_line: mismatched input lengths");
    }
    if (n < 2) {
        throw InsufficientDataError("fit_line needs at least two points");
    }
    auto weight = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += weight(i);
        sx += weight(i) * x[i];
        sy += weight(i) * y[i];
    }
    const double mx = sx / sw;
    const double my = sy / sw;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += weight(i) * dx * dx;
        sxy += weight(i) * dx * dy;
        syy += weight(i) * dy * dy;
    }
    if (!(sxx > 0.0)) {
        throw DomainError("fit_line: degenerate abscissae (all x equal)");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += weight(i) * r * r;
    }
    fit.weighted_sse = sse;
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return fit;
}

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, std::vector<double> step, double tolerance,
                          std::size_t max_evaluations) {
    const std::size_t dim = start.size();
    if (dim == 0 || step.size() != dim) {
        throw DomainError("nelder_mead: start and step must have equal, non-zero size");
    }
    SimplexResult res;
    std::vector<std::vector<double>> pts(dim + 1, start);
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) {
        pts[i + 1][i] += step[i];
    }
    auto eval = [&](const std::vector<double>& p) {
        ++res.evaluations;
        const double v = objective(p);
        return std::isnan(v) ? HUGE_VAL : v;
    };
    for (std::size_t i = 0; i <= dim; ++i) {
        vals[i] = eval(pts[i]);
    }
    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);

    auto point_along = [&](double coef, std::vector<double>& out) {
        const auto& worst = pts[order[dim]];
        for (std::size_t j = 0; j < dim; ++j) {
            out[j] = centroid[j] + coef * (worst[j] - centroid[j]);
        }
    };

    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const auto& best = pts[order[0]];
        double diameter = 0.0;
        for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                diameter = std::max(diameter, std::fabs(pts[order[i]][j] - best[j]));
            }
        }
        if (diameter < tolerance) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= max_evaluations) {
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                centroid[j] += pts[order[i]][j] / static_cast<double>(dim);
            }
        }
        const std::size_t w = order[dim];
        point_along(-1.0, trial);
        const double fr = eval(trial);
        if (fr < vals[order[0]]) {
            point_along(-2.0, trial2);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[w] = trial2;
                vals[w] = fe;
            } else {
                pts[w] = trial;
                vals[w] = fr;
            }
            continue;
        }
        if (fr < vals[order[dim - 1]]) {
            pts[w] = trial;
            vals[w] = fr;
            continue;
        }
        const bool outside = fr < vals[w];
        point_along(outside ? -0.5 : 0.5, trial2);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : vals[w])) {
            pts[w] = trial2;
            vals[w] = fc;
            continue;
        }
        const auto b = pts[order[0]];
        for (std::size_t i = 1; i <= dim; ++i) {
            auto& p = pts[order[i]];
            for (std::size_t j = 0; j < dim; ++j) {
                p[j] = b[j] + 0.5 * (p[j] - b[j]);
            }
            vals[order[i]] = eval(p);
        }
    }
    res.argmin = pts[order[0]];
    res.value = vals[order[0]];
    return res;
}

double log_gamma_ratio(double z, double a, double b) {
    if (z > 1e7) {
        // Stirling: (a-b) ln z + (a-b)(a+b-1)/(2z) + O(z^-2)
        const double d = a - b;
        return d * std::log(z) + d * (a + b - 1.0) / (2.0 * z);
    }
    return std::lgamma(z + a) - std::lgamma(z + b);
}

}  // namespace heavytails::numerics
