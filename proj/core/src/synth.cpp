#include "heavytails/synth.hpp"

#include "heavytails/errors.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

namespace heavytails {

void validate(const DistSpec& spec) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ParetoDist>) {
                if (!(d.alpha > 0.0) || !(d.x_min > 0.0)) {
                    throw DomainError("pareto requires alpha > 0 and x_min > 0");
                }
            } else if constexpr (std::is_same_v<T, StudentTDist>) {
                if (!(d.nu > 0.0)) throw DomainError("student_t requires nu > 0");
            } else if constexpr (std::is_same_v<T, LevyStableDist>) {
                if (!(d.alpha > 0.0 && d.alpha < 2.0)) {
                    throw DomainError("levy_stable requires 0 < alpha < 2");
                }
            } else if constexpr (std::is_same_v<T, QGaussianDist>) {
                if (!(d.q > 1.0 && d.q < 3.0)) throw DomainError("q_gaussian requires 1 < q < 3");
            }
        },
        spec);
}

DistSpec parse_dist_spec(std::string_view text) {
    text = detail::trim(text);
    std::string_view name = text;
    std::map<std::string, double, std::less<>> args;
    if (const auto open = text.find('('); open != std::string_view::npos) {
        if (text.back() != ')') {
            throw ParseError("distribution spec '" + std::string(text) + "' lacks ')'");
        }
        name = detail::trim(text.substr(0, open));
        const auto inner = text.substr(open + 1, text.size() - open - 2);
        if (!detail::trim(inner).empty()) {
            for (auto part : detail::split(inner, ',')) {
                const auto eq = part.find('=');
                if (eq == std::string_view::npos) {
                    throw ParseError("distribution parameter '" + std::string(part) +
                                     "' lacks '='");
                }
                const auto key = detail::trim(part.substr(0, eq));
                const auto value = detail::to_double(detail::trim(part.substr(eq + 1)));
                if (!value) {
                    throw ParseError("bad value for distribution parameter '" + std::string(key) + "'");
                }
                args.emplace(std::string(key), *value);
            }
        }
    }
    auto take = [&](std::string_view key, std::optional<double> fallback) {
        if (auto it = args.find(key); it != args.end()) {
            const double v = it->second;
            args.erase(it);
            return v;
        }
        if (!fallback) {
            throw ParseError("distribution '" + std::string(name) + "' needs parameter '" +
                             std::string(key) + "'");
        }
        return *fallback;
    };
    DistSpec spec;
    if (name == "gaussian" || name == "normal") {
        spec = GaussianDist{};
    } else if (name == "pareto") {
        const double alpha = take("alpha", std::nullopt);
        spec = ParetoDist{alpha, take("x_min", 1.0)};
    } else if (name == "student_t") {
        spec = StudentTDist{take("nu", std::nullopt)};
    } else if (name == "levy_stable") {
        spec = LevyStableDist{take("alpha", std::nullopt)};
    } else if (name == "q_gaussian") {
        spec = QGaussianDist{take("q", std::nullopt)};
    } else {
        throw ParseError("unknown distribution family '" + std::string(name) + "'");
    }
    if (!args.empty()) {
        throw ParseError("unexpected parameter '" + args.begin()->first + "' for " +
                         std::string(name));
    }
    validate(spec);
    return spec;
}

std::string to_string(const DistSpec& spec) {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            using detail::format_double;
            if constexpr (std::is_same_v<T, GaussianDist>) {
                return "gaussian";
            } else if constexpr (std::is_same_v<T, ParetoDist>) {
                return "pareto(alpha=" + format_double(d.alpha) + ",x_min=" + format_double(d.x_min) + ")";
            } else if constexpr (std::is_same_v<T, StudentTDist>) {
                return "student_t(nu=" + format_double(d.nu) + ")";
            } else if constexpr (std::is_same_v<T, LevyStableDist>) {
                return "levy_stable(alpha=" + format_double(d.alpha) + ")";
            } else {
                return "q_gaussian(q=" + format_double(d.q) + ")";
            }
        },
        spec);
}

double tail_index_of(const DistSpec& spec) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GaussianDist>) {
                return std::numeric_limits<double>::infinity();
            } else if constexpr (std::is_same_v<T, ParetoDist>) {
                return d.alpha;
            } else if constexpr (std::is_same_v<T, StudentTDist>) {
                return d.nu;
            } else if constexpr (std::is_same_v<T, LevyStableDist>) {
                return d.alpha;
            } else {
                return (3.0 - d.q) / (d.q - 1.0);
            }
        },
        spec);
}

Sampler::Sampler(DistSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed), normal_(rng_) {
    validate(spec_);
}

double Sampler::gamma(double shape) {
    // Marsaglia & Tsang (2000); shapes below one use the U^(1/a) boost.
    if (shape < 1.0) {
        const double u = rng_.uniform_open();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = normal_();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng_.uniform_open();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            return d * v;
        }
    }
}

double Sampler::operator()() {
    constexpr double pi = std::numbers::pi;
    return std::visit(
        [this](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GaussianDist>) {
                return normal_();
            } else if constexpr (std::is_same_v<T, ParetoDist>) {
                return d.x_min * std::pow(rng_.uniform_open(), -1.0 / d.alpha);
            } else if constexpr (std::is_same_v<T, StudentTDist>) {
                const double z = normal_();
                const double chi2 = 2.0 * gamma(0.5 * d.nu);
                return z / std::sqrt(chi2 / d.nu);
            } else if constexpr (std::is_same_v<T, LevyStableDist>) {
                const double v = pi * (rng_.uniform_open() - 0.5);
                const double w = -std::log(rng_.uniform_open());
                const double a = d.alpha;
                if (a == 1.0) {
                    return std::tan(v);
                }
                return std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
                       std::pow(std::cos(v - a * v) / w, (1.0 - a) / a);
            } else {
                const double qp = (1.0 + d.q) / (3.0 - d.q);
                const double u1 = rng_.uniform_open();
                const double u2 = rng_.uniform();
                const double ln_q = (std::pow(u1, 1.0 - qp) - 1.0) / (1.0 - qp);
                return std::sqrt(-2.0 * ln_q) * std::cos(2.0 * pi * u2);
            }
        },
        spec_);
}

std::vector<double> generate(const DistSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 1) {
        throw DomainError("generate needs n >= 1");
    }
    Sampler s(spec, seed);
    std::vector<double> out(n);
    for (auto& v : out) v = s();
    return out;
}

void write_ticks(const TickSeries& series, const std::filesystem::path& path,
                 const TickFormat& format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write tick file " + path.string());
    }
    serialize_ticks(out, series, format);
    out.flush();
    if (!out) {
        throw Error("error while writing " + path.string());
    }
}

TickSeries random_walk_ticks(const DistSpec& increments, const RandomWalkOptions& opt,
                             std::uint64_t seed) {
    if (opt.spacing_ms <= 0 || !(opt.start_price > 0.0)) {
        throw DomainError("random walk needs positive spacing and start price");
    }
    Sampler draw(increments, seed);
    SplitMix64 coin(derive_seed(seed, 1));
    const bool one_sided = std::holds_alternative<ParetoDist>(increments);
    TickSeries out;
    out.asset_id = opt.asset_id;
    out.ticks.reserve(opt.n_ticks);
    double log_p = std::log(opt.start_price);
    for (std::size_t i = 0; i < opt.n_ticks; ++i) {
        if (i > 0) {
            double x = draw();
            if (one_sided && opt.random_sign && (coin() >> 63) != 0) {
                x = -x;
            }
            log_p += opt.scale * x;
        }
        Tick t;
        t.timestamp = opt.start + static_cast<EpochMs>(i) * opt.spacing_ms;
        t.trade_price = std::exp(log_p);
        out.ticks.push_back(t);
    }
    return out;
}

std::pair<TickSeries, TickSeries> simulate_async_pair(double rho, double mean_intertick_s,
                                                      double duration_s, std::uint64_t seed,
                                                      const AsyncPairOptions& opt) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw DomainError("latent correlation must lie in (-1, 1)");
    }
    if (!(mean_intertick_s > 0.0) || !(duration_s > 0.0)) {
        throw DomainError("inter-tick spacing and duration must be positive");
    }
    SplitMix64 arrivals_a(derive_seed(seed, 1));
    SplitMix64 arrivals_b(derive_seed(seed, 2));
    SplitMix64 diffusion(derive_seed(seed, 3));
    GaussianSource normal(diffusion);
    auto exp_draw = [mean_intertick_s](SplitMix64& r) {
        return -mean_intertick_s * std::log(r.uniform_open());
    };

    std::pair<TickSeries, TickSeries> out;
    out.first.asset_id = "A";
    out.second.asset_id = "B";
    const double rho_c = std::sqrt(1.0 - rho * rho);
    double x1 = 0.0;
    double x2 = 0.0;
    double now = 0.0;
    double next_a = exp_draw(arrivals_a);
    double next_b = exp_draw(arrivals_b);

    auto emit = [&](TickSeries& ts, double t, double x) {
        Tick tick;
        tick.timestamp = opt.start + static_cast<EpochMs>(std::llround(t * 1000.0));
        tick.trade_price = opt.start_price * std::exp(x);
        if (!ts.ticks.empty() && ts.ticks.back().timestamp == tick.timestamp) {
            ts.ticks.back() = tick;  // same millisecond: later observation wins
        } else {
            ts.ticks.push_back(tick);
        }
    };

    while (true) {
        const bool a_next = next_a <= next_b;
        const double t = a_next ? next_a : next_b;
        if (t > duration_s) {
            break;
        }
        const double sd = opt.volatility * std::sqrt(t - now);
        const double z1 = normal();
        const double z2 = normal();
        x1 += sd * z1;
        x2 += sd * (rho * z1 + rho_c * z2);
        now = t;
        if (a_next) {
            emit(out.first, t, x1);
            next_a = t + exp_draw(arrivals_a);
        } else {
            emit(out.second, t, x2);
            next_b = t + exp_draw(arrivals_b);
        }
    }
    return out;
}

}  // namespace heavytails
