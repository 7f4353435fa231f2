#include "heavytails/config.hpp"
#include "heavytails/cross_correlation.hpp"
#include "heavytails/empirical_dist.hpp"
#include "heavytails/errors.hpp"
#include "heavytails/index_builder.hpp"
#include "heavytails/pipeline.hpp"
#include "heavytails/report.hpp"
#include "heavytails/series_io.hpp"
#include "heavytails/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
namespace ht = heavytails;

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::string dt;
    std::optional<double> tail_fraction;
    std::string zero_filter;
    std::vector<std::string> excise;
    std::optional<std::uint64_t> seed;
};

void add_override_flags(CLI::App* cmd, Overrides& o, bool need_config) {
    auto* c = cmd->add_option("--config", o.config, "pipeline configuration file");
    if (need_config) c->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory (overrides config and HEAVYTAILS_OUT)");
    cmd->add_option("--dt", o.dt, "comma-separated sampling intervals in seconds");
    cmd->add_option("--tail-fraction", o.tail_fraction, "fraction of largest |r| for the power-law fit");
    cmd->add_option("--zero-filter", o.zero_filter, "true|false|both");
    cmd->add_option("--excise", o.excise, "START..END window to remove (repeatable)");
    cmd->add_option("--seed", o.seed, "seed for synthetic assets");
}

ht::PipelineConfig configure(const Overrides& o) {
    auto cfg = ht::load_config(o.config);
    if (const char* env = std::getenv("HEAVYTAILS_OUT"); env != nullptr && *env != '\0') {
        cfg.out_dir = env;
    }
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.dt.empty()) cfg.dt_grid = ht::parse_dt_list(o.dt);
    if (o.tail_fraction) cfg.fit.tail_fraction = *o.tail_fraction;
    if (!o.zero_filter.empty()) cfg.zero_filter = ht::parse_zero_filter(o.zero_filter);
    if (!o.excise.empty()) {
        cfg.excise.clear();
        for (const auto& w : o.excise) cfg.excise.push_back(ht::parse_excise_window(w));
    }
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate();
    return cfg;
}

std::vector<ht::LoadedAsset> load_all(const ht::PipelineConfig& cfg) {
    std::vector<ht::LoadedAsset> out;
    for (const auto& a : cfg.assets) out.push_back(ht::load_asset(a, cfg));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw ht::Error("cannot write " + path.string());
}

template <class F>
std::string capture(F&& f) {
    std::ostringstream ss;
    f(ss);
    return ss.str();
}

ht::PeriodMask mask_from(const std::vector<std::string>& windows) {
    std::vector<ht::UtcInterval> iv;
    for (const auto& w : windows) iv.push_back(ht::parse_excise_window(w));
    return ht::PeriodMask(std::move(iv));
}

std::string fit_line(const ht::FamilyOutcome& o) {
    if (!o.fit) return "failed (" + o.error + ")";
    const auto& f = *o.fit;
    char buf[160];
    std::visit(
        [&buf](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ht::PowerLawParams>) {
                std::snprintf(buf, sizeof buf, "alpha=%.4f", p.alpha);
            } else if constexpr (std::is_same_v<T, ht::StretchedExpParams>) {
                std::snprintf(buf, sizeof buf, "beta=%.4f x0=%.4g", p.beta, p.x0);
            } else {
                std::snprintf(buf, sizeof buf, "q=%.4f B=%.4g", p.q, p.b_q);
            }
        },
        f.params);
    return std::string(buf) + " n=" + std::to_string(f.n_points) + " status=" +
           std::string(ht::to_string(f.status));
}

void print_fits(const ht::FitSet& fits) {
    std::cout << "  power_law      " << fit_line(fits.power_law) << "\n"
              << "  stretched_exp  " << fit_line(fits.stretched_exp) << "\n"
              << "  q_gaussian     " << fit_line(fits.q_gaussian) << "\n";
}

// -- subcommands --------------------------------------------------------------

struct IngestArgs {
    std::string input, format = "ts,bid,ask;unit=ms", asset, calendar, output, output_format;
};

int run_ingest(const IngestArgs& a) {
    auto parsed = ht::parse_tick_file(a.input, ht::TickFormat::parse(a.format), a.asset);
    auto series = std::move(parsed.series);
    if (!a.calendar.empty()) {
        series = ht::session_filter(series, ht::TradingCalendar::resolve(a.calendar));
    }
    const auto& s = parsed.stats;
    std::cout << "asset " << series.asset_id << "\n"
              << "rows " << s.rows << "\n"
              << "ticks " << series.ticks.size() << "\n"
              << "skipped_malformed " << s.skipped_malformed << "\n"
              << "dropped_reordered " << s.dropped_reordered << "\n"
              << "superseded_duplicates " << s.superseded_duplicates << "\n";
    if (!series.ticks.empty()) {
        std::cout << "first " << ht::format_iso8601(series.ticks.front().timestamp) << "\n"
                  << "last " << ht::format_iso8601(series.ticks.back().timestamp) << "\n";
    }
    if (!a.output.empty()) {
        const auto fmt = ht::TickFormat::parse(a.output_format.empty() ? a.format : a.output_format);
        ht::write_ticks(series, a.output, fmt);
    }
    return 0;
}

struct ResampleArgs {
    std::string input, format = "ts,bid,ask;unit=ms", asset, calendar = "always", dt = "1,10,60,600,3600",
                         price = "mid", out = ".";
    std::vector<std::string> excise;
};

int run_resample(const ResampleArgs& a) {
    auto ticks = ht::parse_tick_file(a.input, ht::TickFormat::parse(a.format), a.asset).series;
    const auto cal = ht::TradingCalendar::resolve(a.calendar);
    const auto mask = mask_from(a.excise);
    if (!mask.empty()) ticks = ht::excise(ticks, mask);
    const auto basis = ht::parse_price_basis(a.price);
    fs::create_directories(a.out);
    int failures = 0;
    for (const auto dt : ht::parse_dt_list(a.dt)) {
        const auto prices = ht::sample_prices(ticks, dt, cal, mask, basis);
        const std::string stem = (fs::path(a.out) / (ticks.asset_id + "_dt" + std::to_string(dt))).string();
        ht::save_price_series(stem + ".prices.csv", prices);
        try {
            const auto returns = ht::normalize(ht::log_returns(prices));
            ht::save_return_series(stem + ".returns.csv", returns);
            std::cout << "dt=" << dt << " s: " << prices.size() << " slots, " << returns.size()
                      << " returns\n";
        } catch (const ht::Error& e) {
            ++failures;
            std::cerr << "dt=" << dt << " s: " << e.what() << "\n";
        }
    }
    return failures == 0 ? 0 : 2;
}

struct FitArgs {
    std::string returns, values, out;
    double tail_fraction = ht::kDefaultTailFraction;
    double body_min = 1e-4, body_max = 0.5;
};

int run_fit(const FitArgs& a) {
    ht::EmpiricalCcdf ccdf;
    std::string id = "sample";
    std::int64_t dt = 0;
    if (!a.returns.empty()) {
        const auto r = ht::load_return_series(a.returns);
        id = r.asset_id;
        dt = r.dt_s;
        ccdf = ht::build_ccdf(r);
    } else {
        std::ifstream in(a.values);
        if (!in) throw ht::Error("cannot read " + a.values);
        std::vector<double> v;
        for (double x; in >> x;) v.push_back(x);
        ccdf = ht::build_ccdf(v);
    }
    ht::FitConfig cfg;
    cfg.tail_fraction = a.tail_fraction;
    cfg.body = {a.body_min, a.body_max};
    const auto fits = ht::fit_all(ccdf, cfg);
    std::cout << id << " n=" << ccdf.size() << "\n";
    print_fits(fits);
    if (!a.out.empty()) {
        write_text(fs::path(a.out) / "ccdf.txt", capture([&](std::ostream& o) { ht::write_ccdf(o, ccdf); }));
        write_text(fs::path(a.out) / "fits.csv",
                   capture([&](std::ostream& o) { ht::write_fit_records(o, ht::flatten(id, dt, fits)); }));
    }
    const bool any = fits.power_law.ok() || fits.stretched_exp.ok() || fits.q_gaussian.ok();
    return any ? 0 : 2;
}

int run_epps(const Overrides& o) {
    const auto cfg = configure(o);
    const auto assets = load_all(cfg);
    std::vector<ht::TickSeries> ticks;
    std::vector<ht::TradingCalendar> cals;
    for (const auto& a : assets) {
        ticks.push_back(a.ticks);
        cals.push_back(a.calendar);
    }
    const auto curve = ht::epps_curve(ticks, cfg.dt_grid, cals, cfg.zero_filter, ht::PeriodMask(cfg.excise));
    for (const auto& w : curve.warnings) std::cerr << w << "\n";
    const auto text = capture([&](std::ostream& out) { ht::write_epps_curve(out, curve); });
    std::cout << text;
    write_text(cfg.out_dir / "epps.txt", text);
    return curve.dt_grid.empty() ? 2 : 0;
}

int run_rolling(const Overrides& o, std::int64_t window_days, std::int64_t step_days) {
    auto cfg = configure(o);
    const auto assets = load_all(cfg);
    const ht::PeriodMask mask(cfg.excise);
    ht::RollingOptions opt;
    // 0 means "as configured"
    opt.window_ms = (window_days > 0 ? window_days : cfg.rolling_window_days) * ht::kMsPerDay;
    opt.step_ms = (step_days > 0 ? step_days : cfg.rolling_step_days) * ht::kMsPerDay;
    opt.zero_filter = o.zero_filter.empty() ? cfg.rolling_zero_filter : cfg.zero_filter;
    int written = 0;
    for (const auto dt : cfg.dt_grid) {
        std::vector<ht::ReturnSeries> returns;
        try {
            for (const auto& a : assets) {
                const auto t = mask.empty() ? a.ticks : ht::excise(a.ticks, mask);
                returns.push_back(ht::normalize(ht::log_returns(ht::sample_prices(t, dt, a.calendar, mask, a.basis))));
            }
            const auto r = ht::rolling_mean_correlation(returns, opt);
            const std::string name = "rolling_dt" + std::to_string(dt) + ".txt";
            write_text(cfg.out_dir / name, capture([&](std::ostream& out) { ht::write_rolling(out, r); }));
            std::cout << "dt=" << dt << " s: " << r.points.size() << " windows, " << r.skipped_windows
                      << " skipped -> " << (cfg.out_dir / name).string() << "\n";
            ++written;
        } catch (const ht::Error& e) {
            std::cerr << "dt=" << dt << " s: " << e.what() << "\n";
        }
    }
    return written > 0 ? 0 : 2;
}

int run_index(const Overrides& o) {
    const auto cfg = configure(o);
    const auto assets = load_all(cfg);
    std::vector<ht::TickSeries> ticks;
    std::vector<ht::TradingCalendar> cals;
    for (const auto& a : assets) {
        ticks.push_back(a.ticks);
        cals.push_back(a.calendar);
    }
    std::optional<ht::PeriodMask> mask;
    if (!cfg.excise.empty()) mask = ht::PeriodMask(cfg.excise);
    const auto res = ht::index_tail_experiment(ticks, cfg.dt_grid, cals, mask, cfg.fit);
    std::vector<ht::AssetSummary> rows(1);
    rows[0].id = mask ? "INDEX_excised" : "INDEX";
    std::vector<ht::FitRecord> records;
    for (const auto& r : res) {
        std::cout << "dt=" << r.dt_s << " s\n";
        ht::AssetDtSummary ds;
        ds.dt_s = r.dt_s;
        ds.error = r.error;
        if (r.ok()) {
            ds.fits = r.fits;
            print_fits(r.fits);
            write_text(cfg.out_dir / "ccdf" / (rows[0].id + "_dt" + std::to_string(r.dt_s) + ".txt"),
                       capture([&](std::ostream& out) { ht::write_ccdf(out, *r.ccdf); }));
        } else {
            std::cout << "  failed: " << r.error << "\n";
        }
        const auto recs = ht::flatten(rows[0].id, r.dt_s, r.fits);
        records.insert(records.end(), recs.begin(), recs.end());
        rows[0].per_dt.push_back(ds);
    }
    const auto table = ht::table_from(rows, cfg.dt_grid);
    std::cout << ht::render_table(table);
    write_text(cfg.out_dir / "index_table.txt", ht::render_table(table));
    write_text(cfg.out_dir / "index_fits.csv",
               capture([&](std::ostream& out) { ht::write_fit_records(out, records); }));
    return std::any_of(res.begin(), res.end(), [](const auto& r) { return r.ok(); }) ? 0 : 2;
}

struct SynthArgs {
    std::string dist = "gaussian", output, format = "ts,price;unit=ms", asset = "SYN";
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    bool ticks = false;
    double scale = 1e-4;
    std::optional<double> pair_rho;
    double intertick = 10.0;
    double duration = 86400.0;
};

int run_synth(const SynthArgs& a) {
    if (a.pair_rho) {
        auto [x, y] = ht::simulate_async_pair(*a.pair_rho, a.intertick, a.duration, a.seed);
        const auto fmt = ht::TickFormat::parse(a.format);
        const fs::path prefix = a.output.empty() ? fs::path("pair") : fs::path(a.output);
        ht::write_ticks(x, prefix.string() + "_A.csv", fmt);
        ht::write_ticks(y, prefix.string() + "_B.csv", fmt);
        std::cout << "A " << x.ticks.size() << " ticks, B " << y.ticks.size() << " ticks\n";
        return 0;
    }
    const auto spec = ht::parse_dist_spec(a.dist);
    if (a.ticks) {
        ht::RandomWalkOptions opt;
        opt.asset_id = a.asset;
        opt.n_ticks = a.n;
        opt.scale = a.scale;
        const auto series = ht::random_walk_ticks(spec, opt, a.seed);
        if (a.output.empty()) {
            ht::serialize_ticks(std::cout, series, ht::TickFormat::parse(a.format));
        } else {
            ht::write_ticks(series, a.output, ht::TickFormat::parse(a.format));
        }
        return 0;
    }
    const auto values = ht::generate(spec, a.n, a.seed);
    std::string buf;
    char tmp[32];
    for (double v : values) {
        std::snprintf(tmp, sizeof tmp, "%.17g\n", v);
        buf += tmp;
    }
    if (a.output.empty()) {
        std::cout << buf;
    } else {
        write_text(a.output, buf);
    }
    return 0;
}

int run_report(const Overrides& o) {
    const auto cfg = configure(o);
    const auto result = ht::run_pipeline(cfg);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    const auto table = ht::table_from(result.assets, cfg.dt_grid);
    if (!table.rows.empty()) std::cout << ht::render_table(table);
    std::cout << "bundle " << result.out_dir.string() << " (" << result.files.size() << " files, config "
              << cfg.hash() << ")\n";
    if (!result.ok()) std::cerr << "no asset produced a tail fit\n";
    return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"htails: heavy-tail analysis of high-frequency returns"};
    app.set_version_flag("--version", std::string(ht::library_version()));
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "parse a tick file and report ingestion statistics");
    c_ingest->add_option("--input", ingest.input, "tick file")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--format", ingest.format, "column descriptor, e.g. ts,bid,ask;unit=ms");
    c_ingest->add_option("--asset", ingest.asset, "asset id (default: file stem)");
    c_ingest->add_option("--calendar", ingest.calendar, "drop ticks outside sessions (always|FILE)");
    c_ingest->add_option("--output", ingest.output, "write the cleaned ticks here");
    c_ingest->add_option("--output-format", ingest.output_format, "descriptor for --output");

    ResampleArgs resample;
    auto* c_resample = app.add_subcommand("resample", "previous-tick sampling and normalized returns");
    c_resample->add_option("--input", resample.input, "tick file")->required()->check(CLI::ExistingFile);
    c_resample->add_option("--format", resample.format, "column descriptor");
    c_resample->add_option("--asset", resample.asset, "asset id (default: file stem)");
    c_resample->add_option("--calendar", resample.calendar, "always|FILE");
    c_resample->add_option("--dt", resample.dt, "comma-separated intervals in seconds");
    c_resample->add_option("--price", resample.price, "mid|bid|ask|trade");
    c_resample->add_option("--excise", resample.excise, "START..END window to remove (repeatable)");
    c_resample->add_option("--out", resample.out, "output directory");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "CCDF and tail fits of a return series or plain sample");
    auto* g = c_fit->add_option_group("input");
    g->add_option("--returns", fit.returns, "return series file written by resample");
    g->add_option("--values", fit.values, "whitespace-separated numbers");
    g->require_option(1);
    c_fit->add_option("--tail-fraction", fit.tail_fraction, "fraction of largest |r|");
    c_fit->add_option("--body-min", fit.body_min, "lower probability of the body region");
    c_fit->add_option("--body-max", fit.body_max, "upper probability of the body region");
    c_fit->add_option("--out", fit.out, "write ccdf.txt and fits.csv here");

    Overrides epps_o, rolling_o, index_o, report_o;
    auto* c_epps = app.add_subcommand("epps", "mean cross-correlation versus sampling interval");
    add_override_flags(c_epps, epps_o, true);
    auto* c_rolling = app.add_subcommand("rolling", "rolling-window mean cross-correlation");
    add_override_flags(c_rolling, rolling_o, true);
    std::int64_t window_days = 0, step_days = 0;
    c_rolling->add_option("--window-days", window_days, "window length in days (default: config)");
    c_rolling->add_option("--step-days", step_days, "window step in days (default: config)");
    auto* c_index = app.add_subcommand("index", "tail fits of the equal-quote index of all assets");
    add_override_flags(c_index, index_o, true);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "seeded synthetic samples, tick walks or asynchronous pairs");
    c_synth->add_option("--dist", synth.dist, "distribution, e.g. pareto(alpha=3)");
    c_synth->add_option("--n", synth.n, "number of values or ticks");
    c_synth->add_option("--seed", synth.seed, "generator seed");
    c_synth->add_flag("--ticks", synth.ticks, "emit a random-walk tick file instead of values");
    c_synth->add_option("--scale", synth.scale, "log-price increment scale for --ticks");
    c_synth->add_option("--asset", synth.asset, "asset id for --ticks");
    c_synth->add_option("--format", synth.format, "tick file descriptor");
    c_synth->add_option("--pair", synth.pair_rho, "simulate an asynchronous pair with this correlation");
    c_synth->add_option("--intertick", synth.intertick, "mean seconds between ticks for --pair");
    c_synth->add_option("--duration", synth.duration, "simulated seconds for --pair");
    c_synth->add_option("--output", synth.output, "output file (prefix for --pair)");

    auto* c_report = app.add_subcommand("report", "run the full pipeline and write the report bundle");
    add_override_flags(c_report, report_o, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_ingest->parsed()) return run_ingest(ingest);
        if (c_resample->parsed()) return run_resample(resample);
        if (c_fit->parsed()) return run_fit(fit);
        if (c_epps->parsed()) return run_epps(epps_o);
        if (c_rolling->parsed()) return run_rolling(rolling_o, window_days, step_days);
        if (c_index->parsed()) return run_index(index_o);
        if (c_synth->parsed()) return run_synth(synth);
        if (c_report->parsed()) return run_report(report_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
