#include "heavytails/pipeline.hpp"

#include "heavytails/cross_correlation.hpp"
#include "heavytails/empirical_dist.hpp"
#include "heavytails/errors.hpp"
#include "heavytails/index_builder.hpp"
#include "heavytails/rng.hpp"
#include "heavytails/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#ifndef HEAVYTAILS_VERSION
#define HEAVYTAILS_VERSION "0.0.0"
#endif

namespace heavytails {

std::string_view library_version() { return HEAVYTAILS_VERSION; }

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class BundleWriter {
public:
    explicit BundleWriter(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_);
    }

    void write(const std::string& rel, const std::string& content) {
        const auto path = root_ / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) throw Error("cannot write " + path.string());
        hashes_[rel] = hex64(fnv1a64(content));
    }

    const std::map<std::string, std::string>& hashes() const { return hashes_; }

private:
    std::filesystem::path root_;
    std::map<std::string, std::string> hashes_;
};

template <class F>
std::string to_text(F&& writer) {
    std::ostringstream ss;
    writer(ss);
    return ss.str();
}

std::string file_safe(std::string id) {
    for (auto& c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_' || c == '.';
        if (!ok) c = '_';
    }
    return id;
}

json fit_json(const FamilyOutcome& o) {
    json j;
    if (!o.fit) {
        j["error"] = o.error;
        return j;
    }
    const auto& f = *o.fit;
    j["status"] = std::string(to_string(f.status));
    std::visit(
        [&j](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PowerLawParams>) {
                j["alpha"] = p.alpha;
                j["log_amplitude"] = p.log_amplitude;
            } else if constexpr (std::is_same_v<T, StretchedExpParams>) {
                j["beta"] = p.beta;
                j["x0"] = p.x0;
            } else {
                j["q"] = p.q;
                j["b_q"] = p.b_q;
            }
        },
        f.params);
    j["x_min"] = f.x_min;
    j["x_max"] = f.x_max;
    j["n_points"] = f.n_points;
    j["sse"] = f.sse;
    j["r_squared"] = f.r_squared;
    return j;
}

std::optional<double> table_alpha(const FitSet& fits) {
    const auto& o = fits.power_law;
    if (!o.fit || o.fit->status == FitStatus::non_physical) return std::nullopt;
    return std::get<PowerLawParams>(o.fit->params).alpha;
}

std::optional<double> table_beta(const FitSet& fits) {
    const auto& o = fits.stretched_exp;
    if (!o.fit || o.fit->status == FitStatus::non_physical) return std::nullopt;
    return std::get<StretchedExpParams>(o.fit->params).beta;
}

}  // namespace

LoadedAsset load_asset(const AssetConfig& asset, const PipelineConfig& config) {
    LoadedAsset out;
    out.id = asset.id;
    out.basis = asset.price;
    out.calendar = asset.calendar == "always"
                       ? TradingCalendar::always_open()
                       : TradingCalendar::load(config.resolve(asset.calendar));
    if (asset.synth) {
        RandomWalkOptions opt;
        opt.asset_id = asset.id;
        opt.n_ticks = asset.synth_ticks;
        opt.scale = asset.synth_scale;
        const std::uint64_t seed = derive_seed(config.seed, fnv1a64(asset.id));
        out.ticks = random_walk_ticks(*asset.synth, opt, seed);
        out.source = to_string(*asset.synth);
        out.input_hash = hex64(fnv1a64(out.source + "#" + std::to_string(seed)));
        out.stats.rows = out.ticks.ticks.size();
        if (out.basis == PriceBasis::bid || out.basis == PriceBasis::ask) {
            out.basis = PriceBasis::trade;
        }
        return out;
    }
    const auto path = config.resolve(asset.path);
    const std::string bytes = read_file(path);
    std::istringstream in(bytes);
    auto parsed = parse_ticks(in, TickFormat::parse(asset.format), asset.id);
    out.ticks = std::move(parsed.series);
    out.stats = parsed.stats;
    out.source = asset.path.generic_string();
    out.input_hash = hex64(fnv1a64(bytes));
    return out;
}

PeriodMask excision_mask(const PipelineConfig& config) { return PeriodMask(config.excise); }

ResultTable table_from(const std::vector<AssetSummary>& assets,
                       const std::vector<std::int64_t>& dt_grid) {
    ResultTable t;
    t.dt_grid = dt_grid;
    for (const auto& a : assets) {
        TableRow row;  // failed assets keep a row of missing cells
        row.asset_id = a.id;
        row.alpha.assign(dt_grid.size(), std::nullopt);
        row.beta.assign(dt_grid.size(), std::nullopt);
        for (const auto& d : a.per_dt) {
            const auto it = std::find(dt_grid.begin(), dt_grid.end(), d.dt_s);
            if (it == dt_grid.end() || !d.error.empty()) continue;
            const auto c = static_cast<std::size_t>(it - dt_grid.begin());
            row.alpha[c] = table_alpha(d.fits);
            row.beta[c] = table_beta(d.fits);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    PipelineResult result;
    result.out_dir = config.out_dir;
    BundleWriter bundle(config.out_dir);
    const PeriodMask mask = excision_mask(config);
    const bool keep_returns = config.analyses.epps || config.analyses.rolling;

    auto assets_cfg = config.assets;
    std::sort(assets_cfg.begin(), assets_cfg.end(),
              [](const AssetConfig& a, const AssetConfig& b) { return a.id < b.id; });

    std::vector<LoadedAsset> loaded;
    // returns_by_dt[d] holds the series of every asset that succeeded at dt d.
    std::vector<std::vector<ReturnSeries>> returns_by_dt(config.dt_grid.size());
    std::vector<FitRecord> records;

    for (const auto& acfg : assets_cfg) {
        AssetSummary summary;
        summary.id = acfg.id;
        LoadedAsset asset;
        try {
            asset = load_asset(acfg, config);
        } catch (const std::exception& e) {
            summary.error = e.what();
            result.warnings.push_back("asset " + acfg.id + " skipped: " + e.what());
            result.assets.push_back(std::move(summary));
            continue;
        }
        summary.source = asset.source;
        summary.input_hash = asset.input_hash;
        summary.n_ticks = asset.ticks.ticks.size();
        summary.stats = asset.stats;
        const TickSeries ticks = mask.empty() ? asset.ticks : excise(asset.ticks, mask);

        for (std::size_t d = 0; d < config.dt_grid.size(); ++d) {
            const auto dt = config.dt_grid[d];
            AssetDtSummary ds;
            ds.dt_s = dt;
            try {
                auto returns =
                    normalize(log_returns(sample_prices(ticks, dt, asset.calendar, mask, asset.basis)));
                ds.n_returns = returns.size();
                ds.raw_mean = returns.raw_mean;
                ds.raw_std = returns.raw_std;
                const auto ccdf = build_ccdf(returns);
                ds.fits = fit_all(ccdf, config.fit);
                ds.ccdf_file = "ccdf/" + file_safe(asset.id) + "_dt" + std::to_string(dt) + ".txt";
                bundle.write(ds.ccdf_file, to_text([&](std::ostream& o) { write_ccdf(o, ccdf); }));
                for (auto f : {TailFamily::power_law, TailFamily::stretched_exp, TailFamily::q_gaussian}) {
                    if (ds.fits[f].ok()) ++result.successful_fits;
                }
                if (keep_returns) returns_by_dt[d].push_back(std::move(returns));
            } catch (const Error& e) {
                ds.error = e.what();
                result.warnings.push_back("asset " + asset.id + " dt=" + std::to_string(dt) +
                                          " s: " + e.what());
            }
            auto recs = flatten(asset.id, dt, ds.fits);
            if (!ds.error.empty()) {
                for (auto& r : recs) r.error = ds.error;
            }
            records.insert(records.end(), recs.begin(), recs.end());
            summary.per_dt.push_back(std::move(ds));
        }
        result.assets.push_back(std::move(summary));
        if (config.analyses.index) loaded.push_back(std::move(asset));
    }

    // Table and fit records.
    const auto table = table_from(result.assets, config.dt_grid);
    if (!table.rows.empty()) {
        bundle.write("table.txt", render_table(table));
        bundle.write("table.csv", to_text([&](std::ostream& o) { write_table_companion(o, table); }));
    }
    bundle.write("fits.csv", to_text([&](std::ostream& o) { write_fit_records(o, records); }));

    json analyses = json::object();
    if (config.analyses.epps) {
        EppsCurve curve;
        curve.zero_filter = config.zero_filter;
        for (std::size_t d = 0; d < config.dt_grid.size(); ++d) {
            const auto dt = config.dt_grid[d];
            try {
                const auto c = correlation_matrix(returns_by_dt[d], config.zero_filter);
                curve.dt_grid.push_back(dt);
                curve.mean_coeff.push_back(mean_offdiag(c));
                curve.lambda_max.push_back(largest_eigenvalue(c).value);
                bundle.write("matrix_dt" + std::to_string(dt) + ".txt",
                             to_text([&](std::ostream& o) { write_matrix(o, c); }));
            } catch (const Error& e) {
                curve.warnings.push_back("dt=" + std::to_string(dt) + " s omitted: " + e.what());
            }
        }
        bundle.write("epps.txt", to_text([&](std::ostream& o) { write_epps_curve(o, curve); }));
        for (const auto& w : curve.warnings) result.warnings.push_back("epps " + w);
        analyses["epps"] = {{"file", "epps.txt"}, {"points", curve.dt_grid.size()}};
    }
    if (config.analyses.rolling) {
        RollingOptions opt;
        opt.window_ms = config.rolling_window_days * kMsPerDay;
        opt.step_ms = config.rolling_step_days * kMsPerDay;
        opt.zero_filter = config.rolling_zero_filter;
        json files = json::array();
        for (std::size_t d = 0; d < config.dt_grid.size(); ++d) {
            const auto dt = config.dt_grid[d];
            try {
                const auto r = rolling_mean_correlation(returns_by_dt[d], opt);
                const std::string name = "rolling_dt" + std::to_string(dt) + ".txt";
                bundle.write(name, to_text([&](std::ostream& o) { write_rolling(o, r); }));
                files.push_back({{"dt_s", dt}, {"file", name}, {"windows", r.points.size()},
                                 {"skipped", r.skipped_windows}});
            } catch (const Error& e) {
                result.warnings.push_back("rolling dt=" + std::to_string(dt) + " s omitted: " + e.what());
            }
        }
        analyses["rolling"] = files;
    }
    if (config.analyses.index) {
        std::vector<TickSeries> ticks;
        std::vector<TradingCalendar> calendars;
        for (const auto& a : loaded) {
            ticks.push_back(a.ticks);
            calendars.push_back(a.calendar);
        }
        json index_json = json::array();
        std::vector<std::pair<std::string, std::optional<PeriodMask>>> variants{{"INDEX", std::nullopt}};
        if (!mask.empty()) variants.emplace_back("INDEX_excised", mask);
        std::vector<AssetSummary> index_rows;
        std::vector<FitRecord> index_records;
        if (ticks.empty()) {
            result.warnings.push_back("index skipped: no loaded constituents");
        }
        for (const auto& [name, vmask] : variants) {
            if (ticks.empty()) break;
            AssetSummary row;
            row.id = name;
            const auto res = index_tail_experiment(ticks, config.dt_grid, calendars, vmask, config.fit);
            for (const auto& r : res) {
                AssetDtSummary ds;
                ds.dt_s = r.dt_s;
                ds.error = r.error;
                if (r.ok()) {
                    ds.n_returns = r.returns->size();
                    ds.raw_mean = r.returns->raw_mean;
                    ds.raw_std = r.returns->raw_std;
                    ds.fits = r.fits;
                    ds.ccdf_file = "ccdf/" + name + "_dt" + std::to_string(r.dt_s) + ".txt";
                    bundle.write(ds.ccdf_file, to_text([&](std::ostream& o) { write_ccdf(o, *r.ccdf); }));
                } else {
                    result.warnings.push_back(name + " dt=" + std::to_string(r.dt_s) + " s: " + r.error);
                }
                auto recs = flatten(name, r.dt_s, ds.fits);
                if (!ds.error.empty()) {
                    for (auto& rec : recs) rec.error = ds.error;
                }
                index_records.insert(index_records.end(), recs.begin(), recs.end());
                index_json.push_back({{"series", name}, {"dt_s", r.dt_s}, {"ccdf", ds.ccdf_file},
                                      {"error", ds.error}});
                row.per_dt.push_back(std::move(ds));
            }
            index_rows.push_back(std::move(row));
        }
        if (!index_rows.empty()) {
            const auto itable = table_from(index_rows, config.dt_grid);
            bundle.write("index_table.txt", render_table(itable));
            bundle.write("index_table.csv",
                         to_text([&](std::ostream& o) { write_table_companion(o, itable); }));
            bundle.write("index_fits.csv",
                         to_text([&](std::ostream& o) { write_fit_records(o, index_records); }));
        }
        analyses["index"] = index_json;
    }

    // Manifest: everything needed to regenerate the bundle, no wall-clock data.
    json m;
    m["tool"] = "heavytails";
    m["version"] = std::string(library_version());
    m["config_hash"] = config.hash();
    m["config"] = config.to_text(false);
    m["seed"] = config.seed;
    json assets = json::array();
    for (const auto& a : result.assets) {
        json ja;
        ja["id"] = a.id;
        if (!a.error.empty()) {
            ja["error"] = a.error;
            assets.push_back(ja);
            continue;
        }
        ja["source"] = a.source;
        ja["input_fnv1a64"] = a.input_hash;
        ja["ticks"] = a.n_ticks;
        ja["rows"] = a.stats.rows;
        ja["skipped_malformed"] = a.stats.skipped_malformed;
        ja["dropped_reordered"] = a.stats.dropped_reordered;
        ja["superseded_duplicates"] = a.stats.superseded_duplicates;
        json per_dt = json::array();
        for (const auto& d : a.per_dt) {
            json jd;
            jd["dt_s"] = d.dt_s;
            if (!d.error.empty()) {
                jd["error"] = d.error;
            } else {
                jd["n_returns"] = d.n_returns;
                jd["raw_mean"] = d.raw_mean;
                jd["raw_std"] = d.raw_std;
                jd["ccdf"] = d.ccdf_file;
                jd["power_law"] = fit_json(d.fits.power_law);
                jd["stretched_exp"] = fit_json(d.fits.stretched_exp);
                jd["q_gaussian"] = fit_json(d.fits.q_gaussian);
            }
            per_dt.push_back(jd);
        }
        ja["dt"] = per_dt;
        assets.push_back(ja);
    }
    m["assets"] = assets;
    m["analyses"] = analyses;
    m["warnings"] = result.warnings;
    json outputs = json::object();
    for (const auto& [rel, h] : bundle.hashes()) outputs[rel] = h;
    m["outputs"] = outputs;
    bundle.write("manifest.json", m.dump(2) + "\n");

    for (const auto& [rel, h] : bundle.hashes()) result.files.push_back(rel);
    return result;
}

}  // namespace heavytails
