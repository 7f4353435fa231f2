#pragma once

#include "heavytails/calendar.hpp"
#include "heavytails/cross_correlation.hpp"
#include "heavytails/market_data.hpp"
#include "heavytails/synth.hpp"
#include "heavytails/tail_models.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heavytails {

/// Input asset: either a tick file or a synthetic random walk.
struct AssetConfig {
    std::string id;
    std::filesystem::path path;
    std::string calendar = "always";
    std::string format = "ts,bid,ask;unit=ms;delim=,;header=1";
    PriceBasis price = PriceBasis::mid;
    std::optional<DistSpec> synth;
    std::size_t synth_ticks = 100000;
    double synth_scale = 1e-4;
};

struct AnalysisSet {
    bool epps = false;
    bool rolling = false;
    bool index = false;
};

/// Config grammar (sections, one `key = value` per line, '#' comments):
///
///     [pipeline]
///     dt = 1, 10, 60, 600, 3600
///     tail_fraction = 0.01
///     body = 1e-4, 0.5
///     zero_filter = either
///     rolling_zero_filter = off
///     rolling_window_days = 30
///     rolling_step_days = 1
///     seed = 7
///     out = results
///     excise = 2020-03-09..2020-03-28      (repeatable, half-open)
///     analyses = epps, rolling, index
///
///     [asset DAX]
///     path = dax.csv                        (relative to the config file)
///     calendar = always | calendar file
///     format = ts,bid,ask;unit=ms
///     price = mid
///
///     [asset SYN]
///     synth = pareto(alpha=3)
///     ticks = 100000
///     scale = 1e-4
struct PipelineConfig {
    std::vector<AssetConfig> assets;
    std::vector<std::int64_t> dt_grid{1, 10, 60, 600, 3600};
    FitConfig fit;
    ZeroFilter zero_filter = ZeroFilter::either;
    ZeroFilter rolling_zero_filter = ZeroFilter::off;
    std::int64_t rolling_window_days = 30;
    std::int64_t rolling_step_days = 1;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "heavytails-out";
    std::vector<UtcInterval> excise;
    AnalysisSet analyses;
    std::filesystem::path base_dir;  ///< relative asset paths resolve here

    /// Throws DomainError on zero assets, duplicate ids or paths, a dt grid
    /// that is not strictly ascending and positive, or bad fit settings.
    void validate() const;

    /// Canonical text form; parsing it yields an equal configuration. The
    /// output directory can be left out so bundles written to different
    /// places stay comparable.
    std::string to_text(bool include_output = true) const;

    /// FNV-1a 64 of the canonical text without the output directory, as 16
    /// hex digits.
    std::string hash() const;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// "START..END" with ISO-8601 instants or dates.
UtcInterval parse_excise_window(std::string_view text);
std::vector<std::int64_t> parse_dt_list(std::string_view text);

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace heavytails
