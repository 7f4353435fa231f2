#pragma once

#include "heavytails/calendar.hpp"
#include "heavytails/config.hpp"
#include "heavytails/market_data.hpp"
#include "heavytails/report.hpp"
#include "heavytails/sampling.hpp"
#include "heavytails/tail_models.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace heavytails {

std::string_view library_version();

/// Ticks and calendar of one configured asset.
struct LoadedAsset {
    std::string id;
    TickSeries ticks;
    TradingCalendar calendar;
    PriceBasis basis = PriceBasis::mid;
    ParseStats stats;
    std::string source;      ///< file path or distribution spec
    std::string input_hash;  ///< FNV-1a of the input bytes, or of the spec and seed
};

/// Reads (or generates) the asset's ticks. Throws on unreadable input.
LoadedAsset load_asset(const AssetConfig& asset, const PipelineConfig& config);

PeriodMask excision_mask(const PipelineConfig& config);

struct AssetDtSummary {
    std::int64_t dt_s = 0;
    std::size_t n_returns = 0;
    double raw_mean = 0.0;
    double raw_std = 0.0;
    FitSet fits;
    std::string ccdf_file;  ///< relative to the output directory
    std::string error;
};

struct AssetSummary {
    std::string id;
    std::string source;
    std::string input_hash;
    std::size_t n_ticks = 0;
    ParseStats stats;
    std::vector<AssetDtSummary> per_dt;
    std::string error;  ///< set when the asset could not be loaded
};

struct PipelineResult {
    std::filesystem::path out_dir;
    std::vector<AssetSummary> assets;  ///< sorted by id
    std::vector<std::string> warnings;
    std::vector<std::string> files;  ///< relative paths written, sorted
    std::size_t successful_fits = 0;

    bool ok() const { return successful_fits > 0; }
    int exit_code() const { return ok() ? 0 : 2; }
};

/// Runs every asset through resample, normalize, CCDF and tail fits at each
/// dt, then the requested cross-asset analyses, and writes the bundle:
///
///   manifest.json            config, hash, version, inputs, output hashes
///   table.txt, table.csv     alpha/beta table and its full-precision twin
///   fits.csv                 every fit of every family
///   ccdf/<asset>_dt<dt>.txt  CCDF point files
///   epps.txt, matrix_dt<dt>.txt, rolling_dt<dt>.txt, index_*.{txt,csv}
///
/// The bundle depends only on the inputs and the configuration. Failures of
/// single assets or analyses are recorded, not thrown.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Table of power-law alpha and stretched-exponential beta per asset and dt.
ResultTable table_from(const std::vector<AssetSummary>& assets,
                       const std::vector<std::int64_t>& dt_grid);

}  // namespace heavytails
