#pragma once

#include "heavytails/tail_models.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heavytails {

inline constexpr std::string_view kMissingCell = "--";

/// Column label for a sampling interval: "1 s", "10 s", "1 min", "1 h", "90 s".
std::string dt_label(std::int64_t dt_s);

struct TableRow {
    std::string asset_id;
    std::vector<std::optional<double>> alpha;  ///< one per dt column
    std::vector<std::optional<double>> beta;
};

/// Assets by rows (an alpha line and a beta line each), sampling intervals
/// by columns.
struct ResultTable {
    std::vector<std::int64_t> dt_grid;
    std::vector<TableRow> rows;
};

/// Fixed-width text; alpha with one decimal, beta with two, absent values as
/// kMissingCell. Throws DomainError for a table without rows or with rows
/// whose length does not match the grid.
std::string render_table(const ResultTable& table);

/// Full-precision companion: "asset,dt_s,alpha,beta" with empty fields for
/// absent values.
void write_table_companion(std::ostream& out, const ResultTable& table);

/// One flattened tail fit.
struct FitRecord {
    std::string asset_id;
    std::int64_t dt_s = 0;
    TailFamily family = TailFamily::power_law;
    std::optional<TailFitResult> fit;
    std::string error;
};

/// CSV with columns asset,dt_s,family,status,p1_name,p1,p2_name,p2,x_min,
/// x_max,n_points,sse,r_squared,error.
void write_fit_records(std::ostream& out, const std::vector<FitRecord>& records);

/// Records for every family of one fit set.
std::vector<FitRecord> flatten(const std::string& asset_id, std::int64_t dt_s, const FitSet& fits);

}  // namespace heavytails
