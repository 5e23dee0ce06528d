#pragma once

// Result tables and their CSV / JSON serialization.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "spinlink/config.hpp"
#include "spinlink/core_model.hpp"
#include "spinlink/rate_model.hpp"
#include "spinlink/sweep.hpp"

namespace spinlink {

using TableCell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<TableCell>> rows;

  void add_column(const std::string& name, const TableCell& value);  // to every row
};

/// Shortest representation that parses back to the same double; "inf", "-inf", "nan"
/// for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Long format: one row per cell with the axis coordinates, every value column
/// and a status column.
Table to_table(const SweepResult& result);
Table to_table(const RateResult& result);
Table to_table(const FidelityReport& report);

/// CSV: header row, "." decimals, newline-terminated rows, plus a config_hash
/// column when metadata carries one. JSON: {"metadata": ..., "columns": [...],
/// "rows": [[...]]}. Throws IoError when the path cannot be written.
void write_table(const Table& table, TableFormat format, const std::filesystem::path& path,
                 const nlohmann::json& metadata = {});
void write_table(const Table& table, TableFormat format, std::ostream& out,
                 const nlohmann::json& metadata = {});

void write_table(const SweepResult& result, TableFormat format, const std::filesystem::path& path,
                 const nlohmann::json& metadata = {});
void write_table(const RateResult& result, TableFormat format, const std::filesystem::path& path,
                 const nlohmann::json& metadata = {});
void write_table(const FidelityReport& report, TableFormat format,
                 const std::filesystem::path& path, const nlohmann::json& metadata = {});

/// Read-back helpers. CSV cells come back as doubles when they parse fully as
/// numbers, strings otherwise.
Table read_csv(const std::filesystem::path& path);
Table read_json_table(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);

/// Metadata block for a run: resolved config, its hash, code version and seed.
nlohmann::json run_metadata(const RunConfig& config);

inline constexpr const char* kCodeVersion = "1.0.0";

}  // namespace spinlink
