#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace ionbath::cli {

enum class Format { csv, json };

struct RunContext {
  std::string command;
  std::string out_dir = ".";
  Format format = Format::csv;
  std::uint64_t seed = 1;
  int jobs = 1;
  const Config* config = nullptr;
};

// 16 hex digits identifying the command, resolved configuration and seed.
std::string scenario_hash(const RunContext& ctx);

// 12 significant digits; "nan" for NaN.
std::string fmt(double x);
std::string fmt(const std::optional<double>& x);
// Value rounded to 12 significant digits for JSON output (null for NaN/inf).
nlohmann::json num(double x);
nlohmann::json num(const std::optional<double>& x);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // extra "# " lines after the configuration
};

// Writes <out_dir>/<stem>_<hash>.csv with the header block; returns the path.
std::string write_csv(const RunContext& ctx, const std::string& stem, const Table& table);
// Writes <out_dir>/<stem>_<hash>.json with a "meta" block; returns the path.
std::string write_json(const RunContext& ctx, const std::string& stem, nlohmann::json body);
// Table as JSON rows (numbers parsed back where possible).
nlohmann::json table_json(const Table& table);
// Writes the table in the requested format.
std::string write_table(const RunContext& ctx, const std::string& stem, const Table& table);

}  // namespace ionbath::cli
