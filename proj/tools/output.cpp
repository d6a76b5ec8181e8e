#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ionbath/errors.hpp"

namespace ionbath::cli {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string target_path(const RunContext& ctx, const std::string& stem, const char* ext) {
  std::filesystem::create_directories(ctx.out_dir);
  return (std::filesystem::path(ctx.out_dir) / (stem + "_" + scenario_hash(ctx) + ext)).string();
}

std::vector<std::string> header_lines(const RunContext& ctx) {
  std::vector<std::string> h{"ionbath " IONBATH_VERSION, "command: " + ctx.command,
                             "seed: " + std::to_string(ctx.seed)};
  for (const auto& l : ctx.config->lines()) h.push_back("config: " + l);
  return h;
}

}  // namespace

std::string scenario_hash(const RunContext& ctx) {
  std::uint64_t h = fnv1a(ctx.command);
  h = fnv1a("\n" + std::to_string(ctx.seed), h);
  for (const auto& l : ctx.config->lines()) h = fnv1a("\n" + l, h);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";  // avoids "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x) {
  return x ? fmt(*x) : std::string("nan");
}

nlohmann::json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(fmt(x).c_str(), nullptr);
}

nlohmann::json num(const std::optional<double>& x) { return x ? num(*x) : nlohmann::json(nullptr); }

std::string write_csv(const RunContext& ctx, const std::string& stem, const Table& table) {
  const std::string path = target_path(ctx, stem, ".csv");
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot write '" + path + "'");
  for (const auto& l : header_lines(ctx)) f << "# " << l << '\n';
  for (const auto& l : table.notes) f << "# " << l << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    f << (i ? "," : "") << table.columns[i];
  f << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << '\n';
  }
  return path;
}

std::string write_json(const RunContext& ctx, const std::string& stem, nlohmann::json body) {
  const std::string path = target_path(ctx, stem, ".json");
  nlohmann::json meta;
  meta["version"] = IONBATH_VERSION;
  meta["command"] = ctx.command;
  meta["seed"] = ctx.seed;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : ctx.config->values()) cfg[k] = v;
  meta["config"] = cfg;
  nlohmann::json doc;
  doc["meta"] = meta;
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot write '" + path + "'");
  f << doc.dump(1) << '\n';
  return path;
}

nlohmann::json table_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      const std::string& v = row[i];
      char* end = nullptr;
      const double x = std::strtod(v.c_str(), &end);
      if (v == "nan")
        r[table.columns[i]] = nullptr;
      else if (!v.empty() && *end == '\0')
        r[table.columns[i]] = x;
      else
        r[table.columns[i]] = v;
    }
    rows.push_back(r);
  }
  nlohmann::json j;
  j["columns"] = table.columns;
  j["rows"] = rows;
  if (!table.notes.empty()) j["notes"] = table.notes;
  return j;
}

std::string write_table(const RunContext& ctx, const std::string& stem, const Table& table) {
  if (ctx.format == Format::json) return write_json(ctx, stem, table_json(table));
  return write_csv(ctx, stem, table);
}

}  // namespace ionbath::cli
