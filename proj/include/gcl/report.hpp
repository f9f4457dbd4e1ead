#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcl/config.hpp"

namespace gcl {

struct Criterion {
  std::string name;
  double value = 0.0;
  std::string rule;  // e.g. "<= 1e-10"
  bool pass = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string render() const;
};

/// Everything a command produces. `summary` and `table` are deterministic;
/// `timings` holds wall times and is written to its own file.
struct ReportBundle {
  std::string command;
  nlohmann::ordered_json summary;
  CsvTable table;
  CsvTable timings;
  std::optional<std::string> svg;
  std::vector<Criterion> criteria;
  bool computation_failed = false;

  bool passed() const;
  /// 0 when every criterion passes, 1 otherwise (or on a computation error).
  int exit_code() const;
};

std::vector<std::string> command_names();

/// Runs one command. Library errors are caught and recorded in the bundle.
ReportBundle run_command(const std::string& name, const RunConfig& cfg);

/// Writes <command>_summary.json, <command>.csv, <command>_timings.csv and,
/// when present, <command>.svg into dir (created if needed).
void write_bundle(const ReportBundle& bundle, const std::string& dir);

/// Summary for a configuration error; the CLI writes it with exit status 2.
nlohmann::ordered_json config_error_summary(const std::string& command, const ConfigError& e);

/// %.17g
std::string format17(double x);

/// Log-log line plot.
std::string svg_loglog(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const Vec& x, const Vec& y);

}  // namespace gcl
