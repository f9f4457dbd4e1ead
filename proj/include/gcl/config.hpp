#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcl/groupoid.hpp"
#include "gcl/grid.hpp"
#include "gcl/symbol.hpp"

namespace gcl {

struct Tolerances {
  double axiom = 1e-10;
  double unit = 1e-12;
  double haar_invariance = 1e-8;
  double extraction = 1e-5;
  double jacobi_constants = 1e-8;
  double antisymmetry = 1e-12;
  double leibniz = 5e-3;
  double jacobi = 1e-2;
  double intertwining = 1e-3;
  double fourier = 1e-6;
  double ratio_lo = 0.35;
  double ratio_hi = 0.65;
  double degenerate = 1e-10;
  double norm_delta = 0.05;
  double cstar = 1e-5;
};

/// A validated run configuration.
struct RunConfig {
  nlohmann::json raw;  // the document as loaded, after command-line overrides
  GroupoidChart chart;
  GridSpec grid;
  std::optional<SymbolSpec> f;
  std::optional<SymbolSpec> g;
  std::optional<SymbolSpec> h;
  Vec ts;
  double fd_step = 1e-3;
  std::string quadrature = "trapezoidal";
  Tolerances tol;
  std::string output = ".";
  bool strict = false;
  bool plot = false;
  int workers = 1;
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  std::vector<std::string> warnings;

  /// FNV-1a (64 bit, hex) of the canonical dump of raw without "workers"
  /// and "output", which never change results.
  std::string hash() const;
};

/// Validates a parsed document; throws ConfigError listing every violation.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a JSON file, applies the overrides as a merge patch,
/// then validates. Syntax errors report line and column.
RunConfig load_config(const std::string& path, const nlohmann::json& overrides = nlohmann::json::object());

/// Parses JSON text with line and column in the error.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace gcl
