#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gcl/common.hpp"

namespace gcl {

using ChartMap2 =
    std::function<void(std::span<const double> u, std::span<const double> v, std::span<double> out)>;
using ChartMap3 = std::function<void(std::span<const double> u, std::span<const double> v,
                                     std::span<const double> w, std::span<double> out)>;
using BaseWeight = std::function<double(std::span<const double> u)>;

/// Closed-form derivatives of a built-in chart, used as the oracle for the
/// finite-difference extraction.
struct AnalyticStructure {
  // m x n, row-major: entry (i, j) = d sigma_j / d v_i (u, 0)
  std::function<Vec(std::span<const double> u)> anchor;
  // B(u, f_i, f_j) = d^2 p / dv_i dw_j (u, 0, 0), an m-vector
  std::function<Vec(std::span<const double> u, std::size_t i, std::size_t j)> bilinear;
  std::function<Vec(std::span<const double> u)> log_weight_grad;
};

enum class ChartKind : std::uint8_t { Pair, AbelianBundle, Heisenberg, AxPlusB, User };

/// A Lie groupoid in one chart psi(u, v): u in U (units, dim n), v in V
/// (r-fibers, dim m). sigma gives the source, p the product
///   psi(u, v) psi(sigma(u, v), w) = psi(u, p(u, v, w)),
/// and mu_e the Haar weight on the units.
///
/// The chart is assumed to meet psi(U x {0}) = psi(U x V) n G^(0); that
/// condition is a property of the data and is not checked.
struct GroupoidChart {
  std::string name;
  ChartKind kind = ChartKind::User;
  std::size_t n = 0;
  std::size_t m = 1;
  ChartMap2 sigma;
  ChartMap3 product;
  std::optional<ChartMap2> inverse_closed_form;  // (u, v) -> w with p(u, v, w) = 0
  BaseWeight mu_e;
  Box u_box;
  Box v_box;
  std::optional<AnalyticStructure> analytic;
  bool unit_weight = true;  // mu_e == 1 identically
};

namespace catalog {

GroupoidChart pair(std::size_t n, double radius = 10.0);
GroupoidChart abelian_bundle(std::size_t n, std::size_t m, double radius = 10.0);
GroupoidChart heisenberg(double radius = 10.0);
/// Global coordinates, law (v1 + w1, v2 + e^{v1} w2).
GroupoidChart ax_plus_b(double v1_radius = 3.0, double v2_radius = 10.0);

/// pair(1) with an extra 0.01 v^2 w term in the product: keeps the unit
/// laws but breaks associativity. A test fixture, not a catalog entry.
GroupoidChart corrupted_pair();

std::vector<std::string> names();

}  // namespace catalog

/// Replaces the Haar weight; the analytic structure's log-gradient is
/// dropped unless a replacement is given.
void set_haar_weight(GroupoidChart& chart, BaseWeight mu_e, bool unit_weight,
                     std::function<Vec(std::span<const double>)> log_grad = {});

Vec compose(const GroupoidChart& chart, std::span<const double> u, std::span<const double> v,
            std::span<const double> w);
Vec source_coords(const GroupoidChart& chart, std::span<const double> u,
                  std::span<const double> v);

struct SolveOptions {
  bool use_closed_form = true;
  double tolerance = 1e-12;  // on max|p - target|, relative to max(1, max|target|)
  std::size_t max_iterations = 50;
};

struct SolveResult {
  Vec w;
  std::size_t iterations = 0;  // 0 when the closed form was used
  double residual = 0.0;
};

/// Solves p(u, v, w) = target for w.
SolveResult solve_product(const GroupoidChart& chart, std::span<const double> u,
                          std::span<const double> v, std::span<const double> target,
                          const SolveOptions& opts = {});

/// w with p(u, v, w) = 0.
Vec invert_element(const GroupoidChart& chart, std::span<const double> u,
                   std::span<const double> v);

struct AxiomReport {
  double associativity = 0.0;
  double source_compatibility = 0.0;
  double unit = 0.0;
  double inverse = 0.0;
  std::size_t samples = 0;
  std::size_t attempts = 0;

  /// Names of the axioms whose residual exceeds its tolerance.
  std::vector<std::string> failures(double axiom_tol = 1e-10, double unit_tol = 1e-12) const;
};

/// Samples composable triples (rejection sampling inside the boxes) and
/// returns the max residual of every chart invariant.
AxiomReport validate_axioms(const GroupoidChart& chart, std::size_t sample_count,
                            std::uint64_t seed);

}  // namespace gcl
