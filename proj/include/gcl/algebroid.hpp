#pragma once

#include <vector>

#include "gcl/common.hpp"
#include "gcl/grid.hpp"
#include "gcl/groupoid.hpp"

namespace gcl {

/// Structure functions of the Lie algebroid, tabulated at base points.
/// Indices are 0-based here: anchor(p, i, j) is a_{i+1, j+1}.
struct AlgebroidData {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Vec> base_points;
  std::vector<Vec> anchors;          // m x n row-major per point
  std::vector<Vec> structures;       // m x m x m, index (i*m + j)*m + k
  std::vector<Vec> log_weight_grads; // n per point
  Vec weights;                       // mu_e at each point
  double fd_step = 1e-3;

  std::size_t size() const { return base_points.size(); }
  double anchor(std::size_t p, std::size_t i, std::size_t j) const { return anchors[p][i * n + j]; }
  double structure(std::size_t p, std::size_t i, std::size_t j, std::size_t k) const {
    return structures[p][(i * m + j) * m + k];
  }
  double log_weight_grad(std::size_t p, std::size_t j) const { return log_weight_grads[p][j]; }
  /// True when every entry of a_ij (resp. c_ijk) is exactly zero at every point.
  bool anchor_vanishes(std::size_t i, std::size_t j) const;
  bool structure_vanishes(std::size_t i, std::size_t j, std::size_t k) const;

  /// Checks that the table matches the base nodes of the grid.
  void require_matches(const GridSpec& grid) const;
};

inline constexpr double kDefaultFdStep = 1e-3;

/// Central-difference a_ij = d sigma_j / dv_i (u, 0); m x n row-major.
Vec anchor(const GroupoidChart& chart, std::span<const double> u, double fd_step = kDefaultFdStep);

/// B(u, f_i, f_j) as the mixed partial d^2 p / dv_i dw_j at (u, 0, 0).
Vec bilinear_B(const GroupoidChart& chart, std::span<const double> u, std::size_t i,
               std::size_t j, double fd_step = kDefaultFdStep);

/// c_ijk = B_k(i, j) - B_k(j, i), antisymmetric in (i, j) bit for bit.
Vec structure_constants(const GroupoidChart& chart, std::span<const double> u,
                        double fd_step = kDefaultFdStep);

/// Central-difference gradient of ln mu_e at u.
Vec log_weight_gradient(const GroupoidChart& chart, std::span<const double> u,
                        double fd_step = kDefaultFdStep);

AlgebroidData extract_algebroid(const GroupoidChart& chart, const std::vector<Vec>& points,
                                double fd_step = kDefaultFdStep);
/// Tabulates at the exact base nodes of the grid (one point when n = 0).
AlgebroidData extract_algebroid(const GroupoidChart& chart, const GridSpec& grid,
                                double fd_step = kDefaultFdStep);

/// Same table from the chart's closed-form derivatives.
AlgebroidData analytic_algebroid(const GroupoidChart& chart, const GridSpec& grid);

/// max over (i, j, k, r) of |sum_l c_ijl c_lkr + c_jkl c_lir + c_kil c_ljr|.
double jacobi_residual(std::span<const double> c, std::size_t m);

std::vector<Vec> base_nodes(const GridSpec& grid);

}  // namespace gcl
