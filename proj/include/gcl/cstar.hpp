#pragma once

#include <vector>

#include "gcl/groupoid.hpp"
#include "gcl/poisson.hpp"
#include "gcl/symbol.hpp"

namespace gcl {

struct PowerOptions {
  double tolerance = 1e-8;  // relative change of the squared-norm estimate
  std::size_t max_iterations = 10000;
};

struct NormEstimate {
  double norm = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::size_t size = 0;  // matrix dimension
};

/// Dense complex matrix, row-major.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  cplx& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Largest singular value by power iteration on A*A from the normalized
/// all-ones vector. ConvergenceError when the tolerance is not met.
NormEstimate top_singular_value(const Matrix& a, const PowerOptions& opts = {});

/// Nystrom form sqrt(w_row) K sqrt(w_col) of an integral kernel.
Matrix nystrom(const Matrix& kernel, std::span<const double> row_weights,
               std::span<const double> col_weights);

/// sup over base nodes and dual nodes of |F f0|, refining the dual grid
/// by doubling until the sup moves by less than 1e-4 relative.
double zero_fiber_norm(const SymbolSpec& f0, const GridSpec& grid,
                       std::span<const double> mu_on_base);
double zero_fiber_norm(const SymbolSpec& f0, const GridSpec& grid);

/// K(x, y) = |t|^{-n} f0(x, (y - x) / t) on the base nodes of the grid.
Matrix pair_kernel(const SymbolSpec& f0, double t, const GridSpec& grid);
/// Requires |t| times the fiber radius to fit inside the base radius.
NormEstimate pair_kernel_norm(const SymbolSpec& f0, double t, const GridSpec& grid,
                              const PowerOptions& opts = {});
/// Kernel of f *_t f^*, i.e. K W K^* with the base quadrature weights W.
Matrix pair_kernel_self_adjoint_square(const SymbolSpec& f0, double t, const GridSpec& grid);
/// Norm of a kernel already on the base grid.
NormEstimate base_kernel_norm(const Matrix& kernel, const GridSpec& grid,
                              const PowerOptions& opts = {});

/// Matrix of g -> f0 *_t g on the fiber grid (n = 0), in the orthonormal
/// frame of the rescaled Haar measure rho(t xi) w(xi).
Matrix group_regular_matrix(const SymbolSpec& f0, const GroupoidChart& chart, double t,
                            const GridSpec& grid);
NormEstimate group_regular_norm(const SymbolSpec& f0, const GroupoidChart& chart, double t,
                                const GridSpec& grid, const PowerOptions& opts = {});

struct NormRow {
  double t = 0.0;
  double norm = 0.0;
  double residual = 0.0;
  std::size_t size = 0;
  double delta = 0.0;  // |norm - norm at 0|
};

struct NormCurve {
  std::vector<NormRow> rows;
  double zero_norm = 0.0;
  bool delta_decreasing() const;
  /// Reduced norm only; equal to the full norm on the amenable built-ins.
  static constexpr bool reduced_norm = true;
};

/// Pair charts use the integral-kernel norm, group charts (n = 0) the
/// regular representation; the t = 0 entry is zero_fiber_norm.
NormCurve norm_curve(const SymbolSpec& f0, const GroupoidChart& chart, const Vec& ts,
                     const GridSpec& grid, const PowerOptions& opts = {});

}  // namespace gcl
