#pragma once

#include <string>
#include <vector>

#include "gcl/common.hpp"

namespace gcl {

/// Uniform axis: nodes origin + k * spacing for k = 0 .. count-1.
struct GridAxis {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 0;

  /// Symmetric axis over [-radius, radius] split into `intervals` cells
  /// (intervals + 1 nodes). An even interval count puts a node at 0.
  static GridAxis symmetric(double radius, std::size_t intervals);

  double node(std::size_t k) const { return origin + static_cast<double>(k) * spacing; }
  double last() const { return node(count - 1); }
  /// Trapezoidal quadrature weight of node k.
  double weight(std::size_t k) const;
  double radius() const;
  bool is_symmetric() const;

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

/// Rectangular grid on base x fiber. Node values are stored base-major:
/// flat = base_index * fiber_size() + fiber_index, each block row-major
/// with the last axis fastest. A zero-dimensional base has one node.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(std::vector<GridAxis> base, std::vector<GridAxis> fiber);

  static GridSpec symmetric(std::size_t n, double base_radius, std::size_t base_intervals,
                            std::size_t m, double fiber_radius, std::size_t fiber_intervals);

  std::size_t base_dim() const { return base_.size(); }
  std::size_t fiber_dim() const { return fiber_.size(); }
  const std::vector<GridAxis>& base_axes() const { return base_; }
  const std::vector<GridAxis>& fiber_axes() const { return fiber_; }
  std::size_t base_size() const { return base_size_; }
  std::size_t fiber_size() const { return fiber_size_; }
  std::size_t size() const { return base_size_ * fiber_size_; }

  void base_point(std::size_t flat, std::span<double> out) const;
  void fiber_point(std::size_t flat, std::span<double> out) const;
  Vec base_point(std::size_t flat) const;
  Vec fiber_point(std::size_t flat) const;
  void base_index(std::size_t flat, std::span<std::size_t> idx) const;
  void fiber_index(std::size_t flat, std::span<std::size_t> idx) const;
  std::size_t fiber_flat(std::span<const std::size_t> idx) const;
  std::size_t base_flat(std::span<const std::size_t> idx) const;
  std::size_t fiber_stride(std::size_t axis) const { return fiber_strides_[axis]; }
  std::size_t base_stride(std::size_t axis) const { return base_strides_[axis]; }

  double base_weight(std::size_t flat) const;
  double fiber_weight(std::size_t flat) const;
  bool on_base_boundary(std::size_t flat) const;
  bool on_fiber_boundary(std::size_t flat) const;

  /// Lists every structural violation (positive spacing, at least 8 nodes
  /// per axis, fiber axes symmetric about 0).
  std::vector<std::string> violations() const;

  /// Grid with the same base axes and the given fiber axes.
  GridSpec with_fiber(std::vector<GridAxis> fiber) const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.base_ == b.base_ && a.fiber_ == b.fiber_;
  }

 private:
  std::vector<GridAxis> base_;
  std::vector<GridAxis> fiber_;
  std::vector<std::size_t> base_strides_;
  std::vector<std::size_t> fiber_strides_;
  std::size_t base_size_ = 1;
  std::size_t fiber_size_ = 1;
};

/// Complex samples of a symbol on the nodes of a grid.
struct SampledSymbol {
  GridSpec grid;
  std::vector<cplx> values;

  SampledSymbol() = default;
  explicit SampledSymbol(GridSpec g) : grid(std::move(g)), values(grid.size()) {}

  cplx& at(std::size_t base, std::size_t fiber) { return values[base * grid.fiber_size() + fiber]; }
  const cplx& at(std::size_t base, std::size_t fiber) const {
    return values[base * grid.fiber_size() + fiber];
  }

  double sup() const;
  double sup_imag() const;
  /// max |value| over boundary nodes divided by max |value| (0 for the zero symbol).
  double boundary_ratio() const;
  bool decays(double threshold = 1e-10) const { return boundary_ratio() < threshold; }

  SampledSymbol& operator+=(const SampledSymbol& o);
  SampledSymbol& operator-=(const SampledSymbol& o);
  SampledSymbol& operator*=(cplx c);
};

SampledSymbol operator+(SampledSymbol a, const SampledSymbol& b);
SampledSymbol operator-(SampledSymbol a, const SampledSymbol& b);
SampledSymbol operator*(cplx c, SampledSymbol a);

void require_same_grid(const SampledSymbol& a, const SampledSymbol& b, const char* what);
double sup_diff(const SampledSymbol& a, const SampledSymbol& b);

/// The residual scale used throughout: max(sup|a|, sup|b|, 1e-30).
double residual_scale(const SampledSymbol& a, const SampledSymbol& b);

}  // namespace gcl
