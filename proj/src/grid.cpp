#include "gcl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gcl {

GridAxis GridAxis::symmetric(double radius, std::size_t intervals) {
  return GridAxis{-radius, 2.0 * radius / static_cast<double>(intervals), intervals + 1};
}

double GridAxis::weight(std::size_t k) const {
  if (count == 1) return spacing;
  return (k == 0 || k + 1 == count) ? 0.5 * spacing : spacing;
}

double GridAxis::radius() const { return std::max(std::abs(origin), std::abs(last())); }

bool GridAxis::is_symmetric() const {
  return std::abs(origin + last()) <= 1e-9 * spacing;
}

namespace {

std::vector<std::size_t> strides_of(const std::vector<GridAxis>& axes, std::size_t& total) {
  std::vector<std::size_t> s(axes.size());
  total = 1;
  for (std::size_t d = axes.size(); d-- > 0;) {
    s[d] = total;
    total *= axes[d].count;
  }
  return s;
}

}  // namespace

GridSpec::GridSpec(std::vector<GridAxis> base, std::vector<GridAxis> fiber)
    : base_(std::move(base)), fiber_(std::move(fiber)) {
  base_strides_ = strides_of(base_, base_size_);
  fiber_strides_ = strides_of(fiber_, fiber_size_);
}

GridSpec GridSpec::symmetric(std::size_t n, double base_radius, std::size_t base_intervals,
                             std::size_t m, double fiber_radius, std::size_t fiber_intervals) {
  return GridSpec(std::vector<GridAxis>(n, GridAxis::symmetric(base_radius, base_intervals)),
                  std::vector<GridAxis>(m, GridAxis::symmetric(fiber_radius, fiber_intervals)));
}

void GridSpec::base_index(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t d = 0; d < base_.size(); ++d) {
    idx[d] = (flat / base_strides_[d]) % base_[d].count;
  }
}

void GridSpec::fiber_index(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t d = 0; d < fiber_.size(); ++d) {
    idx[d] = (flat / fiber_strides_[d]) % fiber_[d].count;
  }
}

std::size_t GridSpec::fiber_flat(std::span<const std::size_t> idx) const {
  std::size_t f = 0;
  for (std::size_t d = 0; d < fiber_.size(); ++d) f += idx[d] * fiber_strides_[d];
  return f;
}

std::size_t GridSpec::base_flat(std::span<const std::size_t> idx) const {
  std::size_t f = 0;
  for (std::size_t d = 0; d < base_.size(); ++d) f += idx[d] * base_strides_[d];
  return f;
}

void GridSpec::base_point(std::size_t flat, std::span<double> out) const {
  for (std::size_t d = 0; d < base_.size(); ++d) {
    out[d] = base_[d].node((flat / base_strides_[d]) % base_[d].count);
  }
}

void GridSpec::fiber_point(std::size_t flat, std::span<double> out) const {
  for (std::size_t d = 0; d < fiber_.size(); ++d) {
    out[d] = fiber_[d].node((flat / fiber_strides_[d]) % fiber_[d].count);
  }
}

Vec GridSpec::base_point(std::size_t flat) const {
  Vec p(base_.size());
  base_point(flat, p);
  return p;
}

Vec GridSpec::fiber_point(std::size_t flat) const {
  Vec p(fiber_.size());
  fiber_point(flat, p);
  return p;
}

double GridSpec::base_weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t d = 0; d < base_.size(); ++d) {
    w *= base_[d].weight((flat / base_strides_[d]) % base_[d].count);
  }
  return w;
}

double GridSpec::fiber_weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t d = 0; d < fiber_.size(); ++d) {
    w *= fiber_[d].weight((flat / fiber_strides_[d]) % fiber_[d].count);
  }
  return w;
}

bool GridSpec::on_base_boundary(std::size_t flat) const {
  for (std::size_t d = 0; d < base_.size(); ++d) {
    const std::size_t k = (flat / base_strides_[d]) % base_[d].count;
    if (k == 0 || k + 1 == base_[d].count) return true;
  }
  return false;
}

bool GridSpec::on_fiber_boundary(std::size_t flat) const {
  for (std::size_t d = 0; d < fiber_.size(); ++d) {
    const std::size_t k = (flat / fiber_strides_[d]) % fiber_[d].count;
    if (k == 0 || k + 1 == fiber_[d].count) return true;
  }
  return false;
}

std::vector<std::string> GridSpec::violations() const {
  std::vector<std::string> out;
  auto check = [&](const std::vector<GridAxis>& axes, const char* kind, bool symmetric) {
    for (std::size_t d = 0; d < axes.size(); ++d) {
      const auto& a = axes[d];
      std::ostringstream where;
      where << kind << " axis " << d + 1;
      if (!(a.spacing > 0.0)) out.push_back(where.str() + ": spacing must be positive");
      if (a.count < 8) out.push_back(where.str() + ": needs at least 8 nodes");
      if (symmetric && a.spacing > 0.0 && a.count > 0 && !a.is_symmetric()) {
        out.push_back(where.str() + ": fiber grid must be symmetric about 0");
      }
    }
  };
  check(base_, "base", false);
  check(fiber_, "fiber", true);
  return out;
}

GridSpec GridSpec::with_fiber(std::vector<GridAxis> fiber) const {
  return GridSpec(base_, std::move(fiber));
}

double SampledSymbol::sup() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double SampledSymbol::sup_imag() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

double SampledSymbol::boundary_ratio() const {
  const double peak = sup();
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t b = 0; b < grid.base_size(); ++b) {
    const bool base_edge = grid.on_base_boundary(b);
    for (std::size_t f = 0; f < grid.fiber_size(); ++f) {
      if (base_edge || grid.on_fiber_boundary(f)) edge = std::max(edge, std::abs(at(b, f)));
    }
  }
  return edge / peak;
}

SampledSymbol& SampledSymbol::operator+=(const SampledSymbol& o) {
  require_same_grid(*this, o, "addition");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

SampledSymbol& SampledSymbol::operator-=(const SampledSymbol& o) {
  require_same_grid(*this, o, "subtraction");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

SampledSymbol& SampledSymbol::operator*=(cplx c) {
  for (auto& v : values) v *= c;
  return *this;
}

SampledSymbol operator+(SampledSymbol a, const SampledSymbol& b) { return a += b; }
SampledSymbol operator-(SampledSymbol a, const SampledSymbol& b) { return a -= b; }
SampledSymbol operator*(cplx c, SampledSymbol a) { return a *= c; }

void require_same_grid(const SampledSymbol& a, const SampledSymbol& b, const char* what) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw GridMismatchError(std::string("grid mismatch in ") + what);
  }
}

double sup_diff(const SampledSymbol& a, const SampledSymbol& b) {
  require_same_grid(a, b, "comparison");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

double residual_scale(const SampledSymbol& a, const SampledSymbol& b) {
  return std::max({a.sup(), b.sup(), 1e-30});
}

}  // namespace gcl
