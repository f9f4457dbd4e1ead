#pragma once

#include <vector>

#include "gcl/common.hpp"
#include "gcl/grid.hpp"

namespace gcl {

/// coef * prod_k x_k^{p_k} * prod_l xi_l^{q_l}
///      * exp(-sum_k alpha_k (x_k - xc_k)^2 - sum_l beta_l (xi_l - xic_l)^2)
struct SymbolTerm {
  cplx coef{1.0, 0.0};
  std::vector<int> x_pow;
  std::vector<int> xi_pow;
  Vec alpha;
  Vec x_center;
  Vec beta;
  Vec xi_center;
};

struct DecayReport {
  double worst_ratio = 0.0;  // boundary magnitude relative to the term peak on the grid
  std::size_t worst_term = 0;
  bool ok(double threshold = 1e-12) const { return worst_ratio < threshold; }
};

/// Gaussian-polynomial symbol on the algebroid: a finite sum of SymbolTerm.
/// The class is closed under d/dx_j, d/dxi_k and multiplication by x_j or
/// xi_i; all of these are exact. Terms are kept in canonical order with
/// like terms merged, so structurally equal symbols compare equal.
class SymbolSpec {
 public:
  SymbolSpec() = default;
  SymbolSpec(std::size_t n, std::size_t m) : n_(n), m_(m) {}

  static SymbolSpec zero(std::size_t n, std::size_t m) { return SymbolSpec(n, m); }
  /// coef * exp(-sum alpha (x-xc)^2 - sum beta (xi-xic)^2); empty vectors mean
  /// unit widths and zero centers.
  static SymbolSpec gaussian(std::size_t n, std::size_t m, cplx coef = 1.0, Vec alpha = {},
                             Vec beta = {}, Vec x_center = {}, Vec xi_center = {});

  /// Adds a term after filling defaults and checking dimensions and widths.
  void add_term(SymbolTerm term);

  std::size_t base_dim() const { return n_; }
  std::size_t fiber_dim() const { return m_; }
  const std::vector<SymbolTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx operator()(std::span<const double> x, std::span<const double> xi) const;
  cplx term_value(std::size_t term, std::span<const double> x, std::span<const double> xi) const;

  SymbolSpec d_x(std::size_t j) const;
  SymbolSpec d_xi(std::size_t k) const;
  SymbolSpec times_x(std::size_t j) const;
  SymbolSpec times_xi(std::size_t i) const;
  SymbolSpec scaled(cplx c) const;

  SymbolSpec& operator+=(const SymbolSpec& o);
  friend SymbolSpec operator+(SymbolSpec a, const SymbolSpec& b) { return a += b; }
  friend SymbolSpec operator-(SymbolSpec a, const SymbolSpec& b) { return a += b.scaled(-1.0); }
  friend bool operator==(const SymbolSpec& a, const SymbolSpec& b);

  /// Per-term decay on the grid box: max over boundary nodes relative to the
  /// max over all nodes.
  DecayReport decay(const GridSpec& grid) const;

 private:
  void canonicalize();
  SymbolSpec derivative(bool base, std::size_t axis) const;

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<SymbolTerm> terms_;
};

/// Pointwise evaluation on every node. With strict set, a failed decay check
/// throws DecayError; otherwise the caller inspects spec.decay(grid).
SampledSymbol eval_symbol(const SymbolSpec& spec, const GridSpec& grid, bool strict = false);

}  // namespace gcl
