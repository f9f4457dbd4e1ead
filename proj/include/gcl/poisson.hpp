#pragma once

#include <array>
#include <variant>
#include <vector>

#include "gcl/algebroid.hpp"
#include "gcl/grid.hpp"
#include "gcl/symbol.hpp"

namespace gcl {

enum class Interpolation { Linear, Cubic };

/// Value of a sampled symbol at an arbitrary (x, xi) by tensor-product
/// Lagrange interpolation; zero outside the grid box.
cplx interpolate(const SampledSymbol& s, std::span<const double> x, std::span<const double> xi,
                 Interpolation kind = Interpolation::Cubic);

/// Sixth-order finite difference along a base (base = true) or fiber axis;
/// 7-point central stencil inside, shifted to one side near the edges.
SampledSymbol sampled_derivative(const SampledSymbol& s, bool base, std::size_t axis);

/// Either an exact Gaussian-polynomial symbol or grid samples. Operations on
/// the exact form stay exact; on samples, xi-multiplication is pointwise and
/// derivatives are finite differences.
class Operand {
 public:
  Operand(SymbolSpec spec) : value_(std::move(spec)) {}  // NOLINT
  Operand(SampledSymbol samples) : value_(std::move(samples)) {}  // NOLINT

  bool is_exact() const { return std::holds_alternative<SymbolSpec>(value_); }
  const SymbolSpec& exact() const { return std::get<SymbolSpec>(value_); }
  const SampledSymbol& samples() const { return std::get<SampledSymbol>(value_); }

  SampledSymbol sample(const GridSpec& grid) const;
  Operand times_xi(std::size_t i) const;
  Operand d_x(std::size_t j) const;
  Operand d_xi(std::size_t k) const;
  cplx value_at(std::span<const double> x, std::span<const double> xi,
                Interpolation kind = Interpolation::Cubic) const;

 private:
  std::variant<SymbolSpec, SampledSymbol> value_;
};

/// (f*g)(x, xi) = mu_e(x) sum_eta f(x, eta) g(x, xi - eta) w(eta), trapezoidal
/// weights; g is read off the lattice when xi - eta is a node and linearly
/// interpolated otherwise, zero outside the grid.
SampledSymbol fiber_convolve(const SampledSymbol& f, const SampledSymbol& g,
                             std::span<const double> mu_on_base);

/// The Poisson bracket on the algebroid:
///   2 pi i sum a_ij ((xi_i f) * d_j g - (xi_i g) * d_j f)
/// + 2 pi i sum a_ij d_j ln mu_e ((xi_i f) * g - (xi_i g) * f)
/// - 2 pi i sum c_ijk d/dxi_k ((xi_i f) * (xi_j g)).
/// The xi-derivative of the last term is put on the first convolution factor;
/// that term is evaluated as the average of the (f, g) and -(g, f) orderings so
/// the result is antisymmetric to the last bit.
SampledSymbol poisson_bracket(const Operand& f, const Operand& g, const AlgebroidData& data,
                                  const GridSpec& grid);

struct DualGridOptions {
  double coverage = 1e-10;      // dual box covers |F f| above this fraction of its peak
  double band_fraction = 0.8;   // ... but stays inside this fraction of the Nyquist band
  double count_factor = 2.0;    // dual nodes per axis relative to fiber nodes
  std::size_t min_count = 33;
};

struct DualGridChoice {
  GridSpec grid;
  bool band_limited = false;  // coverage radius was clipped to the band
};

/// Dual fiber grid covering the significant support of the transforms of
/// all given samples.
DualGridChoice choose_dual_grid(const std::vector<const SampledSymbol*>& samples,
                                std::span<const double> mu_on_base,
                                const DualGridOptions& opts = {});

/// F f(x, zeta) = mu_e(x) sum_xi f(x, xi) exp(-2 pi i <zeta, xi>) w(xi).
SampledSymbol fourier(const SampledSymbol& f, std::span<const double> mu_on_base,
                      const GridSpec& dual);
/// f(x, xi) = mu_e(x)^{-1} sum_zeta F(x, zeta) exp(+2 pi i <zeta, xi>) w(zeta).
SampledSymbol inverse_fourier(const SampledSymbol& F, std::span<const double> mu_on_base,
                              const GridSpec& target);

struct DualSigns {
  int anchor = -1;     // s1
  int structure = -1;  // s2
};

/// The linear-Poisson bracket on the dual bundle, split into its anchor part
/// sum a_ij (dF/dzeta_i dG/dx_j - dG/dzeta_i dF/dx_j) and its structure part
/// sum c_ijk zeta_k dF/dzeta_i dG/dzeta_j.
struct DualBracketParts {
  SampledSymbol anchor_part;
  SampledSymbol structure_part;
  SampledSymbol combine(DualSigns s) const;
};

DualBracketParts dual_bracket_parts(const SampledSymbol& F, const SampledSymbol& G,
                                    const AlgebroidData& data);
SampledSymbol dual_poisson_bracket(const SampledSymbol& F, const SampledSymbol& G,
                                   const AlgebroidData& data, DualSigns signs);

struct IntertwiningResult {
  double residual = 0.0;  // at the selected signs
  int s1 = 0;             // -1 / +1, or 0 when the anchor part vanishes
  int s2 = 0;             // same for the structure part
  std::array<double, 4> by_signs{};  // (s1, s2) = (+,+), (+,-), (-,+), (-,-)
  bool band_limited = false;
  GridSpec dual;
};

/// sup |F(bracket(f, g)) - dual bracket(F f, F g)| / scale minimised over the
/// four sign choices. Requires mu_e == 1.
IntertwiningResult intertwining_residual(const Operand& f, const Operand& g,
                                         const AlgebroidData& data, const GridSpec& grid,
                                         const DualGridOptions& opts = {});

/// Merges selected signs across runs; throws SignConsistencyError when two
/// runs determine different values.
DualSigns consistent_signs(const std::vector<IntertwiningResult>& runs);

}  // namespace gcl
