#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcl/algebroid.hpp"
#include "gcl/groupoid.hpp"
#include "gcl/poisson.hpp"

namespace gcl {

/// det d p / d w (u, v, w) by central differences.
double product_jacobian_det(const GroupoidChart& chart, std::span<const double> u,
                            std::span<const double> v, std::span<const double> w,
                            double fd_step = 1e-5);

/// rho(u, v) = mu_e(sigma(u, v)) / |det d p / d w (u, v, 0)|.
double haar_density(const GroupoidChart& chart, std::span<const double> u,
                    std::span<const double> v);

/// max over sampled (u, v, w) of
///   | rho(u, p(u,v,w)) |det dp/dw(u,v,w)| - rho(sigma(u,v), w) |.
double haar_invariance_residual(const GroupoidChart& chart, std::size_t samples,
                                std::uint64_t seed);

/// Solves p(u, v, w) = target; closed form when the chart has one.
SolveResult invert_p(const GroupoidChart& chart, std::span<const double> u,
                     std::span<const double> v, std::span<const double> target);

/// A pair of sections constant in blow-up coordinates together with the
/// chart, grid and t sweep.
struct DeformationField {
  GroupoidChart chart;
  GridSpec grid;
  SymbolSpec f0;
  SymbolSpec g0;
  Vec ts;

  /// Every violated precondition: nonzero t, |t| strictly decreasing, and
  /// t times the fiber radius inside V_box.
  std::vector<std::string> violations() const;
};

/// Domain condition for one t.
bool t_admissible(const GroupoidChart& chart, const GridSpec& grid, double t);

/// (f *_t g)(u, xi) = sum_eta f0(u, eta) g0(sigma(u, t eta), w(u, t eta, t xi) / t)
///                    rho(u, t eta) w(eta).
/// The left factor is read on the grid nodes. The right factor is evaluated
/// exactly when it is a SymbolSpec, by cubic interpolation when sampled.
SampledSymbol deformed_convolution(const GroupoidChart& chart, const GridSpec& grid,
                                   const Operand& f, const Operand& g, double t);
SampledSymbol deformed_convolution(const DeformationField& field, double t);

/// D(t) = (f *_t g - g *_t f) / t.
SampledSymbol scaled_commutator(const GroupoidChart& chart, const GridSpec& grid,
                                const Operand& f, const Operand& g, double t);
SampledSymbol scaled_commutator(const DeformationField& field, double t);

struct LimitRow {
  double t = 0.0;
  double error = 0.0;   // sup |D(t) - bracket / (2 pi i)|
  double ratio = 0.0;   // error / previous error; NaN on the first row
  cplx kappa{};         // least-squares constant with D(t) ~ kappa * bracket / (2 pi i)
  double seconds = 0.0; // wall time, not part of the deterministic output
};

struct LimitTable {
  std::vector<LimitRow> rows;
  double bracket_sup = 0.0;  // sup |bracket / (2 pi i)|
  bool strictly_decreasing() const;
  bool ratios_within(double lo, double hi) const;
  /// error / t at the smallest t.
  double rate_constant() const;
};

/// Compares D(t) with bracket / (2 pi i) along the sweep.
LimitTable classical_limit_error_table(const DeformationField& field, const AlgebroidData& data);
/// Same, with the algebroid data extracted from the chart by finite differences.
LimitTable classical_limit_error_table(const DeformationField& field,
                                       double fd_step = kDefaultFdStep);

}  // namespace gcl
