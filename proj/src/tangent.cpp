#include "gcl/tangent.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace gcl {

double product_jacobian_det(const GroupoidChart& chart, std::span<const double> u,
                            std::span<const double> v, std::span<const double> w,
                            double fd_step) {
  const std::size_t m = chart.m;
  Vec jac(m * m), wp(w.begin(), w.end()), wm(w.begin(), w.end()), pp(m), pm(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double h = fd_step * std::max(1.0, std::abs(w[k]));
    wp[k] = w[k] + h;
    wm[k] = w[k] - h;
    chart.product(u, v, wp, pp);
    chart.product(u, v, wm, pm);
    for (std::size_t i = 0; i < m; ++i) jac[i * m + k] = (pp[i] - pm[i]) / (2.0 * h);
    wp[k] = w[k];
    wm[k] = w[k];
  }
  return determinant(jac, m);
}

double haar_density(const GroupoidChart& chart, std::span<const double> u,
                    std::span<const double> v) {
  const Vec zero(chart.m, 0.0);
  const double det = product_jacobian_det(chart, u, v, zero);
  if (!(std::abs(det) > 1e-14)) {
    throw SingularJacobianError("dp/dw(u,v,0) is singular at v = " + format_point(v));
  }
  Vec s(chart.n);
  chart.sigma(u, v, s);
  const double mu = chart.mu_e(s);
  if (!(mu > 0.0)) throw WeightError("Haar weight mu_e is not positive at " + format_point(s));
  return mu / std::abs(det);
}

double haar_invariance_residual(const GroupoidChart& chart, std::size_t samples,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  const std::size_t n = chart.n, m = chart.m;
  Vec u(n), v(m), w(m), s(n), p(m);
  double worst = 0.0;
  std::size_t found = 0, attempts = 0;
  while (found < samples) {
    if (++attempts > 100 * samples) throw SamplingError("could not sample (u, v, w) inside the boxes");
    for (std::size_t j = 0; j < n; ++j) u[j] = uniform(0.5 * chart.u_box.lo[j], 0.5 * chart.u_box.hi[j]);
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = uniform(0.25 * chart.v_box.lo[i], 0.25 * chart.v_box.hi[i]);
      w[i] = uniform(0.25 * chart.v_box.lo[i], 0.25 * chart.v_box.hi[i]);
    }
    chart.sigma(u, v, s);
    if (!chart.u_box.contains(s)) continue;
    chart.product(u, v, w, p);
    if (!chart.v_box.contains(p)) continue;
    ++found;
    const double lhs = haar_density(chart, u, p) * std::abs(product_jacobian_det(chart, u, v, w));
    const double rhs = haar_density(chart, s, w);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

SolveResult invert_p(const GroupoidChart& chart, std::span<const double> u,
                     std::span<const double> v, std::span<const double> target) {
  return solve_product(chart, u, v, target);
}

bool t_admissible(const GroupoidChart& chart, const GridSpec& grid, double t) {
  if (t == 0.0 || !std::isfinite(t)) return false;
  for (std::size_t i = 0; i < chart.m; ++i) {
    const double r = std::abs(t) * grid.fiber_axes()[i].radius();
    if (!(r <= chart.v_box.hi[i] && -r >= chart.v_box.lo[i])) return false;
  }
  return true;
}

std::vector<std::string> DeformationField::violations() const {
  std::vector<std::string> out;
  if (grid.base_dim() != chart.n || grid.fiber_dim() != chart.m) {
    out.push_back("grid dimensions do not match the chart");
    return out;
  }
  if (ts.empty()) out.push_back("t sweep is empty");
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (ts[k] == 0.0) {
      out.push_back("t must be nonzero in sweep");
      continue;
    }
    if (!t_admissible(chart, grid, ts[k])) {
      out.push_back("t = " + format_point(std::span<const double>(&ts[k], 1)) +
                    " moves t * (fiber radius) outside V_box");
    }
    if (k > 0 && !(std::abs(ts[k]) < std::abs(ts[k - 1]))) {
      out.push_back("t values must strictly decrease toward 0");
    }
  }
  return out;
}

SampledSymbol deformed_convolution(const GroupoidChart& chart, const GridSpec& grid,
                                   const Operand& f, const Operand& g, double t) {
  if (grid.base_dim() != chart.n || grid.fiber_dim() != chart.m) {
    throw GridMismatchError("grid dimensions do not match the chart");
  }
  if (!t_admissible(chart, grid, t)) {
    throw DomainError("t = " + std::to_string(t) + " is zero or too large for the fiber grid");
  }
  const std::size_t n = grid.base_dim(), m = grid.fiber_dim();
  const std::size_t bs = grid.base_size(), fs = grid.fiber_size();
  const SampledSymbol fsamp = f.sample(grid);

  // Per (b, c): weight * f0 * rho and the source point sigma(u, t eta).
  std::vector<cplx> coef(bs * fs);
  std::vector<double> src(bs * fs * n);
  std::vector<double> tv(fs * m);
  for (std::size_t c = 0; c < fs; ++c) {
    grid.fiber_point(c, std::span<double>(&tv[c * m], m));
    for (std::size_t i = 0; i < m; ++i) tv[c * m + i] *= t;
  }
  parallel_for(bs, [&](std::size_t begin, std::size_t end) {
    Vec u(n);
    for (std::size_t b = begin; b < end; ++b) {
      grid.base_point(b, u);
      for (std::size_t c = 0; c < fs; ++c) {
        std::span<const double> v(&tv[c * m], m);
        std::span<double> s(&src[(b * fs + c) * n], n);
        chart.sigma(u, v, s);
        if (!chart.u_box.contains(s)) {
          throw DomainError("source point " + format_point(s) + " leaves U_box");
        }
        const cplx fv = fsamp.at(b, c);
        coef[b * fs + c] = fv == cplx(0.0, 0.0)
                               ? cplx(0.0, 0.0)
                               : grid.fiber_weight(c) * fv * haar_density(chart, u, v);
      }
    }
  });

  SampledSymbol out(grid);
  const double inv_t = 1.0 / t;
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    Vec u(n), target(m), xi(m), arg(m);
    for (std::size_t flat = begin; flat < end; ++flat) {
      const std::size_t b = flat / fs, a = flat % fs;
      grid.base_point(b, u);
      grid.fiber_point(a, xi);
      for (std::size_t i = 0; i < m; ++i) target[i] = t * xi[i];
      cplx sum = 0.0;
      for (std::size_t c = 0; c < fs; ++c) {
        const cplx k = coef[b * fs + c];
        if (k == cplx(0.0, 0.0)) continue;
        std::span<const double> v(&tv[c * m], m);
        const SolveResult w = solve_product(chart, u, v, target);
        for (std::size_t i = 0; i < m; ++i) arg[i] = w.w[i] * inv_t;
        sum += k * g.value_at(std::span<const double>(&src[(b * fs + c) * n], n), arg,
                              Interpolation::Cubic);
      }
      out.values[flat] = sum;
    }
  });
  return out;
}

SampledSymbol deformed_convolution(const DeformationField& field, double t) {
  return deformed_convolution(field.chart, field.grid, field.f0, field.g0, t);
}

SampledSymbol scaled_commutator(const GroupoidChart& chart, const GridSpec& grid,
                                const Operand& f, const Operand& g, double t) {
  SampledSymbol d = deformed_convolution(chart, grid, f, g, t);
  d -= deformed_convolution(chart, grid, g, f, t);
  d *= 1.0 / t;
  return d;
}

SampledSymbol scaled_commutator(const DeformationField& field, double t) {
  return scaled_commutator(field.chart, field.grid, field.f0, field.g0, t);
}

bool LimitTable::strictly_decreasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].error < rows[k - 1].error)) return false;
  }
  return true;
}

bool LimitTable::ratios_within(double lo, double hi) const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].ratio >= lo && rows[k].ratio <= hi)) return false;
  }
  return true;
}

double LimitTable::rate_constant() const {
  if (rows.empty()) return 0.0;
  return rows.back().error / std::abs(rows.back().t);
}

LimitTable classical_limit_error_table(const DeformationField& field, const AlgebroidData& data) {
  const auto bad = field.violations();
  if (!bad.empty()) throw ConfigError(bad);
  if (field.ts.size() < 3) throw Error("classical limit table needs at least 3 values of t");
  SampledSymbol target = poisson_bracket(field.f0, field.g0, data, field.grid);
  target *= 1.0 / kTwoPiI;
  double bb = 0.0;
  for (const auto& z : target.values) bb += std::norm(z);

  LimitTable table;
  table.bracket_sup = target.sup();
  for (double t : field.ts) {
    const auto start = std::chrono::steady_clock::now();
    const SampledSymbol d = scaled_commutator(field, t);
    LimitRow row;
    row.t = t;
    row.error = sup_diff(d, target);
    cplx bd = 0.0;
    for (std::size_t k = 0; k < d.values.size(); ++k) bd += std::conj(target.values[k]) * d.values[k];
    row.kappa = bb > 0.0 ? bd / bb : cplx(0.0, 0.0);
    row.ratio = table.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : row.error / table.rows.back().error;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    table.rows.push_back(row);
  }
  return table;
}

LimitTable classical_limit_error_table(const DeformationField& field, double fd_step) {
  return classical_limit_error_table(field, extract_algebroid(field.chart, field.grid, fd_step));
}

}  // namespace gcl
