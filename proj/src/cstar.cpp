#include "gcl/cstar.hpp"

#include <cmath>
#include <sstream>

#include "gcl/tangent.hpp"

namespace gcl {

namespace {

void matvec(const Matrix& a, const std::vector<cplx>& x, std::vector<cplx>& y) {
  parallel_for(a.rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const cplx* row = &a.data[i * a.cols];
      cplx s = 0.0;
      for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * x[j];
      y[i] = s;
    }
  });
}

// y = A^* x, one output column per task so the sums keep a fixed order.
void matvec_adjoint(const Matrix& a, const std::vector<cplx>& x, std::vector<cplx>& y) {
  parallel_for(a.cols, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < a.rows; ++i) s += std::conj(a.data[i * a.cols + j]) * x[i];
      y[j] = s;
    }
  });
}

double norm2(const std::vector<cplx>& x) {
  double s = 0.0;
  for (const auto& z : x) s += std::norm(z);
  return std::sqrt(s);
}

std::vector<double> base_weights(const GridSpec& grid) {
  std::vector<double> w(grid.base_size());
  for (std::size_t b = 0; b < w.size(); ++b) w[b] = grid.base_weight(b);
  return w;
}

}  // namespace

NormEstimate top_singular_value(const Matrix& a, const PowerOptions& opts) {
  NormEstimate est;
  est.size = a.cols;
  if (a.rows == 0 || a.cols == 0) return est;
  std::vector<cplx> x(a.cols, 1.0 / std::sqrt(static_cast<double>(a.cols))), y(a.rows), z(a.cols);
  double lambda = 0.0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    matvec(a, x, y);
    const double ny = norm2(y);
    const double next = ny * ny;
    est.iterations = it;
    if (next == 0.0) {
      est.norm = 0.0;
      est.residual = 0.0;
      return est;
    }
    est.residual = std::abs(next - lambda) / next;
    lambda = next;
    if (it > 1 && est.residual <= opts.tolerance) {
      est.norm = std::sqrt(lambda);
      return est;
    }
    matvec_adjoint(a, y, z);
    const double nz = norm2(z);
    for (std::size_t j = 0; j < a.cols; ++j) x[j] = z[j] / nz;
  }
  std::ostringstream msg;
  msg << "power iteration did not reach tolerance " << opts.tolerance << " in "
      << opts.max_iterations << " iterations (residual " << est.residual << ")";
  throw ConvergenceError(msg.str());
}

Matrix nystrom(const Matrix& kernel, std::span<const double> row_weights,
               std::span<const double> col_weights) {
  if (row_weights.size() != kernel.rows || col_weights.size() != kernel.cols) {
    throw GridMismatchError("nystrom: weight vectors do not match the kernel");
  }
  Matrix a = kernel;
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double ri = std::sqrt(row_weights[i]);
    for (std::size_t j = 0; j < a.cols; ++j) a(i, j) *= ri * std::sqrt(col_weights[j]);
  }
  return a;
}

double zero_fiber_norm(const SymbolSpec& f0, const GridSpec& grid,
                       std::span<const double> mu_on_base) {
  const SampledSymbol s = eval_symbol(f0, grid);
  if (s.sup() == 0.0) return 0.0;
  GridSpec dual = choose_dual_grid({&s}, mu_on_base).grid;
  double prev = fourier(s, mu_on_base, dual).sup();
  for (int k = 0; k < 6; ++k) {
    std::vector<GridAxis> axes = dual.fiber_axes();
    for (auto& ax : axes) ax = GridAxis::symmetric(ax.radius(), 2 * (ax.count - 1));
    dual = grid.with_fiber(axes);
    const double next = fourier(s, mu_on_base, dual).sup();
    if (std::abs(next - prev) < 1e-4 * next) return next;
    prev = next;
  }
  throw ConvergenceError("zero-fiber norm did not settle after 6 dual-grid doublings");
}

double zero_fiber_norm(const SymbolSpec& f0, const GridSpec& grid) {
  const Vec mu(grid.base_size(), 1.0);
  return zero_fiber_norm(f0, grid, mu);
}

Matrix pair_kernel(const SymbolSpec& f0, double t, const GridSpec& grid) {
  if (t == 0.0) throw DomainError("kernel norm needs t != 0");
  const std::size_t n = grid.base_dim(), bs = grid.base_size();
  if (grid.fiber_dim() != n) throw GridMismatchError("pair kernel needs fiber dimension = base dimension");
  const double scale = std::pow(std::abs(t), -static_cast<double>(n));
  Matrix k(bs, bs);
  parallel_for(bs, [&](std::size_t begin, std::size_t end) {
    Vec x(n), y(n), v(n);
    for (std::size_t a = begin; a < end; ++a) {
      grid.base_point(a, x);
      for (std::size_t b = 0; b < bs; ++b) {
        grid.base_point(b, y);
        for (std::size_t d = 0; d < n; ++d) v[d] = (y[d] - x[d]) / t;
        k(a, b) = scale * f0(x, v);
      }
    }
  });
  return k;
}

NormEstimate base_kernel_norm(const Matrix& kernel, const GridSpec& grid, const PowerOptions& opts) {
  const auto w = base_weights(grid);
  return top_singular_value(nystrom(kernel, w, w), opts);
}

NormEstimate pair_kernel_norm(const SymbolSpec& f0, double t, const GridSpec& grid,
                              const PowerOptions& opts) {
  for (std::size_t d = 0; d < grid.base_dim(); ++d) {
    if (std::abs(t) * grid.fiber_axes().at(d).radius() > grid.base_axes()[d].radius()) {
      throw SupportError("kernel support |t| * fiber radius exceeds the base radius");
    }
  }
  return base_kernel_norm(pair_kernel(f0, t, grid), grid, opts);
}

Matrix pair_kernel_self_adjoint_square(const SymbolSpec& f0, double t, const GridSpec& grid) {
  const Matrix k = pair_kernel(f0, t, grid);
  const auto w = base_weights(grid);
  Matrix out(k.rows, k.rows);
  parallel_for(k.rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = 0; b < k.rows; ++b) {
        cplx s = 0.0;
        for (std::size_t c = 0; c < k.cols; ++c) s += k(a, c) * w[c] * std::conj(k(b, c));
        out(a, b) = s;
      }
    }
  });
  return out;
}

Matrix group_regular_matrix(const SymbolSpec& f0, const GroupoidChart& chart, double t,
                            const GridSpec& grid) {
  if (chart.n != 0 || grid.base_dim() != 0) throw Error("group_regular_norm needs a group chart (n = 0)");
  if (grid.fiber_dim() != chart.m) throw GridMismatchError("grid fiber dimension does not match the chart");
  if (!t_admissible(chart, grid, t)) throw DomainError("t is zero or too large for the fiber grid");
  const std::size_t m = chart.m, fs = grid.fiber_size();
  if (fs > 4096) throw Error("group_regular_norm: fiber grid too large for a dense matrix");
  const Vec none;

  Vec dens(fs);
  std::vector<cplx> coef(fs);
  {
    Vec eta(m), v(m);
    for (std::size_t c = 0; c < fs; ++c) {
      grid.fiber_point(c, eta);
      for (std::size_t i = 0; i < m; ++i) v[i] = t * eta[i];
      dens[c] = grid.fiber_weight(c) * haar_density(chart, none, v);
      coef[c] = f0(none, eta) * dens[c];
    }
  }
  Matrix mat(fs, fs);
  parallel_for(fs, [&](std::size_t begin, std::size_t end) {
    Vec xi(m), eta(m), v(m), target(m);
    std::vector<long> lo(m);
    std::vector<double> fr(m);
    for (std::size_t a = begin; a < end; ++a) {
      grid.fiber_point(a, xi);
      for (std::size_t i = 0; i < m; ++i) target[i] = t * xi[i];
      for (std::size_t c = 0; c < fs; ++c) {
        if (coef[c] == cplx(0.0, 0.0)) continue;
        grid.fiber_point(c, eta);
        for (std::size_t i = 0; i < m; ++i) v[i] = t * eta[i];
        const Vec w = solve_product(chart, none, v, target).w;
        bool inside = true;
        for (std::size_t d = 0; d < m && inside; ++d) {
          const auto& ax = grid.fiber_axes()[d];
          const double q = (w[d] / t - ax.origin) / ax.spacing;
          const double r = std::round(q);
          if (std::abs(q - r) <= 1e-9) {
            lo[d] = static_cast<long>(r);
            fr[d] = 0.0;
          } else {
            lo[d] = static_cast<long>(std::floor(q));
            fr[d] = q - std::floor(q);
          }
          if (q < -1e-9 || q > static_cast<double>(ax.count - 1) + 1e-9) inside = false;
        }
        if (!inside) continue;
        // Hat-function weights of the enclosing cell corners.
        for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
          double wt = 1.0;
          std::size_t k = 0;
          for (std::size_t d = 0; d < m && wt != 0.0; ++d) {
            const bool up = (corner >> d) & 1U;
            const long idx = lo[d] + (up ? 1 : 0);
            wt *= up ? fr[d] : 1.0 - fr[d];
            if (idx < 0 || idx >= static_cast<long>(grid.fiber_axes()[d].count)) wt = 0.0;
            else k += static_cast<std::size_t>(idx) * grid.fiber_stride(d);
          }
          if (wt != 0.0) mat(a, k) += wt * coef[c];
        }
      }
    }
  });
  // Orthonormal frame: D^{1/2} M D^{-1/2} with D = w(xi) rho(t xi).
  for (std::size_t a = 0; a < fs; ++a) {
    for (std::size_t k = 0; k < fs; ++k) mat(a, k) *= std::sqrt(dens[a] / dens[k]);
  }
  return mat;
}

NormEstimate group_regular_norm(const SymbolSpec& f0, const GroupoidChart& chart, double t,
                                const GridSpec& grid, const PowerOptions& opts) {
  return top_singular_value(group_regular_matrix(f0, chart, t, grid), opts);
}

bool NormCurve::delta_decreasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].delta < rows[k - 1].delta)) return false;
  }
  return true;
}

NormCurve norm_curve(const SymbolSpec& f0, const GroupoidChart& chart, const Vec& ts,
                     const GridSpec& grid, const PowerOptions& opts) {
  const bool pair = chart.kind == ChartKind::Pair;
  if (!pair && chart.n != 0) {
    throw Error("norm_curve supports pair charts and group charts (n = 0) only");
  }
  Vec mu(grid.base_size());
  for (std::size_t b = 0; b < mu.size(); ++b) mu[b] = chart.mu_e(grid.base_point(b));
  NormCurve curve;
  curve.zero_norm = zero_fiber_norm(f0, grid, mu);
  for (double t : ts) {
    if (!(t > 0.0)) throw DomainError("norm curve needs positive t");
    const NormEstimate est =
        pair ? pair_kernel_norm(f0, t, grid, opts) : group_regular_norm(f0, chart, t, grid, opts);
    curve.rows.push_back({t, est.norm, est.residual, est.size, std::abs(est.norm - curve.zero_norm)});
  }
  return curve;
}

}  // namespace gcl
