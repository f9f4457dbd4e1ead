#include "gcl/algebroid.hpp"

#include <cmath>
#include <sstream>

namespace gcl {

namespace {

void require_margin(const GroupoidChart& chart, std::span<const double> u, double h) {
  for (std::size_t j = 0; j < chart.n; ++j) {
    if (!(u[j] - h >= chart.u_box.lo[j] && u[j] + h <= chart.u_box.hi[j])) {
      throw DomainError("base point " + format_point(u) +
                        " is not interior to the chart box with the finite-difference margin");
    }
  }
  for (std::size_t i = 0; i < chart.m; ++i) {
    if (!(chart.v_box.lo[i] <= -h && chart.v_box.hi[i] >= h)) {
      throw DomainError("fiber box is narrower than the finite-difference step");
    }
  }
}

}  // namespace

bool AlgebroidData::anchor_vanishes(std::size_t i, std::size_t j) const {
  for (std::size_t p = 0; p < size(); ++p) {
    if (anchor(p, i, j) != 0.0) return false;
  }
  return true;
}

bool AlgebroidData::structure_vanishes(std::size_t i, std::size_t j, std::size_t k) const {
  for (std::size_t p = 0; p < size(); ++p) {
    if (structure(p, i, j, k) != 0.0) return false;
  }
  return true;
}

void AlgebroidData::require_matches(const GridSpec& grid) const {
  if (n != grid.base_dim() || m != grid.fiber_dim()) {
    throw GridMismatchError("algebroid data dimensions do not match the grid");
  }
  if (size() != grid.base_size()) {
    throw MissingDataError("algebroid data is not tabulated on the grid's base nodes");
  }
  Vec x(n);
  for (std::size_t b = 0; b < size(); ++b) {
    grid.base_point(b, x);
    if (max_abs_diff(x, base_points[b]) > 1e-12) {
      throw MissingDataError("algebroid data base point " + format_point(base_points[b]) +
                             " is not a grid node");
    }
  }
}

Vec anchor(const GroupoidChart& chart, std::span<const double> u, double h) {
  require_margin(chart, u, h);
  const std::size_t n = chart.n, m = chart.m;
  Vec a(m * n, 0.0), v(m, 0.0), sp(n), sm(n);
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = h;
    chart.sigma(u, v, sp);
    v[i] = -h;
    chart.sigma(u, v, sm);
    v[i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = (sp[j] - sm[j]) / (2.0 * h);
  }
  return a;
}

Vec bilinear_B(const GroupoidChart& chart, std::span<const double> u, std::size_t i,
               std::size_t j, double h) {
  if (i >= chart.m || j >= chart.m) throw Error("bilinear_B: index out of range");
  require_margin(chart, u, h);
  const std::size_t m = chart.m;
  Vec v(m, 0.0), w(m, 0.0), ppp(m), ppm(m), pmp(m), pmm(m);
  v[i] = h;
  w[j] = h;
  chart.product(u, v, w, ppp);
  w[j] = -h;
  chart.product(u, v, w, ppm);
  v[i] = -h;
  chart.product(u, v, w, pmm);
  w[j] = h;
  chart.product(u, v, w, pmp);
  Vec b(m);
  for (std::size_t k = 0; k < m; ++k) {
    b[k] = ((ppp[k] - ppm[k]) - (pmp[k] - pmm[k])) / (4.0 * h * h);
  }
  return b;
}

Vec structure_constants(const GroupoidChart& chart, std::span<const double> u, double h) {
  const std::size_t m = chart.m;
  std::vector<Vec> B(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) B[i * m + j] = bilinear_B(chart, u, i, j, h);
  }
  Vec c(m * m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        c[(i * m + j) * m + k] = B[i * m + j][k] - B[j * m + i][k];
      }
    }
  }
  return c;
}

Vec log_weight_gradient(const GroupoidChart& chart, std::span<const double> u, double h) {
  const std::size_t n = chart.n;
  Vec g(n), up(u.begin(), u.end()), um(u.begin(), u.end());
  auto log_mu = [&](const Vec& x) {
    const double mu = chart.mu_e(x);
    if (!(mu > 0.0)) {
      throw WeightError("Haar weight mu_e is not positive at " + format_point(x));
    }
    return std::log(mu);
  };
  log_mu(Vec(u.begin(), u.end()));
  for (std::size_t j = 0; j < n; ++j) {
    up[j] = u[j] + h;
    um[j] = u[j] - h;
    g[j] = (log_mu(up) - log_mu(um)) / (2.0 * h);
    up[j] = u[j];
    um[j] = u[j];
  }
  return g;
}

std::vector<Vec> base_nodes(const GridSpec& grid) {
  std::vector<Vec> pts(grid.base_size());
  for (std::size_t b = 0; b < grid.base_size(); ++b) pts[b] = grid.base_point(b);
  return pts;
}

AlgebroidData extract_algebroid(const GroupoidChart& chart, const std::vector<Vec>& points,
                                double fd_step) {
  AlgebroidData d;
  d.n = chart.n;
  d.m = chart.m;
  d.fd_step = fd_step;
  d.base_points = points;
  d.anchors.resize(points.size());
  d.structures.resize(points.size());
  d.log_weight_grads.resize(points.size());
  d.weights.resize(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto& u = points[p];
      d.anchors[p] = anchor(chart, u, fd_step);
      d.structures[p] = structure_constants(chart, u, fd_step);
      d.log_weight_grads[p] = log_weight_gradient(chart, u, fd_step);
      d.weights[p] = chart.mu_e(u);
    }
  });
  return d;
}

AlgebroidData extract_algebroid(const GroupoidChart& chart, const GridSpec& grid,
                                double fd_step) {
  if (grid.base_dim() != chart.n || grid.fiber_dim() != chart.m) {
    throw GridMismatchError("grid dimensions do not match the chart");
  }
  return extract_algebroid(chart, base_nodes(grid), fd_step);
}

AlgebroidData analytic_algebroid(const GroupoidChart& chart, const GridSpec& grid) {
  if (!chart.analytic) throw Error("chart '" + chart.name + "' has no closed-form structure");
  const auto& an = *chart.analytic;
  AlgebroidData d;
  d.n = chart.n;
  d.m = chart.m;
  d.fd_step = 0.0;
  d.base_points = base_nodes(grid);
  const std::size_t m = chart.m;
  for (const auto& u : d.base_points) {
    d.anchors.push_back(an.anchor(u));
    Vec c(m * m * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const Vec bij = an.bilinear(u, i, j), bji = an.bilinear(u, j, i);
        for (std::size_t k = 0; k < m; ++k) c[(i * m + j) * m + k] = bij[k] - bji[k];
      }
    }
    d.structures.push_back(std::move(c));
    d.log_weight_grads.push_back(an.log_weight_grad(u));
    d.weights.push_back(chart.mu_e(u));
  }
  return d;
}

double jacobi_residual(std::span<const double> c, std::size_t m) {
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return c[(i * m + j) * m + k]; };
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t r = 0; r < m; ++r) {
          double s = 0.0;
          for (std::size_t l = 0; l < m; ++l) {
            s += at(i, j, l) * at(l, k, r) + at(j, k, l) * at(l, i, r) + at(k, i, l) * at(l, j, r);
          }
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst;
}

}  // namespace gcl
