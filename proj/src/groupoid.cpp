#include "gcl/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace gcl {

namespace catalog {

namespace {

BaseWeight unit_weight() {
  return [](std::span<const double>) { return 1.0; };
}

ChartMap3 additive_law() {
  return [](std::span<const double>, std::span<const double> v, std::span<const double> w,
            std::span<double> out) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] + w[i];
  };
}

ChartMap2 negation() {
  return [](std::span<const double>, std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  };
}

}  // namespace

GroupoidChart pair(std::size_t n, double radius) {
  if (n == 0) throw Error("pair groupoid needs n >= 1");
  GroupoidChart c;
  c.name = "pair(" + std::to_string(n) + ")";
  c.kind = ChartKind::Pair;
  c.n = n;
  c.m = n;
  c.sigma = [](std::span<const double> u, std::span<const double> v, std::span<double> out) {
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] + v[j];
  };
  c.product = additive_law();
  c.inverse_closed_form = negation();
  c.mu_e = unit_weight();
  c.u_box = Box::cube(n, radius);
  c.v_box = Box::cube(n, radius);
  c.analytic = AnalyticStructure{
      [n](std::span<const double>) {
        Vec a(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
        return a;
      },
      [n](std::span<const double>, std::size_t, std::size_t) { return Vec(n, 0.0); },
      [n](std::span<const double>) { return Vec(n, 0.0); }};
  return c;
}

GroupoidChart abelian_bundle(std::size_t n, std::size_t m, double radius) {
  if (m == 0) throw Error("abelian bundle needs m >= 1");
  GroupoidChart c;
  c.name = "abelian_bundle(" + std::to_string(n) + "," + std::to_string(m) + ")";
  c.kind = ChartKind::AbelianBundle;
  c.n = n;
  c.m = m;
  c.sigma = [](std::span<const double> u, std::span<const double>, std::span<double> out) {
    std::copy(u.begin(), u.end(), out.begin());
  };
  c.product = additive_law();
  c.inverse_closed_form = negation();
  c.mu_e = unit_weight();
  c.u_box = Box::cube(n, radius);
  c.v_box = Box::cube(m, radius);
  c.analytic = AnalyticStructure{
      [n, m](std::span<const double>) { return Vec(m * n, 0.0); },
      [m](std::span<const double>, std::size_t, std::size_t) { return Vec(m, 0.0); },
      [n](std::span<const double>) { return Vec(n, 0.0); }};
  return c;
}

GroupoidChart heisenberg(double radius) {
  GroupoidChart c;
  c.name = "heisenberg";
  c.kind = ChartKind::Heisenberg;
  c.n = 0;
  c.m = 3;
  c.sigma = [](std::span<const double>, std::span<const double>, std::span<double>) {};
  c.product = [](std::span<const double>, std::span<const double> v, std::span<const double> w,
                 std::span<double> out) {
    out[0] = v[0] + w[0];
    out[1] = v[1] + w[1];
    out[2] = v[2] + w[2] + 0.5 * (v[0] * w[1] - v[1] * w[0]);
  };
  c.inverse_closed_form = negation();
  c.mu_e = unit_weight();
  c.u_box = Box{};
  c.v_box = Box::cube(3, radius);
  c.analytic = AnalyticStructure{
      [](std::span<const double>) { return Vec{}; },
      [](std::span<const double>, std::size_t i, std::size_t j) {
        Vec b(3, 0.0);
        if (i == 0 && j == 1) b[2] = 0.5;
        if (i == 1 && j == 0) b[2] = -0.5;
        return b;
      },
      [](std::span<const double>) { return Vec{}; }};
  return c;
}

GroupoidChart ax_plus_b(double v1_radius, double v2_radius) {
  GroupoidChart c;
  c.name = "ax_plus_b";
  c.kind = ChartKind::AxPlusB;
  c.n = 0;
  c.m = 2;
  c.sigma = [](std::span<const double>, std::span<const double>, std::span<double>) {};
  c.product = [](std::span<const double>, std::span<const double> v, std::span<const double> w,
                 std::span<double> out) {
    out[0] = v[0] + w[0];
    out[1] = v[1] + std::exp(v[0]) * w[1];
  };
  c.inverse_closed_form = [](std::span<const double>, std::span<const double> v,
                             std::span<double> out) {
    out[0] = -v[0];
    out[1] = -std::exp(-v[0]) * v[1];
  };
  c.mu_e = unit_weight();
  c.u_box = Box{};
  c.v_box = Box{{-v1_radius, -v2_radius}, {v1_radius, v2_radius}};
  c.analytic = AnalyticStructure{
      [](std::span<const double>) { return Vec{}; },
      [](std::span<const double>, std::size_t i, std::size_t j) {
        Vec b(2, 0.0);
        if (i == 0 && j == 1) b[1] = 1.0;
        return b;
      },
      [](std::span<const double>) { return Vec{}; }};
  return c;
}

GroupoidChart corrupted_pair() {
  GroupoidChart c = pair(1);
  c.name = "corrupted_pair";
  c.kind = ChartKind::User;
  c.product = [](std::span<const double>, std::span<const double> v, std::span<const double> w,
                 std::span<double> out) { out[0] = v[0] + w[0] + 0.01 * v[0] * w[0] * v[0]; };
  c.inverse_closed_form.reset();
  c.analytic.reset();
  return c;
}

std::vector<std::string> names() { return {"pair", "abelian_bundle", "heisenberg", "ax_plus_b"}; }

}  // namespace catalog

void set_haar_weight(GroupoidChart& chart, BaseWeight mu_e, bool unit_weight,
                     std::function<Vec(std::span<const double>)> log_grad) {
  chart.mu_e = std::move(mu_e);
  chart.unit_weight = unit_weight;
  if (chart.analytic) {
    if (log_grad) {
      chart.analytic->log_weight_grad = std::move(log_grad);
    } else if (!unit_weight) {
      chart.analytic.reset();
    }
  }
}

namespace {

void require_in(const Box& box, std::span<const double> p, const char* what) {
  if (!box.contains(p)) {
    throw DomainError(std::string(what) + " " + format_point(p) + " is outside its chart box");
  }
}

}  // namespace

Vec compose(const GroupoidChart& chart, std::span<const double> u, std::span<const double> v,
            std::span<const double> w) {
  require_in(chart.u_box, u, "base point u");
  require_in(chart.v_box, v, "fiber vector v");
  require_in(chart.v_box, w, "fiber vector w");
  Vec out(chart.m);
  chart.product(u, v, w, out);
  require_in(chart.v_box, out, "product p(u,v,w)");
  return out;
}

Vec source_coords(const GroupoidChart& chart, std::span<const double> u,
                  std::span<const double> v) {
  require_in(chart.u_box, u, "base point u");
  require_in(chart.v_box, v, "fiber vector v");
  Vec out(chart.n);
  chart.sigma(u, v, out);
  return out;
}

SolveResult solve_product(const GroupoidChart& chart, std::span<const double> u,
                          std::span<const double> v, std::span<const double> target,
                          const SolveOptions& opts) {
  const std::size_t m = chart.m;
  const double tol = opts.tolerance * std::max(1.0, max_abs(target));
  SolveResult res;
  res.w.assign(m, 0.0);
  Vec p(m);
  auto residual_of = [&](const Vec& w) {
    chart.product(u, v, w, p);
    return max_abs_diff(p, target);
  };

  if (opts.use_closed_form && chart.inverse_closed_form) {
    // psi(u,v)^{-1} psi(u,target) = psi(sigma(u,v), p(sigma(u,v), v^{-1}, target))
    Vec s(chart.n), inv(m);
    chart.sigma(u, v, s);
    (*chart.inverse_closed_form)(u, v, inv);
    chart.product(s, inv, target, res.w);
    require_in(chart.v_box, res.w, "solution w");
    res.residual = residual_of(res.w);
    return res;
  }

  for (std::size_t i = 0; i < m; ++i) res.w[i] = target[i] - v[i];
  Vec jac(m * m), wp(m), wm(m), pp(m), pm(m), r(m);
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    chart.product(u, v, res.w, p);
    for (std::size_t i = 0; i < m; ++i) r[i] = p[i] - target[i];
    res.residual = max_abs(r);
    res.iterations = it;
    if (res.residual <= tol) return res;
    for (std::size_t k = 0; k < m; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(res.w[k]));
      wp = res.w;
      wm = res.w;
      wp[k] += h;
      wm[k] -= h;
      chart.product(u, v, wp, pp);
      chart.product(u, v, wm, pm);
      for (std::size_t i = 0; i < m; ++i) jac[i * m + k] = (pp[i] - pm[i]) / (2.0 * h);
    }
    const Vec step = solve_linear(jac, r, m);
    for (std::size_t i = 0; i < m; ++i) res.w[i] -= step[i];
    if (!chart.v_box.contains(res.w)) {
      throw DomainError("Newton iterate " + format_point(res.w) + " left the fiber box");
    }
  }
  chart.product(u, v, res.w, p);
  res.residual = max_abs_diff(p, target);
  if (res.residual <= tol) return res;
  std::ostringstream msg;
  msg << "Newton solve of p(u,v,w) = target did not converge (residual " << res.residual << ")";
  throw ConvergenceError(msg.str());
}

Vec invert_element(const GroupoidChart& chart, std::span<const double> u,
                   std::span<const double> v) {
  require_in(chart.u_box, u, "base point u");
  require_in(chart.v_box, v, "fiber vector v");
  const Vec zero(chart.m, 0.0);
  if (chart.inverse_closed_form) {
    Vec w(chart.m);
    (*chart.inverse_closed_form)(u, v, w);
    require_in(chart.v_box, w, "inverse");
    return w;
  }
  return solve_product(chart, u, v, zero).w;
}

std::vector<std::string> AxiomReport::failures(double axiom_tol, double unit_tol) const {
  std::vector<std::string> out;
  if (!(associativity <= axiom_tol)) out.push_back("associativity");
  if (!(source_compatibility <= axiom_tol)) out.push_back("source_compatibility");
  if (!(unit <= unit_tol)) out.push_back("unit");
  if (!(inverse <= axiom_tol)) out.push_back("inverse");
  return out;
}

AxiomReport validate_axioms(const GroupoidChart& chart, std::size_t sample_count,
                            std::uint64_t seed) {
  if (sample_count < 1) throw Error("validate_axioms: sample_count must be >= 1");
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * r;
  };
  auto draw = [&](const Box& box, Vec& out) {
    for (std::size_t i = 0; i < box.dim(); ++i) out[i] = uniform(box.lo[i], box.hi[i]);
  };

  const std::size_t n = chart.n, m = chart.m;
  Vec u(n), v(m), w(m), z(m);
  Vec s_uv(n), s_s_w(n), s_u_vw(n), vw(m), wz(m), lhs(m), rhs(m), inv(m), tmp(m), zero(m, 0.0);
  Vec su0(n);
  AxiomReport rep;
  const std::size_t max_attempts = 100 * sample_count;
  while (rep.samples < sample_count && rep.attempts < max_attempts) {
    ++rep.attempts;
    draw(chart.u_box, u);
    draw(chart.v_box, v);
    draw(chart.v_box, w);
    draw(chart.v_box, z);
    chart.sigma(u, v, s_uv);
    if (!chart.u_box.contains(s_uv)) continue;
    chart.product(u, v, w, vw);
    if (!chart.v_box.contains(vw)) continue;
    chart.sigma(s_uv, w, s_s_w);
    if (!chart.u_box.contains(s_s_w)) continue;
    chart.product(s_uv, w, z, wz);
    if (!chart.v_box.contains(wz)) continue;
    chart.product(u, v, wz, lhs);
    chart.product(u, vw, z, rhs);
    if (!chart.v_box.contains(lhs) || !chart.v_box.contains(rhs)) continue;
    try {
      inv = invert_element(chart, u, v);
    } catch (const Error&) {
      continue;
    }
    ++rep.samples;
    rep.associativity = std::max(rep.associativity, max_abs_diff(lhs, rhs));
    chart.sigma(u, vw, s_u_vw);
    rep.source_compatibility = std::max(rep.source_compatibility, max_abs_diff(s_u_vw, s_s_w));
    chart.sigma(u, zero, su0);
    rep.unit = std::max(rep.unit, max_abs_diff(su0, u));
    chart.product(u, zero, w, tmp);
    rep.unit = std::max(rep.unit, max_abs_diff(tmp, w));
    chart.product(u, v, zero, tmp);
    rep.unit = std::max(rep.unit, max_abs_diff(tmp, v));
    chart.product(u, v, inv, tmp);
    rep.inverse = std::max(rep.inverse, max_abs(tmp));
  }
  if (rep.samples < sample_count) {
    std::ostringstream msg;
    msg << "validate_axioms: only " << rep.samples << " of " << sample_count
        << " composable samples found in " << rep.attempts << " attempts";
    throw SamplingError(msg.str());
  }
  return rep;
}

}  // namespace gcl
