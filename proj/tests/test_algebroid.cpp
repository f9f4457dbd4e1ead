#include <doctest.h>

#include <cmath>

#include "gcl/algebroid.hpp"

using namespace gcl;

namespace {

// sigma(u, v) = u + sin v, product unused by the anchor.
GroupoidChart sine_chart() {
  GroupoidChart c;
  c.name = "sine";
  c.n = 1;
  c.m = 1;
  c.sigma = [](std::span<const double> u, std::span<const double> v, std::span<double> out) {
    out[0] = u[0] + std::sin(v[0]);
  };
  c.product = [](std::span<const double>, std::span<const double> v, std::span<const double> w,
                 std::span<double> out) { out[0] = v[0] + w[0]; };
  c.mu_e = [](std::span<const double>) { return 1.0; };
  c.u_box = Box::cube(1, 5.0);
  c.v_box = Box::cube(1, 1.0);
  return c;
}

}  // namespace

TEST_CASE("heisenberg structure constants") {
  const Vec c = structure_constants(catalog::heisenberg(), Vec{});
  auto at = [&](int i, int j, int k) { return c[(i * 3 + j) * 3 + k]; };
  CHECK(std::abs(at(0, 1, 2) - 1.0) <= 1e-5);
  CHECK(std::abs(at(1, 0, 2) + 1.0) <= 1e-5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 0 && k == 2)) continue;
        CHECK(std::abs(at(i, j, k)) <= 1e-5);
      }
  CHECK(jacobi_residual(c, 3) <= 1e-8);
}

TEST_CASE("ax_plus_b structure constant") {
  const Vec c = structure_constants(catalog::ax_plus_b(), Vec{});
  CHECK(std::abs(c[(0 * 2 + 1) * 2 + 1] - 1.0) <= 1e-5);
  CHECK(std::abs(c[(1 * 2 + 0) * 2 + 1] + 1.0) <= 1e-5);
  CHECK(std::abs(c[(0 * 2 + 1) * 2 + 0]) <= 1e-5);
}

TEST_CASE("pair anchor is the identity") {
  const auto chart = catalog::pair(2);
  for (const Vec& u : {Vec{0.0, 0.0}, Vec{1.5, -2.0}}) {
    const Vec a = anchor(chart, u);
    CHECK(std::abs(a[0] - 1.0) <= 1e-8);
    CHECK(std::abs(a[1]) <= 1e-8);
    CHECK(std::abs(a[2]) <= 1e-8);
    CHECK(std::abs(a[3] - 1.0) <= 1e-8);
    CHECK(max_abs(structure_constants(chart, u)) <= 1e-5);
  }
}

TEST_CASE("abelian bundle has zero anchor and structure") {
  const auto chart = catalog::abelian_bundle(1, 2);
  CHECK(max_abs(anchor(chart, Vec{0.5})) == 0.0);
  CHECK(max_abs(structure_constants(chart, Vec{0.5})) == 0.0);
}

TEST_CASE("structure constants antisymmetric bit for bit") {
  for (const auto& chart : {catalog::heisenberg(), catalog::ax_plus_b(), catalog::corrupted_pair()}) {
    const std::size_t m = chart.m;
    const Vec c = structure_constants(chart, Vec(chart.n, 0.0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
          CHECK(c[(i * m + j) * m + k] == -c[(j * m + i) * m + k]);
  }
}

TEST_CASE("finite differences converge at second order") {
  // ax_plus_b: the mixed central difference of e^{v1} w2 is sinh(h)/h.
  const auto chart = catalog::ax_plus_b();
  auto err_b = [&](double h) { return std::abs(bilinear_B(chart, Vec{}, 0, 1, h)[1] - 1.0); };
  const double e1 = err_b(0.1), e2 = err_b(0.05);
  CHECK(e1 == doctest::Approx(std::sinh(0.1) / 0.1 - 1.0).epsilon(1e-6));
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);

  // anchor of sigma = u + sin v: sin(h)/h.
  const auto s = sine_chart();
  auto err_a = [&](double h) { return std::abs(anchor(s, Vec{0.2}, h)[0] - 1.0); };
  const double a1 = err_a(0.2), a2 = err_a(0.1);
  CHECK(a1 == doctest::Approx(1.0 - std::sin(0.2) / 0.2).epsilon(1e-6));
  CHECK(a1 / a2 >= 3.5);
  CHECK(a1 / a2 <= 4.5);
}

TEST_CASE("log weight gradient") {
  auto chart = catalog::pair(1);
  set_haar_weight(chart, [](std::span<const double> u) { return std::exp(0.5 * u[0] - 0.1 * u[0] * u[0]); },
                  false);
  const Vec g = log_weight_gradient(chart, Vec{1.0});
  CHECK(g[0] == doctest::Approx(0.3).epsilon(1e-9));
  set_haar_weight(chart, [](std::span<const double>) { return -1.0; }, false);
  CHECK_THROWS_AS(log_weight_gradient(chart, Vec{0.0}), WeightError);
}

TEST_CASE("extraction tabulates on grid nodes and matches the analytic table") {
  const auto chart = catalog::pair(1, 10.0);
  const auto grid = GridSpec::symmetric(1, 4.0, 16, 1, 4.0, 16);
  const AlgebroidData d = extract_algebroid(chart, grid);
  CHECK(d.size() == 17);
  d.require_matches(grid);
  const AlgebroidData a = analytic_algebroid(chart, grid);
  for (std::size_t p = 0; p < d.size(); ++p) {
    CHECK(max_abs_diff(d.anchors[p], a.anchors[p]) <= 1e-8);
    CHECK(max_abs_diff(d.structures[p], a.structures[p]) <= 1e-5);
    CHECK(d.weights[p] == 1.0);
  }
  const auto other = GridSpec::symmetric(1, 4.0, 8, 1, 4.0, 16);
  CHECK_THROWS_AS(d.require_matches(other), MissingDataError);
  CHECK_THROWS_AS(extract_algebroid(chart, GridSpec::symmetric(2, 4.0, 8, 2, 4.0, 8)),
                  GridMismatchError);
}

TEST_CASE("heisenberg table has one base point") {
  const auto grid = GridSpec::symmetric(0, 0.0, 0, 3, 4.0, 8);
  const AlgebroidData d = extract_algebroid(catalog::heisenberg(), grid);
  CHECK(d.size() == 1);
  CHECK(d.anchors[0].empty());
  CHECK(d.structure_vanishes(0, 0, 2));
  CHECK(!d.structure_vanishes(0, 1, 2));
}

TEST_CASE("margin violations throw") {
  CHECK_THROWS_AS(anchor(catalog::pair(1, 1.0), Vec{1.0}), DomainError);
}

TEST_CASE("jacobi residual detects a non-Lie bracket") {
  // c_012 = c_120 = c_201 = 1 (and antisymmetric partners) is so(3) up to sign: Jacobi holds.
  Vec c(27, 0.0);
  auto set = [&](int i, int j, int k, double v) {
    c[(i * 3 + j) * 3 + k] = v;
    c[(j * 3 + i) * 3 + k] = -v;
  };
  set(0, 1, 2, 1.0);
  set(1, 2, 0, 1.0);
  set(2, 0, 1, 1.0);
  CHECK(jacobi_residual(c, 3) <= 1e-15);
  set(0, 1, 0, 1.0);
  set(0, 2, 0, 1.0);
  set(1, 2, 2, 3.0);
  CHECK(jacobi_residual(c, 3) > 1e-3);
}
