#include <doctest.h>

#include <cmath>

#include "gcl/groupoid.hpp"

using namespace gcl;

TEST_CASE("compose evaluates the product law") {
  CHECK(compose(catalog::pair(1), Vec{0.3}, Vec{0.2}, Vec{-0.1})[0] == doctest::Approx(0.1));
  const Vec p = compose(catalog::heisenberg(), Vec{}, Vec{1, 0, 0}, Vec{0, 1, 0});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 1.0);
  CHECK(p[2] == 0.5);
  const Vec q = compose(catalog::ax_plus_b(), Vec{}, Vec{1.0, 2.0}, Vec{0.5, 1.0});
  CHECK(q[0] == doctest::Approx(1.5));
  CHECK(q[1] == doctest::Approx(2.0 + std::exp(1.0)));
}

TEST_CASE("unit law and determinism") {
  for (const auto& c : {catalog::pair(2), catalog::abelian_bundle(1, 2), catalog::heisenberg(),
                        catalog::ax_plus_b()}) {
    const Vec u(c.n, 0.25), zero(c.m, 0.0);
    Vec w(c.m);
    for (std::size_t i = 0; i < c.m; ++i) w[i] = 0.3 - 0.2 * static_cast<double>(i);
    CHECK(compose(c, u, zero, w) == w);
    CHECK(compose(c, u, w, zero) == w);
    CHECK(compose(c, u, w, w) == compose(c, u, w, w));
    CHECK(source_coords(c, u, zero) == u);
  }
}

TEST_CASE("source coordinates") {
  const Vec s = source_coords(catalog::pair(2), Vec{0.1, 0.2}, Vec{0.3, -0.1});
  CHECK(s[0] == doctest::Approx(0.4));
  CHECK(s[1] == doctest::Approx(0.1));
  CHECK(source_coords(catalog::abelian_bundle(1, 2), Vec{0.7}, Vec{3.0, -2.0})[0] == 0.7);
}

TEST_CASE("domain violations throw") {
  const auto c = catalog::pair(1, 1.0);
  CHECK_THROWS_AS(compose(c, Vec{0.0}, Vec{0.9}, Vec{0.9}), DomainError);
  CHECK_THROWS_AS(compose(c, Vec{2.0}, Vec{0.0}, Vec{0.0}), DomainError);
  CHECK_THROWS_AS(source_coords(c, Vec{0.0}, Vec{1.5}), DomainError);
}

TEST_CASE("inversion") {
  const Vec a = invert_element(catalog::abelian_bundle(1, 2), Vec{0.3}, Vec{1.0, -2.0});
  CHECK(a == Vec{-1.0, 2.0});
  const Vec h = invert_element(catalog::heisenberg(), Vec{}, Vec{1, 2, 3});
  CHECK(h[0] == doctest::Approx(-1));
  CHECK(h[1] == doctest::Approx(-2));
  CHECK(h[2] == doctest::Approx(-3));
  const Vec b = invert_element(catalog::ax_plus_b(), Vec{}, Vec{1, 1});
  CHECK(b[0] == doctest::Approx(-1.0));
  CHECK(b[1] == doctest::Approx(-std::exp(-1.0)));

  // Newton path (no closed form) agrees with the closed form.
  auto c = catalog::ax_plus_b();
  c.inverse_closed_form.reset();
  const Vec n = invert_element(c, Vec{}, Vec{1, 1});
  CHECK(n[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(n[1] == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("invert then compose returns the unit") {
  for (const auto& c : {catalog::pair(2), catalog::heisenberg(), catalog::ax_plus_b(),
                        catalog::corrupted_pair()}) {
    const Vec u(c.n, -0.4);
    Vec v(c.m);
    for (std::size_t i = 0; i < c.m; ++i) v[i] = 0.6 + 0.3 * static_cast<double>(i);
    const Vec w = invert_element(c, u, v);
    CHECK(max_abs(compose(c, u, v, w)) <= 1e-10);
  }
}

TEST_CASE("Newton solve reports iterations and residual") {
  auto c = catalog::corrupted_pair();
  const SolveResult r = solve_product(c, Vec{0.0}, Vec{0.5}, Vec{1.2});
  CHECK(r.iterations >= 1);
  CHECK(r.residual <= 1e-12);
  Vec p(1);
  c.product(Vec{0.0}, Vec{0.5}, r.w, p);
  CHECK(std::abs(p[0] - 1.2) <= 1e-12);
  const SolveResult a = solve_product(catalog::abelian_bundle(1, 1), Vec{0.0}, Vec{0.5}, Vec{1.2});
  CHECK(a.w[0] == doctest::Approx(0.7));
}

TEST_CASE("catalog entries pass the axioms") {
  for (const auto& c : {catalog::pair(1), catalog::pair(2), catalog::abelian_bundle(1, 2),
                        catalog::abelian_bundle(0, 3), catalog::heisenberg(), catalog::ax_plus_b()}) {
    const AxiomReport r = validate_axioms(c, 100, 42);
    CAPTURE(c.name);
    CHECK(r.samples == 100);
    CHECK(r.associativity <= 1e-10);
    CHECK(r.source_compatibility <= 1e-10);
    CHECK(r.unit <= 1e-12);
    CHECK(r.inverse <= 1e-10);
    CHECK(r.failures().empty());
  }
  const AxiomReport p = validate_axioms(catalog::pair(1), 100, 1);
  CHECK(p.associativity <= 1e-12);
  const AxiomReport h = validate_axioms(catalog::heisenberg(), 100, 1);
  CHECK(h.associativity <= 1e-12);
  CHECK(h.source_compatibility <= 1e-12);
}

TEST_CASE("corrupted chart fails associativity") {
  // Brute-force defect at one triple for p = v + w + 0.01 v^2 w.
  auto p = [](double v, double w) { return v + w + 0.01 * v * v * w; };
  const double v = 2.0, w = 3.0, z = -1.0;
  const double defect = std::abs(p(v, p(w, z)) - p(p(v, w), z));
  CHECK(defect > 1e-4);
  const Vec lhs = compose(catalog::corrupted_pair(), Vec{0.0}, Vec{v}, compose(catalog::corrupted_pair(), Vec{v}, Vec{w}, Vec{z}));
  const Vec rhs = compose(catalog::corrupted_pair(), Vec{0.0}, compose(catalog::corrupted_pair(), Vec{0.0}, Vec{v}, Vec{w}), Vec{z});
  CHECK(std::abs(lhs[0] - rhs[0]) == doctest::Approx(defect));

  const AxiomReport r = validate_axioms(catalog::corrupted_pair(), 100, 42);
  CHECK(r.associativity > 1e-4);
  CHECK(r.unit <= 1e-12);
  const auto f = r.failures();
  REQUIRE(!f.empty());
  CHECK(f.front() == "associativity");
}

TEST_CASE("sampling is seeded and bounded") {
  const AxiomReport a = validate_axioms(catalog::ax_plus_b(), 50, 9);
  const AxiomReport b = validate_axioms(catalog::ax_plus_b(), 50, 9);
  CHECK(a.associativity == b.associativity);
  CHECK(a.attempts == b.attempts);
  CHECK_THROWS_AS(validate_axioms(catalog::pair(1), 0, 1), Error);
}
