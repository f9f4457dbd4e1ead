#include <doctest.h>

#include <cmath>
#include <random>

#include "gcl/symbol.hpp"

using namespace gcl;

namespace {

// Independent evaluation of one term straight from the formula.
cplx direct(cplx coef, int p, int q, double a, double xc, double b, double xic, double x, double xi) {
  return coef * std::pow(x, p) * std::pow(xi, q) *
         std::exp(-a * (x - xc) * (x - xc) - b * (xi - xic) * (xi - xic));
}

SymbolSpec sample_symbol() {
  SymbolSpec s(1, 1);
  s.add_term(SymbolTerm{cplx(1.0, 0.5), {1}, {2}, {1.5}, {0.2}, {0.7}, {-0.1}});
  s.add_term(SymbolTerm{cplx(-0.3, 0.0), {0}, {1}, {1.0}, {0.0}, {2.0}, {0.4}});
  return s;
}

}  // namespace

TEST_CASE("evaluation matches the formula") {
  const SymbolSpec s = sample_symbol();
  for (double x : {-0.7, 0.0, 0.3}) {
    for (double xi : {-1.1, 0.25, 0.9}) {
      const cplx want = direct(cplx(1.0, 0.5), 1, 2, 1.5, 0.2, 0.7, -0.1, x, xi) +
                        direct(-0.3, 0, 1, 1.0, 0.0, 2.0, 0.4, x, xi);
      CHECK(std::abs(s(Vec{x}, Vec{xi}) - want) <= 1e-14);
    }
  }
}

TEST_CASE("derivatives agree with finite differences") {
  const SymbolSpec s = sample_symbol();
  const double h = 1e-5;
  for (double x : {-0.4, 0.6}) {
    for (double xi : {-0.3, 0.8}) {
      const cplx dx = (s(Vec{x + h}, Vec{xi}) - s(Vec{x - h}, Vec{xi})) / (2 * h);
      const cplx dxi = (s(Vec{x}, Vec{xi + h}) - s(Vec{x}, Vec{xi - h})) / (2 * h);
      CHECK(std::abs(s.d_x(0)(Vec{x}, Vec{xi}) - dx) <= 1e-8);
      CHECK(std::abs(s.d_xi(0)(Vec{x}, Vec{xi}) - dxi) <= 1e-8);
    }
  }
}

TEST_CASE("multiplication by coordinates") {
  const SymbolSpec s = sample_symbol();
  const Vec x{0.3}, xi{-0.6};
  CHECK(std::abs(s.times_x(0)(x, xi) - 0.3 * s(x, xi)) <= 1e-15);
  CHECK(std::abs(s.times_xi(0)(x, xi) + 0.6 * s(x, xi)) <= 1e-15);
}

TEST_CASE("canonical form merges like terms") {
  const SymbolSpec g = SymbolSpec::gaussian(1, 1);
  CHECK(g + g == g.scaled(2.0));
  CHECK((g - g).is_zero());
  CHECK(SymbolSpec::zero(1, 1).is_zero());
  CHECK(sample_symbol() + g == g + sample_symbol());
  CHECK(g.d_x(0).d_xi(0) == g.d_xi(0).d_x(0));
}

TEST_CASE("invalid terms throw") {
  SymbolSpec s(1, 1);
  CHECK_THROWS_AS(s.add_term(SymbolTerm{1.0, {1, 1}, {0}, {1.0}, {0.0}, {1.0}, {0.0}}), Error);
  CHECK_THROWS_AS(s.add_term(SymbolTerm{1.0, {0}, {0}, {-1.0}, {0.0}, {1.0}, {0.0}}), Error);
}

TEST_CASE("sampling on a grid and decay") {
  const auto grid = GridSpec::symmetric(1, 6.0, 24, 1, 6.0, 24);
  const SymbolSpec g = SymbolSpec::gaussian(1, 1);
  const SampledSymbol s = eval_symbol(g, grid);
  CHECK(s.values.size() == 25 * 25);
  CHECK(s.sup() == doctest::Approx(1.0));
  CHECK(g.decay(grid).ok());
  CHECK(s.decays());

  const auto small = GridSpec::symmetric(1, 1.0, 8, 1, 1.0, 8);
  CHECK(!g.decay(small).ok());
  CHECK_THROWS_AS(eval_symbol(g, small, true), DecayError);
  CHECK_NOTHROW(eval_symbol(g, small, false));
}

TEST_CASE("sampled arithmetic") {
  const auto grid = GridSpec::symmetric(1, 6.0, 16, 1, 6.0, 16);
  const SampledSymbol a = eval_symbol(SymbolSpec::gaussian(1, 1), grid);
  const SampledSymbol b = eval_symbol(sample_symbol(), grid);
  const SampledSymbol c = a + b;
  const SampledSymbol d = eval_symbol(SymbolSpec::gaussian(1, 1) + sample_symbol(), grid);
  CHECK(sup_diff(c, d) <= 1e-15);
  CHECK(sup_diff(c - b, a) <= 1e-15);
  const auto other = GridSpec::symmetric(1, 6.0, 8, 1, 6.0, 16);
  CHECK_THROWS_AS(require_same_grid(a, eval_symbol(SymbolSpec::gaussian(1, 1), other), "x"),
                  GridMismatchError);
}

TEST_CASE("grid layout and weights") {
  const auto grid = GridSpec::symmetric(2, 2.0, 8, 1, 3.0, 12);
  CHECK(grid.base_size() == 81);
  CHECK(grid.fiber_size() == 13);
  const Vec p = grid.base_point(10);  // row 1, column 1
  CHECK(p[0] == doctest::Approx(-1.5));
  CHECK(p[1] == doctest::Approx(-1.5));
  CHECK(grid.base_point(1)[1] == doctest::Approx(-1.5));
  double total = 0.0;
  for (std::size_t k = 0; k < grid.fiber_size(); ++k) total += grid.fiber_weight(k);
  CHECK(total == doctest::Approx(6.0));
  CHECK(grid.violations().empty());
  const GridSpec bad({GridAxis{0.0, 1.0, 4}}, {GridAxis{0.0, 1.0, 10}});
  CHECK(bad.violations().size() >= 2);
}
