#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcl/common.hpp"

namespace gcl {

/// Compiled expression over the chart variables u_j, v_i, w_i.
///
/// JSON form: a number is a constant, a string names a variable ("u1",
/// "v2", "w3", 1-based) or the constant "pi", and an array is an
/// application [op, args...] with op one of "+", "-", "*", "/", "exp",
/// "sin", "cos". "-" with one argument negates.
class Expr {
 public:
  struct Limits {
    std::size_t u = 0;
    std::size_t v = 0;
    std::size_t w = 0;
  };

  /// Throws ConfigError naming the offending sub-expression.
  static Expr parse(const nlohmann::json& j, Limits allowed);
  static Expr constant(double c);

  double eval(std::span<const double> u, std::span<const double> v = {},
              std::span<const double> w = {}) const;

 private:
  enum class Op : std::uint8_t { Const, VarU, VarV, VarW, Add, Sub, Mul, Div, Neg, Exp, Sin, Cos };
  struct Node {
    Op op;
    double value = 0.0;
    std::size_t index = 0;
    std::vector<std::size_t> args;
  };

  std::size_t build(const nlohmann::json& j, Limits allowed, const std::string& path);
  double eval_node(std::size_t id, std::span<const double> u, std::span<const double> v,
                   std::span<const double> w) const;

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

}  // namespace gcl
