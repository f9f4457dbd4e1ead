#include "gcl/expr.hpp"

#include <cmath>

namespace gcl {

Expr Expr::parse(const nlohmann::json& j, Limits allowed) {
  Expr e;
  e.root_ = e.build(j, allowed, "expr");
  return e;
}

Expr Expr::constant(double c) {
  Expr e;
  e.nodes_.push_back(Node{Op::Const, c, 0, {}});
  e.root_ = 0;
  return e;
}

std::size_t Expr::build(const nlohmann::json& j, Limits allowed, const std::string& path) {
  auto fail = [&](const std::string& why) -> std::size_t {
    throw ConfigError({path + ": " + why});
  };
  Node node{Op::Const, 0.0, 0, {}};
  if (j.is_number()) {
    node.value = j.get<double>();
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "pi") {
      node.value = kPi;
    } else if (s.size() >= 2 && (s[0] == 'u' || s[0] == 'v' || s[0] == 'w')) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(s.substr(1), &used);
        if (used != s.size() - 1) return fail("bad variable name '" + s + "'");
      } catch (const std::exception&) {
        return fail("bad variable name '" + s + "'");
      }
      const std::size_t limit = s[0] == 'u' ? allowed.u : s[0] == 'v' ? allowed.v : allowed.w;
      if (idx < 1 || idx > limit) return fail("variable '" + s + "' is not available here");
      node.op = s[0] == 'u' ? Op::VarU : s[0] == 'v' ? Op::VarV : Op::VarW;
      node.index = idx - 1;
    } else {
      return fail("unknown symbol '" + s + "'");
    }
  } else if (j.is_array() && !j.empty() && j[0].is_string()) {
    const auto op = j[0].get<std::string>();
    const std::size_t argc = j.size() - 1;
    if (op == "+") node.op = Op::Add;
    else if (op == "-") node.op = argc == 1 ? Op::Neg : Op::Sub;
    else if (op == "*") node.op = Op::Mul;
    else if (op == "/") node.op = Op::Div;
    else if (op == "exp") node.op = Op::Exp;
    else if (op == "sin") node.op = Op::Sin;
    else if (op == "cos") node.op = Op::Cos;
    else return fail("unknown operator '" + op + "'");
    const bool unary = node.op == Op::Neg || node.op == Op::Exp || node.op == Op::Sin ||
                       node.op == Op::Cos;
    const bool binary = node.op == Op::Sub || node.op == Op::Div;
    if (unary && argc != 1) return fail("'" + op + "' takes one argument");
    if (binary && argc != 2) return fail("'" + op + "' takes two arguments");
    if (argc == 0) return fail("'" + op + "' needs arguments");
    for (std::size_t a = 1; a < j.size(); ++a) {
      node.args.push_back(build(j[a], allowed, path + "[" + std::to_string(a) + "]"));
    }
  } else {
    return fail("expected a number, variable name or [op, args...]");
  }
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

double Expr::eval(std::span<const double> u, std::span<const double> v,
                  std::span<const double> w) const {
  return eval_node(root_, u, v, w);
}

double Expr::eval_node(std::size_t id, std::span<const double> u, std::span<const double> v,
                       std::span<const double> w) const {
  const Node& n = nodes_[id];
  auto arg = [&](std::size_t k) { return eval_node(n.args[k], u, v, w); };
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::VarU: return u[n.index];
    case Op::VarV: return v[n.index];
    case Op::VarW: return w[n.index];
    case Op::Add: {
      double s = 0.0;
      for (std::size_t k = 0; k < n.args.size(); ++k) s += arg(k);
      return s;
    }
    case Op::Mul: {
      double s = 1.0;
      for (std::size_t k = 0; k < n.args.size(); ++k) s *= arg(k);
      return s;
    }
    case Op::Sub: return arg(0) - arg(1);
    case Op::Div: return arg(0) / arg(1);
    case Op::Neg: return -arg(0);
    case Op::Exp: return std::exp(arg(0));
    case Op::Sin: return std::sin(arg(0));
    case Op::Cos: return std::cos(arg(0));
  }
  return 0.0;
}

}  // namespace gcl
