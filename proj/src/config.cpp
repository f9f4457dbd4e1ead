#include "gcl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gcl/expr.hpp"
#include "gcl/tangent.hpp"

namespace gcl {

using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Collects violations while walking the document.
struct Checker {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  void fail(const std::string& msg) { errors.push_back(msg); }

  void unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) fail(where + ": unknown key '" + it.key() + "'");
    }
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_number()) {
      fail(where + "." + key + " must be a number");
      return std::nullopt;
    }
    return obj[key].get<double>();
  }

  std::optional<long long> integer(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_number_integer()) {
      fail(where + "." + key + " must be an integer");
      return std::nullopt;
    }
    return obj[key].get<long long>();
  }

  std::optional<Vec> numbers(const json& j, const std::string& where) {
    if (!j.is_array()) {
      fail(where + " must be an array of numbers");
      return std::nullopt;
    }
    Vec out;
    for (const auto& x : j) {
      if (!x.is_number()) {
        fail(where + " must be an array of numbers");
        return std::nullopt;
      }
      out.push_back(x.get<double>());
    }
    return out;
  }
};

std::optional<Box> parse_box(Checker& ck, const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_object()) {
    ck.fail(where + " must be an object with 'radius' or 'lo'/'hi'");
    return std::nullopt;
  }
  if (j.contains("radius")) {
    const auto r = ck.number(j, "radius", where);
    if (!r) return std::nullopt;
    if (!(*r > 0.0)) {
      ck.fail(where + ".radius must be positive");
      return std::nullopt;
    }
    return Box::cube(dim, *r);
  }
  if (!j.contains("lo") || !j.contains("hi")) {
    ck.fail(where + " needs 'radius' or both 'lo' and 'hi'");
    return std::nullopt;
  }
  const auto lo = ck.numbers(j["lo"], where + ".lo");
  const auto hi = ck.numbers(j["hi"], where + ".hi");
  if (!lo || !hi) return std::nullopt;
  if (lo->size() != dim || hi->size() != dim) {
    ck.fail(where + ": lo/hi must have " + std::to_string(dim) + " entries");
    return std::nullopt;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!((*lo)[i] < 0.0 && (*hi)[i] > 0.0)) {
      ck.fail(where + ": box must contain 0 in its interior");
      return std::nullopt;
    }
  }
  return Box{*lo, *hi};
}

std::optional<Expr> parse_expr(Checker& ck, const json& j, Expr::Limits lim, const std::string& where) {
  try {
    return Expr::parse(j, lim);
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) ck.fail(where + ": " + v);
  }
  return std::nullopt;
}

std::optional<GroupoidChart> parse_user_chart(Checker& ck, const json& j) {
  const std::string where = "chart.expr";
  if (!j.is_object()) {
    ck.fail(where + " must be an object");
    return std::nullopt;
  }
  ck.unknown_keys(j, {"name", "n", "m", "sigma", "product", "inverse", "mu_e", "U_box", "V_box"}, where);
  const auto n = ck.integer(j, "n", where);
  const auto m = ck.integer(j, "m", where);
  if (!n || !m) {
    if (!j.contains("n") || !j.contains("m")) ck.fail(where + " needs integer 'n' and 'm'");
    return std::nullopt;
  }
  if (*n < 0 || *m < 1) {
    ck.fail(where + ": need n >= 0 and m >= 1");
    return std::nullopt;
  }
  const auto nn = static_cast<std::size_t>(*n), mm = static_cast<std::size_t>(*m);
  bool ok = true;
  auto expr_list = [&](const char* key, std::size_t count, Expr::Limits lim, bool required) {
    std::vector<Expr> out;
    if (!j.contains(key)) {
      if (required) {
        ck.fail(where + "." + key + " is required");
        ok = false;
      }
      return out;
    }
    const auto& arr = j[key];
    if (!arr.is_array() || arr.size() != count) {
      ck.fail(where + "." + key + " must be an array of " + std::to_string(count) + " expressions");
      ok = false;
      return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
      auto e = parse_expr(ck, arr[i], lim, where + "." + key + "[" + std::to_string(i) + "]");
      if (e) out.push_back(std::move(*e));
      else ok = false;
    }
    return out;
  };
  auto sigma = expr_list("sigma", nn, {nn, mm, 0}, nn > 0);
  auto product = expr_list("product", mm, {nn, mm, mm}, true);
  auto inverse = expr_list("inverse", mm, {nn, mm, 0}, false);
  std::optional<Expr> mu;
  if (j.contains("mu_e")) {
    mu = parse_expr(ck, j["mu_e"], {nn, 0, 0}, where + ".mu_e");
    if (!mu) ok = false;
  }
  std::optional<Box> ub = nn == 0 ? std::optional<Box>(Box{}) : std::nullopt;
  if (nn > 0) {
    if (j.contains("U_box")) ub = parse_box(ck, j["U_box"], nn, where + ".U_box");
    else ck.fail(where + ".U_box is required");
  }
  std::optional<Box> vb;
  if (j.contains("V_box")) vb = parse_box(ck, j["V_box"], mm, where + ".V_box");
  else ck.fail(where + ".V_box is required");
  if (!ok || !ub || !vb) return std::nullopt;

  GroupoidChart c;
  c.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "user";
  c.kind = ChartKind::User;
  c.n = nn;
  c.m = mm;
  c.u_box = *ub;
  c.v_box = *vb;
  c.sigma = [sigma](std::span<const double> u, std::span<const double> v, std::span<double> out) {
    for (std::size_t k = 0; k < sigma.size(); ++k) out[k] = sigma[k].eval(u, v);
  };
  c.product = [product](std::span<const double> u, std::span<const double> v,
                        std::span<const double> w, std::span<double> out) {
    for (std::size_t k = 0; k < product.size(); ++k) out[k] = product[k].eval(u, v, w);
  };
  if (!inverse.empty()) {
    c.inverse_closed_form = [inverse](std::span<const double> u, std::span<const double> v,
                                      std::span<double> out) {
      for (std::size_t k = 0; k < inverse.size(); ++k) out[k] = inverse[k].eval(u, v);
    };
  }
  if (mu) {
    c.mu_e = [e = *mu](std::span<const double> u) { return e.eval(u); };
    c.unit_weight = false;
  } else {
    c.mu_e = [](std::span<const double>) { return 1.0; };
  }
  return c;
}

std::optional<GroupoidChart> parse_chart(Checker& ck, const json& doc) {
  if (!doc.contains("chart")) {
    ck.fail("chart is required");
    return std::nullopt;
  }
  const auto& j = doc["chart"];
  if (!j.is_object() || (j.contains("builtin") == j.contains("expr"))) {
    ck.fail("chart must contain exactly one of 'builtin' or 'expr'");
    return std::nullopt;
  }
  if (j.contains("expr")) {
    ck.unknown_keys(j, {"expr"}, "chart");
    return parse_user_chart(ck, j["expr"]);
  }
  if (!j["builtin"].is_string()) {
    ck.fail("chart.builtin must be a string");
    return std::nullopt;
  }
  const auto name = j["builtin"].get<std::string>();
  const std::string where = "chart";
  auto dim = [&](const char* key, long long def) {
    const auto v = ck.integer(j, key, where);
    return v ? *v : def;
  };
  try {
    if (name == "pair") {
      ck.unknown_keys(j, {"builtin", "n", "radius"}, where);
      const auto n = dim("n", 1);
      if (n < 1) throw Error("pair needs n >= 1");
      return catalog::pair(static_cast<std::size_t>(n), ck.number(j, "radius", where).value_or(10.0));
    }
    if (name == "abelian_bundle") {
      ck.unknown_keys(j, {"builtin", "n", "m", "radius"}, where);
      const auto n = dim("n", 1), m = dim("m", 1);
      if (n < 0 || m < 1) throw Error("abelian_bundle needs n >= 0 and m >= 1");
      return catalog::abelian_bundle(static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                                     ck.number(j, "radius", where).value_or(10.0));
    }
    if (name == "heisenberg") {
      ck.unknown_keys(j, {"builtin", "radius"}, where);
      return catalog::heisenberg(ck.number(j, "radius", where).value_or(10.0));
    }
    if (name == "ax_plus_b") {
      ck.unknown_keys(j, {"builtin", "v1_radius", "v2_radius"}, where);
      return catalog::ax_plus_b(ck.number(j, "v1_radius", where).value_or(3.0),
                                ck.number(j, "v2_radius", where).value_or(10.0));
    }
    if (name == "corrupted_pair") {
      ck.unknown_keys(j, {"builtin"}, where);
      return catalog::corrupted_pair();
    }
  } catch (const Error& e) {
    ck.fail("chart: " + std::string(e.what()));
    return std::nullopt;
  }
  ck.fail("chart.builtin: unknown chart '" + name + "'");
  return std::nullopt;
}

std::optional<GridAxis> parse_axis(Checker& ck, const json& j, const std::string& where) {
  if (!j.is_object()) {
    ck.fail(where + " must be an object");
    return std::nullopt;
  }
  if (j.contains("radius")) {
    ck.unknown_keys(j, {"radius", "intervals"}, where);
    const auto r = ck.number(j, "radius", where);
    const auto k = ck.integer(j, "intervals", where);
    if (!r || !k) {
      if (!j.contains("intervals")) ck.fail(where + " needs 'intervals' with 'radius'");
      return std::nullopt;
    }
    if (!(*r > 0.0) || *k < 1) {
      ck.fail(where + ": radius and intervals must be positive");
      return std::nullopt;
    }
    return GridAxis::symmetric(*r, static_cast<std::size_t>(*k));
  }
  ck.unknown_keys(j, {"origin", "spacing", "count"}, where);
  const auto o = ck.number(j, "origin", where);
  const auto s = ck.number(j, "spacing", where);
  const auto c = ck.integer(j, "count", where);
  if (!o || !s || !c) {
    ck.fail(where + " needs 'radius'/'intervals' or 'origin'/'spacing'/'count'");
    return std::nullopt;
  }
  if (*c < 1) {
    ck.fail(where + ".count must be positive");
    return std::nullopt;
  }
  return GridAxis{*o, *s, static_cast<std::size_t>(*c)};
}

std::optional<std::vector<GridAxis>> parse_axes(Checker& ck, const json& j, std::size_t dim,
                                                const std::string& where) {
  std::vector<GridAxis> out;
  if (j.is_object()) {
    auto a = parse_axis(ck, j, where);
    if (!a) return std::nullopt;
    out.assign(dim, *a);
    return out;
  }
  if (!j.is_array() || j.size() != dim) {
    ck.fail(where + " must be an axis object or an array of " + std::to_string(dim) + " axes");
    return std::nullopt;
  }
  for (std::size_t d = 0; d < dim; ++d) {
    auto a = parse_axis(ck, j[d], where + "[" + std::to_string(d) + "]");
    if (!a) return std::nullopt;
    out.push_back(*a);
  }
  return out;
}

std::optional<SymbolSpec> parse_symbol(Checker& ck, const json& j, std::size_t n, std::size_t m,
                                       const std::string& name) {
  const std::string where = "symbols." + name;
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    ck.fail(where + " must be an object with a 'terms' array");
    return std::nullopt;
  }
  ck.unknown_keys(j, {"terms"}, where);
  SymbolSpec spec(n, m);
  std::size_t idx = 0;
  for (const auto& t : j["terms"]) {
    const std::string tw = where + ".terms[" + std::to_string(idx++) + "]";
    if (!t.is_object()) {
      ck.fail(tw + " must be an object");
      return std::nullopt;
    }
    ck.unknown_keys(t, {"coef", "x_pow", "xi_pow", "alpha", "x_center", "beta", "xi_center"}, tw);
    SymbolTerm term;
    if (t.contains("coef")) {
      const auto& c = t["coef"];
      if (c.is_number()) term.coef = c.get<double>();
      else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())
        term.coef = cplx(c[0].get<double>(), c[1].get<double>());
      else {
        ck.fail(tw + ".coef must be a number or [re, im]");
        return std::nullopt;
      }
    }
    auto ints = [&](const char* key, std::vector<int>& out) {
      if (!t.contains(key)) return true;
      if (!t[key].is_array()) return false;
      for (const auto& x : t[key]) {
        if (!x.is_number_integer()) return false;
        out.push_back(x.get<int>());
      }
      return true;
    };
    auto reals = [&](const char* key, Vec& out) {
      if (!t.contains(key)) return true;
      auto v = ck.numbers(t[key], tw + "." + key);
      if (!v) return false;
      out = *v;
      return true;
    };
    if (!ints("x_pow", term.x_pow) || !ints("xi_pow", term.xi_pow)) {
      ck.fail(tw + ": powers must be arrays of integers");
      return std::nullopt;
    }
    if (!reals("alpha", term.alpha) || !reals("x_center", term.x_center) ||
        !reals("beta", term.beta) || !reals("xi_center", term.xi_center)) {
      return std::nullopt;
    }
    try {
      spec.add_term(std::move(term));
    } catch (const Error& e) {
      ck.fail(tw + ": " + e.what());
      return std::nullopt;
    }
  }
  return spec;
}

void parse_tolerances(Checker& ck, const json& j, Tolerances& tol) {
  if (!j.is_object()) {
    ck.fail("tolerances must be an object");
    return;
  }
  const std::vector<std::pair<const char*, double*>> fields = {
      {"axiom", &tol.axiom},
      {"unit", &tol.unit},
      {"haar_invariance", &tol.haar_invariance},
      {"extraction", &tol.extraction},
      {"jacobi_constants", &tol.jacobi_constants},
      {"antisymmetry", &tol.antisymmetry},
      {"leibniz", &tol.leibniz},
      {"jacobi", &tol.jacobi},
      {"intertwining", &tol.intertwining},
      {"fourier", &tol.fourier},
      {"ratio_lo", &tol.ratio_lo},
      {"ratio_hi", &tol.ratio_hi},
      {"degenerate", &tol.degenerate},
      {"norm_delta", &tol.norm_delta},
      {"cstar", &tol.cstar}};
  std::set<std::string> names;
  for (const auto& [k, p] : fields) {
    names.insert(k);
    if (auto v = ck.number(j, k, "tolerances")) {
      if (!(*v >= 0.0)) ck.fail(std::string("tolerances.") + k + " must be nonnegative");
      *p = *v;
    }
  }
  ck.unknown_keys(j, names, "tolerances");
  if (!(tol.ratio_lo <= tol.ratio_hi)) ck.fail("tolerances: ratio_lo exceeds ratio_hi");
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::hash() const {
  json canon = raw;
  canon.erase("workers");
  canon.erase("output");
  canon.erase("plot");
  return fnv1a_hex(canon.dump());
}

RunConfig parse_config(const json& doc) {
  Checker ck;
  if (!doc.is_object()) throw ConfigError({"config must be a JSON object"});
  ck.unknown_keys(doc, {"chart", "mu_e", "grid", "symbols", "t", "fd_step", "quadrature",
                        "tolerances", "output", "strict", "plot", "workers", "seed", "validate"},
                  "config");
  RunConfig cfg;
  cfg.raw = doc;

  if (auto v = ck.number(doc, "fd_step", "config")) {
    if (!(*v > 0.0)) ck.fail("fd_step must be positive");
    cfg.fd_step = *v;
  }
  if (doc.contains("quadrature")) {
    if (!doc["quadrature"].is_string() || doc["quadrature"].get<std::string>() != "trapezoidal") {
      ck.fail("quadrature must be \"trapezoidal\"");
    }
  }
  if (doc.contains("output")) {
    if (doc["output"].is_string()) cfg.output = doc["output"].get<std::string>();
    else ck.fail("output must be a string");
  }
  for (const char* key : {"strict", "plot"}) {
    if (!doc.contains(key)) continue;
    if (!doc[key].is_boolean()) ck.fail(std::string(key) + " must be true or false");
    else (std::string(key) == "strict" ? cfg.strict : cfg.plot) = doc[key].get<bool>();
  }
  if (auto v = ck.integer(doc, "workers", "config")) {
    if (*v < 1) ck.fail("workers must be at least 1");
    else cfg.workers = static_cast<int>(*v);
  }
  if (auto v = ck.integer(doc, "seed", "config")) {
    if (*v < 0) ck.fail("seed must be nonnegative");
    else cfg.seed = static_cast<std::uint64_t>(*v);
  }
  if (doc.contains("validate")) {
    const auto& vj = doc["validate"];
    if (!vj.is_object()) {
      ck.fail("validate must be an object");
    } else {
      ck.unknown_keys(vj, {"samples"}, "validate");
      if (auto v = ck.integer(vj, "samples", "validate")) {
        if (*v < 1) ck.fail("validate.samples must be at least 1");
        else cfg.samples = static_cast<std::size_t>(*v);
      }
    }
  }
  if (doc.contains("tolerances")) parse_tolerances(ck, doc["tolerances"], cfg.tol);

  auto chart = parse_chart(ck, doc);
  if (chart && doc.contains("mu_e")) {
    if (auto e = parse_expr(ck, doc["mu_e"], {chart->n, 0, 0}, "mu_e")) {
      const bool unit = doc["mu_e"].is_number() && doc["mu_e"].get<double>() == 1.0;
      set_haar_weight(*chart, [e = *e](std::span<const double> u) { return e.eval(u); }, unit);
    }
  }

  std::optional<GridSpec> grid;
  if (!chart) {
    // Dimensions unknown; grid and symbols cannot be checked further.
  } else if (!doc.contains("grid") || !doc["grid"].is_object()) {
    ck.fail("grid is required (object with 'base' and 'fiber')");
  } else {
    const auto& gj = doc["grid"];
    ck.unknown_keys(gj, {"base", "fiber"}, "grid");
    std::optional<std::vector<GridAxis>> base = std::vector<GridAxis>{};
    if (chart->n > 0) {
      if (gj.contains("base")) base = parse_axes(ck, gj["base"], chart->n, "grid.base");
      else {
        ck.fail("grid.base is required when n > 0");
        base.reset();
      }
    }
    std::optional<std::vector<GridAxis>> fiber;
    if (gj.contains("fiber")) fiber = parse_axes(ck, gj["fiber"], chart->m, "grid.fiber");
    else ck.fail("grid.fiber is required");
    if (base && fiber) {
      GridSpec gs(*base, *fiber);
      const auto bad = gs.violations();
      for (const auto& b : bad) ck.fail("grid: " + b);
      if (bad.empty()) grid = gs;
    }
  }

  if (grid) {
    for (std::size_t d = 0; d < chart->n; ++d) {
      const auto& ax = grid->base_axes()[d];
      if (!(ax.origin - cfg.fd_step >= chart->u_box.lo[d] &&
            ax.last() + cfg.fd_step <= chart->u_box.hi[d])) {
        ck.fail("grid.base axis " + std::to_string(d + 1) +
                " (with the fd_step margin) leaves the chart's U_box");
      }
    }
  }

  if (doc.contains("symbols")) {
    const auto& sj = doc["symbols"];
    if (!sj.is_object()) {
      ck.fail("symbols must be an object");
    } else {
      ck.unknown_keys(sj, {"f", "g", "h"}, "symbols");
      if (chart) {
        for (const char* name : {"f", "g", "h"}) {
          if (!sj.contains(name)) continue;
          auto spec = parse_symbol(ck, sj[name], chart->n, chart->m, name);
          if (!spec) continue;
          if (grid) {
            const DecayReport rep = spec->decay(*grid);
            if (!rep.ok()) {
              const std::string msg = std::string("symbol ") + name + " does not decay on the grid: boundary magnitude " +
                                      num(rep.worst_ratio) + " of its peak (term " +
                                      std::to_string(rep.worst_term) + ", limit 1e-12)";
              if (cfg.strict) ck.fail(msg);
              else ck.warnings.push_back(msg);
            }
          }
          (std::string(name) == "f" ? cfg.f : std::string(name) == "g" ? cfg.g : cfg.h) = std::move(spec);
        }
      }
    }
  }

  if (doc.contains("t")) {
    if (auto ts = ck.numbers(doc["t"], "t")) {
      cfg.ts = *ts;
      bool zero = false, order = false;
      for (std::size_t k = 0; k < ts->size(); ++k) {
        const double t = (*ts)[k];
        if (t == 0.0) {
          zero = true;
          continue;
        }
        if (chart && grid && !t_admissible(*chart, *grid, t)) {
          ck.fail("t = " + num(t) + " puts t * (fiber radius) outside V_box");
        }
        if (k > 0 && !(std::abs(t) < std::abs((*ts)[k - 1]))) order = true;
      }
      if (zero) ck.fail("t must be nonzero in sweep");
      if (order) ck.fail("t values must strictly decrease toward 0");
    }
  }

  if (!ck.errors.empty()) throw ConfigError(ck.errors);
  cfg.chart = std::move(*chart);
  cfg.grid = std::move(*grid);
  cfg.warnings = std::move(ck.warnings);
  return cfg;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column (1-based).
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw ConfigError({source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                       ": JSON parse error: " + what});
  }
}

RunConfig load_config(const std::string& path, const json& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  json doc = parse_json_text(buf.str(), path);
  if (doc.is_object() && overrides.is_object()) doc.merge_patch(overrides);
  return parse_config(doc);
}

}  // namespace gcl
