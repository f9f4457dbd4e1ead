#include "gcl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gcl/algebroid.hpp"
#include "gcl/cstar.hpp"
#include "gcl/poisson.hpp"
#include "gcl/tangent.hpp"

namespace gcl {

using ojson = nlohmann::ordered_json;

std::string format17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string g6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Criterion at_most(const std::string& name, double value, double limit) {
  return {name, value, "<= " + g6(limit), value <= limit};
}

Criterion in_range(const std::string& name, double value, double lo, double hi) {
  return {name, value, "in [" + g6(lo) + ", " + g6(hi) + "]", value >= lo && value <= hi};
}

Criterion holds(const std::string& name, bool ok, const std::string& rule) {
  return {name, ok ? 1.0 : 0.0, rule, ok};
}

// JSON null for NaN, plain number otherwise.
ojson jnum(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

std::vector<std::string> axis_names(const char* prefix, std::size_t dim) {
  std::vector<std::string> out;
  for (std::size_t d = 0; d < dim; ++d) out.push_back(prefix + std::to_string(d + 1));
  return out;
}

const SymbolSpec& need(const std::optional<SymbolSpec>& s, const char* name, const char* command) {
  if (!s) throw ConfigError({std::string(command) + " needs symbols." + name});
  return *s;
}

// CSV of a sampled symbol: base coords, fiber coords, re, im.
CsvTable sample_table(const SampledSymbol& s, const char* fiber_prefix) {
  CsvTable t;
  t.header = axis_names("x", s.grid.base_dim());
  for (auto& h : axis_names(fiber_prefix, s.grid.fiber_dim())) t.header.push_back(h);
  t.header.push_back("re");
  t.header.push_back("im");
  const std::size_t n = s.grid.base_dim(), m = s.grid.fiber_dim();
  Vec x(n), xi(m);
  for (std::size_t b = 0; b < s.grid.base_size(); ++b) {
    s.grid.base_point(b, x);
    for (std::size_t k = 0; k < s.grid.fiber_size(); ++k) {
      s.grid.fiber_point(k, xi);
      std::vector<std::string> row;
      for (double v : x) row.push_back(format17(v));
      for (double v : xi) row.push_back(format17(v));
      row.push_back(format17(s.at(b, k).real()));
      row.push_back(format17(s.at(b, k).imag()));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

bool unit_weight_data(const AlgebroidData& d) {
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (d.weights[p] != 1.0) return false;
    for (std::size_t j = 0; j < d.n; ++j) {
      if (d.log_weight_grad(p, j) != 0.0) return false;
    }
  }
  return true;
}

ojson sign_json(int s) { return s == 0 ? ojson(nullptr) : ojson(s); }

void run_validate(const RunConfig& cfg, ReportBundle& out) {
  const AxiomReport rep = validate_axioms(cfg.chart, cfg.samples, cfg.seed);
  const double haar = haar_invariance_residual(cfg.chart, cfg.samples, cfg.seed);
  const auto& tol = cfg.tol;
  out.criteria = {at_most("associativity", rep.associativity, tol.axiom),
                  at_most("source_compatibility", rep.source_compatibility, tol.axiom),
                  at_most("unit", rep.unit, tol.unit),
                  at_most("inverse", rep.inverse, tol.axiom),
                  at_most("haar_invariance", haar, tol.haar_invariance)};
  ojson failed = ojson::array();
  for (const auto& c : out.criteria) {
    if (!c.pass) failed.push_back(c.name);
  }
  out.summary["results"] = {{"samples", rep.samples},
                            {"attempts", rep.attempts},
                            {"failed_axioms", failed}};
  out.table.header = {"check", "residual", "rule", "pass"};
  for (const auto& c : out.criteria) {
    out.table.rows.push_back({c.name, format17(c.value), c.rule, c.pass ? "1" : "0"});
  }
}

void run_algebroid(const RunConfig& cfg, ReportBundle& out) {
  const auto& chart = cfg.chart;
  const AlgebroidData d = extract_algebroid(chart, cfg.grid, cfg.fd_step);
  const std::size_t n = d.n, m = d.m;
  out.table.header = axis_names("x", n);
  for (const char* h : {"quantity", "i", "j", "k", "value"}) out.table.header.emplace_back(h);
  double antisym = 0.0, jac = 0.0;
  for (std::size_t p = 0; p < d.size(); ++p) {
    std::vector<std::string> xs;
    for (double v : d.base_points[p]) xs.push_back(format17(v));
    auto emit = [&](const char* q, std::string i, std::string j, std::string k, double v) {
      auto row = xs;
      row.insert(row.end(), {q, std::move(i), std::move(j), std::move(k), format17(v)});
      out.table.rows.push_back(std::move(row));
    };
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) emit("anchor", std::to_string(i + 1), std::to_string(j + 1), "", d.anchor(p, i, j));
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
          emit("structure", std::to_string(i + 1), std::to_string(j + 1), std::to_string(k + 1),
               d.structure(p, i, j, k));
          antisym = std::max(antisym, std::abs(d.structure(p, i, j, k) + d.structure(p, j, i, k)));
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) emit("log_weight_grad", "", std::to_string(j + 1), "", d.log_weight_grad(p, j));
    emit("mu_e", "", "", "", d.weights[p]);
    jac = std::max(jac, jacobi_residual(d.structures[p], m));
  }
  out.criteria.push_back(at_most("structure_antisymmetry", antisym, 0.0));
  if (n == 0) out.criteria.push_back(at_most("jacobi_constants", jac, cfg.tol.jacobi_constants));
  ojson res = {{"points", d.size()}, {"fd_step", d.fd_step}, {"jacobi_residual", jac}};
  if (chart.analytic) {
    const AlgebroidData a = analytic_algebroid(chart, cfg.grid);
    double ea = 0.0, ec = 0.0;
    for (std::size_t p = 0; p < d.size(); ++p) {
      ea = std::max(ea, max_abs_diff(d.anchors[p], a.anchors[p]));
      ec = std::max(ec, max_abs_diff(d.structures[p], a.structures[p]));
    }
    out.criteria.push_back(at_most("anchor_vs_analytic", ea, cfg.tol.extraction));
    out.criteria.push_back(at_most("structure_vs_analytic", ec, cfg.tol.extraction));
  }
  out.summary["results"] = res;
}

void run_bracket(const RunConfig& cfg, ReportBundle& out) {
  const SymbolSpec& f = need(cfg.f, "f", "bracket");
  const SymbolSpec& g = need(cfg.g, "g", "bracket");
  const auto& grid = cfg.grid;
  const AlgebroidData d = extract_algebroid(cfg.chart, grid, cfg.fd_step);
  const SampledSymbol fg = poisson_bracket(f, g, d, grid);
  const SampledSymbol gf = poisson_bracket(g, f, d, grid);
  const double antisym = (fg + gf).sup() / residual_scale(fg, gf);
  out.criteria.push_back(at_most("antisymmetry", antisym, cfg.tol.antisymmetry));
  ojson res = {{"bracket_sup", fg.sup()}, {"antisymmetry", antisym}};

  if (cfg.h) {
    const SymbolSpec& h = *cfg.h;
    const SampledSymbol gs = eval_symbol(g, grid), hs = eval_symbol(h, grid);
    const Vec& mu = d.weights;
    const SampledSymbol lhs = poisson_bracket(f, Operand(fiber_convolve(gs, hs, mu)), d, grid);
    const SampledSymbol rhs = fiber_convolve(fg, hs, mu) +
                              fiber_convolve(gs, poisson_bracket(f, h, d, grid), mu);
    const double leib = sup_diff(lhs, rhs) / residual_scale(lhs, rhs);
    const SampledSymbol t1 = poisson_bracket(f, Operand(poisson_bracket(g, h, d, grid)), d, grid);
    const SampledSymbol t2 = poisson_bracket(g, Operand(poisson_bracket(h, f, d, grid)), d, grid);
    const SampledSymbol t3 = poisson_bracket(h, Operand(fg), d, grid);
    const double scale = std::max({t1.sup(), t2.sup(), t3.sup(), 1e-30});
    const double jac = (t1 + t2 + t3).sup() / scale;
    out.criteria.push_back(at_most("leibniz", leib, cfg.tol.leibniz));
    out.criteria.push_back(at_most("jacobi", jac, cfg.tol.jacobi));
    res["leibniz"] = leib;
    res["jacobi"] = jac;
  }

  if (unit_weight_data(d)) {
    std::vector<IntertwiningResult> runs;
    runs.push_back(intertwining_residual(f, g, d, grid));
    if (cfg.h) {
      runs.push_back(intertwining_residual(g, *cfg.h, d, grid));
      runs.push_back(intertwining_residual(f, *cfg.h, d, grid));
    }
    double worst = 0.0;
    ojson per = ojson::array();
    for (const auto& r : runs) {
      worst = std::max(worst, r.residual);
      per.push_back({{"residual", r.residual}, {"s1", sign_json(r.s1)}, {"s2", sign_json(r.s2)},
                     {"band_limited", r.band_limited}});
    }
    out.criteria.push_back(at_most("intertwining", worst, cfg.tol.intertwining));
    bool consistent = true;
    DualSigns s{0, 0};
    try {
      s = consistent_signs(runs);
    } catch (const SignConsistencyError&) {
      consistent = false;
    }
    out.criteria.push_back(holds("sign_consistency", consistent, "one (s1, s2) for every pair"));
    res["intertwining"] = per;
    res["dual_signs"] = {{"s1", sign_json(s.anchor)}, {"s2", sign_json(s.structure)}};
  } else {
    res["intertwining"] = "skipped: mu_e is not identically 1";
  }
  out.summary["results"] = res;
  out.table = sample_table(fg, "xi");
}

void run_fourier(const RunConfig& cfg, ReportBundle& out) {
  const SymbolSpec& f = need(cfg.f, "f", "fourier-check");
  const auto& grid = cfg.grid;
  Vec mu(grid.base_size());
  for (std::size_t b = 0; b < mu.size(); ++b) mu[b] = cfg.chart.mu_e(grid.base_point(b));
  const SampledSymbol fs = eval_symbol(f, grid);
  std::optional<SampledSymbol> gs;
  std::vector<const SampledSymbol*> all{&fs};
  if (cfg.g) {
    gs = eval_symbol(*cfg.g, grid);
    all.push_back(&*gs);
  }
  const DualGridChoice dual = choose_dual_grid(all, mu);
  const SampledSymbol F = fourier(fs, mu, dual.grid);
  const SampledSymbol back = inverse_fourier(F, mu, grid);
  const double round = sup_diff(back, fs) / residual_scale(back, fs);
  out.criteria.push_back(at_most("round_trip", round, cfg.tol.fourier));
  ojson res = {{"round_trip", round},
               {"imaginary_part", F.sup() > 0.0 ? F.sup_imag() / F.sup() : 0.0},
               {"band_limited", dual.band_limited},
               {"dual_radius", dual.grid.fiber_axes().empty() ? 0.0 : dual.grid.fiber_axes()[0].radius()}};
  if (gs) {
    const SampledSymbol lhs = fourier(fiber_convolve(fs, *gs, mu), mu, dual.grid);
    SampledSymbol rhs = fourier(*gs, mu, dual.grid);
    for (std::size_t k = 0; k < rhs.values.size(); ++k) rhs.values[k] *= F.values[k];
    const double conv = sup_diff(lhs, rhs) / residual_scale(lhs, rhs);
    out.criteria.push_back(at_most("convolution_theorem", conv, cfg.tol.fourier));
    res["convolution_theorem"] = conv;
  }
  out.summary["results"] = res;
  out.table = sample_table(F, "zeta");
}

void run_deform(const RunConfig& cfg, ReportBundle& out) {
  DeformationField field{cfg.chart, cfg.grid, need(cfg.f, "f", "deform"), need(cfg.g, "g", "deform"),
                         cfg.ts};
  const auto bad = field.violations();
  if (!bad.empty()) throw ConfigError(bad);
  const AlgebroidData d = extract_algebroid(cfg.chart, cfg.grid, cfg.fd_step);
  const LimitTable table = classical_limit_error_table(field, d);
  double worst = 0.0;
  for (const auto& r : table.rows) worst = std::max(worst, r.error);
  const auto& tol = cfg.tol;
  ojson rows = ojson::array();
  out.table.header = {"t", "error", "ratio", "kappa_re", "kappa_im"};
  out.timings.header = {"t", "seconds"};
  Vec xs, ys;
  for (const auto& r : table.rows) {
    rows.push_back({{"t", r.t}, {"error", r.error}, {"ratio", jnum(r.ratio)},
                    {"kappa", {r.kappa.real(), r.kappa.imag()}}});
    out.table.rows.push_back({format17(r.t), format17(r.error), format17(r.ratio),
                              format17(r.kappa.real()), format17(r.kappa.imag())});
    out.timings.rows.push_back({format17(r.t), format17(r.seconds)});
    xs.push_back(std::abs(r.t));
    ys.push_back(r.error);
  }
  if (worst <= tol.degenerate) {
    out.criteria.push_back(at_most("degenerate_commutator", worst, tol.degenerate));
  } else {
    out.criteria.push_back(holds("strictly_decreasing", table.strictly_decreasing(), "E(t) strictly decreasing"));
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
      out.criteria.push_back(in_range("ratio_" + std::to_string(k), table.rows[k].ratio, tol.ratio_lo, tol.ratio_hi));
    }
  }
  const cplx kappa = table.rows.empty() ? cplx{} : table.rows.back().kappa;
  out.summary["results"] = {{"rows", rows},
                            {"bracket_sup", table.bracket_sup},
                            {"rate_constant", table.rate_constant()},
                            {"limiting_constant", {kappa.real(), kappa.imag()}},
                            {"target", "(1/(2 pi i)) {f0, g0}; D(t) = (f*g - g*f)/t"}};
  if (cfg.plot) out.svg = svg_loglog("E(t)", "t", "E", xs, ys);
}

void run_normfield(const RunConfig& cfg, ReportBundle& out) {
  const SymbolSpec& f = need(cfg.f, "f", "normfield");
  if (cfg.ts.empty()) throw ConfigError({"normfield needs a t sweep"});
  const NormCurve curve = norm_curve(f, cfg.chart, cfg.ts, cfg.grid);
  const double z = curve.zero_norm;
  const auto& tol = cfg.tol;
  out.table.header = {"t", "norm", "residual", "size", "delta"};
  out.table.rows.push_back({format17(0.0), format17(z), format17(0.0), std::to_string(cfg.grid.size()), format17(0.0)});
  ojson rows = ojson::array();
  double max_delta = 0.0;
  Vec xs, ys;
  for (const auto& r : curve.rows) {
    out.table.rows.push_back({format17(r.t), format17(r.norm), format17(r.residual),
                              std::to_string(r.size), format17(r.delta)});
    rows.push_back({{"t", r.t}, {"norm", r.norm}, {"residual", r.residual}, {"delta", r.delta}});
    max_delta = std::max(max_delta, r.delta);
    xs.push_back(r.t);
    ys.push_back(r.delta);
  }
  const bool flat = max_delta <= 1e-3 * std::max(z, 1e-300) || (z == 0.0 && max_delta == 0.0);
  out.criteria.push_back(holds("delta_decreasing", curve.delta_decreasing() || flat,
                               "strictly decreasing, or every delta <= 1e-3 norm(0)"));
  const double last = curve.rows.empty() ? 0.0 : curve.rows.back().delta;
  out.criteria.push_back(at_most("delta_at_smallest_t", last, tol.norm_delta * z));
  ojson res = {{"zero_norm", z}, {"rows", rows}, {"reduced_norm_only", true}};
  if (cfg.chart.kind == ChartKind::Pair && !curve.rows.empty()) {
    const double t = curve.rows.back().t;
    const double n1 = pair_kernel_norm(f, t, cfg.grid).norm;
    const double n2 = base_kernel_norm(pair_kernel_self_adjoint_square(f, t, cfg.grid), cfg.grid).norm;
    const double rel = n1 > 0.0 ? std::abs(n2 - n1 * n1) / (n1 * n1) : std::abs(n2);
    out.criteria.push_back(at_most("cstar_identity", rel, tol.cstar));
    res["cstar_identity"] = rel;
  }
  out.summary["results"] = res;
  if (cfg.plot) out.svg = svg_loglog("|norm(t) - norm(0)|", "t", "delta", xs, ys);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error("cannot write " + p.string());
  o << text;
}

}  // namespace

std::string CsvTable::render() const {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

bool ReportBundle::passed() const {
  if (computation_failed) return false;
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

int ReportBundle::exit_code() const { return passed() ? 0 : 1; }

std::vector<std::string> command_names() {
  return {"validate", "algebroid", "bracket", "fourier-check", "deform", "normfield"};
}

ReportBundle run_command(const std::string& name, const RunConfig& cfg) {
  const auto names = command_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError({"unknown command '" + name + "'"});
  }
  ReportBundle out;
  out.command = name;
  out.summary["tool"] = "gcl";
  out.summary["version"] = GCL_VERSION;
  out.summary["command"] = name;
  out.summary["config_hash"] = cfg.hash();
  out.summary["chart"] = cfg.chart.name;
  out.summary["warnings"] = cfg.warnings;
  try {
    if (name == "validate") run_validate(cfg, out);
    else if (name == "algebroid") run_algebroid(cfg, out);
    else if (name == "bracket") run_bracket(cfg, out);
    else if (name == "fourier-check") run_fourier(cfg, out);
    else if (name == "deform") run_deform(cfg, out);
    else run_normfield(cfg, out);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.computation_failed = true;
    out.summary["error"] = e.what();
  }
  ojson crit = ojson::array();
  for (const auto& c : out.criteria) {
    crit.push_back({{"name", c.name}, {"value", jnum(c.value)}, {"rule", c.rule}, {"pass", c.pass}});
  }
  out.summary["criteria"] = crit;
  out.summary["status"] = out.computation_failed ? "error" : out.passed() ? "pass" : "fail";
  out.summary["exit_code"] = out.exit_code();
  return out;
}

void write_bundle(const ReportBundle& bundle, const std::string& dir) {
  std::filesystem::path base(dir);
  std::filesystem::create_directories(base);
  write_file(base / (bundle.command + "_summary.json"), bundle.summary.dump(2) + "\n");
  if (!bundle.table.header.empty()) write_file(base / (bundle.command + ".csv"), bundle.table.render());
  if (!bundle.timings.header.empty()) {
    write_file(base / (bundle.command + "_timings.csv"), bundle.timings.render());
  }
  if (bundle.svg) write_file(base / (bundle.command + ".svg"), *bundle.svg);
}

nlohmann::ordered_json config_error_summary(const std::string& command, const ConfigError& e) {
  ojson s;
  s["tool"] = "gcl";
  s["version"] = GCL_VERSION;
  s["command"] = command;
  s["status"] = "config_error";
  s["violations"] = e.violations();
  s["exit_code"] = 2;
  return s;
}

std::string svg_loglog(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const Vec& x, const Vec& y) {
  const double W = 480, H = 360, L = 70, R = 20, T = 40, B = 50;
  Vec lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log10(x[i]));
      ly.push_back(std::log10(y[i]));
    }
  }
  auto span = [](const Vec& v, double& lo, double& hi) {
    lo = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
    hi = v.empty() ? 1.0 : *std::max_element(v.begin(), v.end());
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;
  };
  double x0, x1, y0, y1;
  span(lx, x0, x1);
  span(ly, y0, y1);
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  std::string s;
  auto add = [&](const std::string& t) { s += t; };
  add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\" viewBox=\"0 0 480 360\">\n");
  add("<rect width=\"480\" height=\"360\" fill=\"white\"/>\n");
  add("<text x=\"240\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n");
  add("<rect x=\"" + g6(L) + "\" y=\"" + g6(T) + "\" width=\"" + g6(W - L - R) + "\" height=\"" +
      g6(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n");
  for (double e = x0; e <= x1 + 1e-9; e += 1.0) {
    add("<text x=\"" + g6(px(e)) + "\" y=\"" + g6(H - B + 16) +
        "\" text-anchor=\"middle\" font-size=\"11\">1e" + g6(e) + "</text>\n");
  }
  for (double e = y0; e <= y1 + 1e-9; e += 1.0) {
    add("<text x=\"" + g6(L - 6) + "\" y=\"" + g6(py(e) + 4) +
        "\" text-anchor=\"end\" font-size=\"11\">1e" + g6(e) + "</text>\n");
  }
  add("<text x=\"240\" y=\"" + g6(H - 12) + "\" text-anchor=\"middle\" font-size=\"12\">" + xlabel + "</text>\n");
  add("<text x=\"16\" y=\"180\" font-size=\"12\" transform=\"rotate(-90 16 180)\" text-anchor=\"middle\">" +
      ylabel + "</text>\n");
  if (!lx.empty()) {
    std::string pts;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      if (i) pts += ' ';
      pts += g6(px(lx[i])) + "," + g6(py(ly[i]));
    }
    add("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + pts + "\"/>\n");
    for (std::size_t i = 0; i < lx.size(); ++i) {
      add("<circle cx=\"" + g6(px(lx[i])) + "\" cy=\"" + g6(py(ly[i])) + "\" r=\"3\" fill=\"steelblue\"/>\n");
    }
  }
  add("</svg>\n");
  return s;
}

}  // namespace gcl
