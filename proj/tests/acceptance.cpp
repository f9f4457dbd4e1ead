// Acceptance run: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gcl/cstar.hpp"
#include "gcl/report.hpp"
#include "gcl/tangent.hpp"

using namespace gcl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

SymbolSpec pair_f() { return SymbolSpec::gaussian(1, 1); }
SymbolSpec pair_g() { return SymbolSpec::gaussian(1, 1).times_x(0).times_xi(0); }
SymbolSpec pair_h() { return SymbolSpec::gaussian(1, 1, 1.0, {1.5}, {0.7}, {0.3}, {-0.2}); }
SymbolSpec heis(double a, double b, double c) {
  return SymbolSpec::gaussian(0, 3, 1.0, {}, {}, {}, {a, b, c});
}

Outcome structure_extraction() {
  Outcome o;
  const Vec h = structure_constants(catalog::heisenberg(), Vec{});
  o.require(std::abs(h[(0 * 3 + 1) * 3 + 2] - 1.0) <= 1e-5, fmt("heisenberg c123 = %.9f", h[5]));
  o.require(std::abs(h[(1 * 3 + 0) * 3 + 2] + 1.0) <= 1e-5, fmt("c213 = %.9f", h[11]));
  const Vec b = structure_constants(catalog::ax_plus_b(), Vec{});
  o.require(std::abs(b[(0 * 2 + 1) * 2 + 1] - 1.0) <= 1e-5, fmt("ax_plus_b c122 = %.9f", b[3]));
  double anchor_err = 0.0, c_err = 0.0;
  for (const Vec& u : {Vec{0.0, 0.0}, Vec{1.0, -2.0}, Vec{-3.5, 2.5}}) {
    const Vec a = anchor(catalog::pair(2), u);
    anchor_err = std::max({anchor_err, std::abs(a[0] - 1.0), std::abs(a[1]), std::abs(a[2]),
                           std::abs(a[3] - 1.0)});
    c_err = std::max(c_err, max_abs(structure_constants(catalog::pair(2), u)));
  }
  o.require(anchor_err <= 1e-8, fmt("pair(2) anchor err %.2e", anchor_err));
  o.require(c_err <= 1e-5, fmt("pair(2) |c| %.2e", c_err));
  return o;
}

std::string table_text(const LimitTable& t) {
  std::string s = "E =";
  for (const auto& r : t.rows) s += fmt(" %.3e", r.error);
  s += ", ratios =";
  for (std::size_t k = 1; k < t.rows.size(); ++k) s += fmt(" %.3f", t.rows[k].ratio);
  return s;
}

Outcome limit_pair() {
  Outcome o;
  const LimitTable t = classical_limit_error_table(DeformationField{
      catalog::pair(1), GridSpec::symmetric(1, 6.0, 64, 1, 6.0, 64), pair_f(), pair_g(), {0.2, 0.1, 0.05}});
  o.require(t.strictly_decreasing() && t.ratios_within(0.35, 0.65), "pair(1) " + table_text(t));
  return o;
}

Outcome limit_heisenberg() {
  Outcome o;
  const LimitTable t = classical_limit_error_table(DeformationField{
      catalog::heisenberg(), GridSpec::symmetric(0, 0.0, 0, 3, 6.0, 16), heis(0.5, 0, 0), heis(0, 0.5, 0),
      {0.2, 0.1, 0.05}});
  o.require(t.strictly_decreasing() && t.ratios_within(0.3, 0.7), "heisenberg " + table_text(t));
  return o;
}

Outcome degenerate() {
  Outcome o;
  const auto chart = catalog::abelian_bundle(1, 1, 20.0);
  const auto grid = GridSpec::symmetric(1, 6.0, 32, 1, 6.0, 32);
  const SymbolSpec f = pair_h(), g = pair_g();
  const SampledSymbol ref = deformed_convolution(chart, grid, f, g, 0.2);
  double drift = 0.0, comm = 0.0;
  for (double t : {0.2, 0.1, 0.05}) {
    drift = std::max(drift, sup_diff(deformed_convolution(chart, grid, f, g, t), ref) / ref.sup());
    comm = std::max(comm, scaled_commutator(chart, grid, f, g, t).sup());
  }
  o.require(drift <= 1e-12, fmt("t-drift %.2e", drift));
  o.require(comm <= 1e-10, fmt("sup commutator %.2e", comm));
  return o;
}

struct LawResiduals {
  double antisym, leibniz, jacobi;
};

LawResiduals laws(std::size_t intervals) {
  const auto grid = GridSpec::symmetric(1, 6.0, intervals, 1, 6.0, intervals);
  const AlgebroidData d = extract_algebroid(catalog::pair(1), grid);
  const SymbolSpec f = pair_f(), g = pair_g(), h = pair_h();
  const SampledSymbol fg = poisson_bracket(f, g, d, grid);
  const SampledSymbol gf = poisson_bracket(g, f, d, grid);
  LawResiduals r{};
  r.antisym = (fg + gf).sup() / residual_scale(fg, gf);
  const SampledSymbol gs = eval_symbol(g, grid), hs = eval_symbol(h, grid);
  const SampledSymbol lhs = poisson_bracket(f, Operand(fiber_convolve(gs, hs, d.weights)), d, grid);
  const SampledSymbol rhs = fiber_convolve(fg, hs, d.weights) +
                            fiber_convolve(gs, poisson_bracket(f, h, d, grid), d.weights);
  r.leibniz = sup_diff(lhs, rhs) / residual_scale(lhs, rhs);
  const SampledSymbol t1 = poisson_bracket(f, Operand(poisson_bracket(g, h, d, grid)), d, grid);
  const SampledSymbol t2 = poisson_bracket(g, Operand(poisson_bracket(h, f, d, grid)), d, grid);
  const SampledSymbol t3 = poisson_bracket(h, Operand(fg), d, grid);
  r.jacobi = (t1 + t2 + t3).sup() / std::max({t1.sup(), t2.sup(), t3.sup(), 1e-30});
  return r;
}

Outcome poisson_laws() {
  Outcome o;
  const LawResiduals a = laws(64), b = laws(128);
  o.require(std::max(a.antisym, b.antisym) <= 1e-12, fmt("antisymmetry %.2e", std::max(a.antisym, b.antisym)));
  o.require(a.leibniz <= 5e-3 && a.leibniz >= 3.0 * b.leibniz,
            fmt("leibniz %.2e -> %.2e", a.leibniz, b.leibniz));
  o.require(a.jacobi <= 1e-2 && a.jacobi >= 3.0 * b.jacobi, fmt("jacobi %.2e -> %.2e", a.jacobi, b.jacobi));
  return o;
}

Outcome intertwining() {
  Outcome o;
  const auto pg = GridSpec::symmetric(1, 6.0, 64, 1, 6.0, 64);
  const AlgebroidData pd = extract_algebroid(catalog::pair(1), pg);
  const auto hg = GridSpec::symmetric(0, 0.0, 0, 3, 6.0, 16);
  const AlgebroidData hd = extract_algebroid(catalog::heisenberg(), hg);

  std::vector<IntertwiningResult> runs;
  runs.push_back(intertwining_residual(pair_f(), pair_g(), pd, pg));
  o.require(runs.back().residual <= 1e-3, fmt("pair(1) %.2e", runs.back().residual));
  runs.push_back(intertwining_residual(heis(0.5, 0, 0), heis(0, 0.5, 0), hd, hg));
  o.require(runs.back().residual <= 1e-2, fmt("heisenberg %.2e", runs.back().residual));
  runs.push_back(intertwining_residual(pair_g(), pair_h(), pd, pg));
  runs.push_back(intertwining_residual(pair_f(), pair_h(), pd, pg));
  runs.push_back(intertwining_residual(heis(0.5, 0, 0), heis(0, 0, 0.5), hd, hg));
  runs.push_back(intertwining_residual(heis(0, 0.5, 0), heis(0.3, 0, 0.3), hd, hg));
  std::string signs = "signs";
  for (const auto& r : runs) signs += fmt(" (%+.0f,", r.s1) + fmt("%+.0f)", r.s2);
  try {
    const DualSigns s = consistent_signs(runs);
    const bool determined = s.anchor != 0 && s.structure != 0;
    o.require(determined, signs + fmt(" -> s1 = %+.0f, s2 = %+.0f", s.anchor, s.structure));
  } catch (const SignConsistencyError& e) {
    o.require(false, signs + " inconsistent");
  }
  return o;
}

Outcome norm_field() {
  Outcome o;
  const auto grid = GridSpec::symmetric(1, 6.0, 256, 1, 6.0, 256);
  const SymbolSpec f = pair_f();
  const NormCurve c = norm_curve(f, catalog::pair(1), {0.4, 0.2, 0.1, 0.05}, grid);
  std::string deltas = "delta =";
  for (const auto& r : c.rows) deltas += fmt(" %.4f", r.delta);
  o.require(c.delta_decreasing(), deltas);
  o.require(c.rows.back().delta <= 0.05 * c.zero_norm,
            fmt("delta(0.05) / norm0 = %.4f (norm0 %.5f)", c.rows.back().delta / c.zero_norm, c.zero_norm));
  double worst = 0.0;
  for (double t : {0.4, 0.1}) {
    const double n = pair_kernel_norm(f, t, grid).norm;
    const double sq = base_kernel_norm(pair_kernel_self_adjoint_square(f, t, grid), grid).norm;
    worst = std::max(worst, std::abs(sq - n * n) / (n * n));
  }
  o.require(worst <= 1e-5, fmt("C* identity %.2e", worst));
  return o;
}

Outcome axioms() {
  Outcome o;
  double worst = 0.0;
  for (const auto& c : {catalog::pair(1), catalog::pair(2), catalog::abelian_bundle(1, 1),
                        catalog::abelian_bundle(0, 2), catalog::heisenberg(), catalog::ax_plus_b()}) {
    const AxiomReport r = validate_axioms(c, 100, 1);
    worst = std::max({worst, r.associativity, r.source_compatibility, r.unit, r.inverse});
  }
  o.require(worst <= 1e-10, fmt("built-ins max residual %.2e", worst));
  const AxiomReport bad = validate_axioms(catalog::corrupted_pair(), 100, 1);
  o.require(bad.associativity > 1e-4, fmt("corrupted associativity %.2e", bad.associativity));
  return o;
}

Outcome reproducibility() {
  Outcome o;
  const auto doc = nlohmann::json::parse(R"({
    "chart": {"builtin": "pair", "n": 1},
    "grid": {"base": {"radius": 6, "intervals": 32}, "fiber": {"radius": 6, "intervals": 32}},
    "symbols": {"f": {"terms": [{"coef": 1}]},
                "g": {"terms": [{"coef": 1, "x_pow": [1], "xi_pow": [1]}]},
                "h": {"terms": [{"coef": 1, "alpha": [1.5], "beta": [0.7], "x_center": [0.3], "xi_center": [-0.2]}]}},
    "t": [0.4, 0.2, 0.1], "plot": true
  })");
  const RunConfig cfg = parse_config(doc);
  std::size_t same = 0, total = 0;
  for (const auto& cmd : command_names()) {
    std::vector<std::string> outputs;
    for (int workers : {1, 1, 4}) {
      set_worker_count(workers);
      const ReportBundle b = run_command(cmd, cfg);
      outputs.push_back(b.summary.dump(2) + b.table.render() + b.svg.value_or(""));
    }
    ++total;
    if (outputs[0] == outputs[1] && outputs[0] == outputs[2]) ++same;
  }
  set_worker_count(1);
  o.require(same == total, std::to_string(same) + "/" + std::to_string(total) + " commands byte-identical");
  return o;
}

}  // namespace

int main() {
  struct Item {
    int id;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
      {1, 1.0, structure_extraction},
      {2, 60.0, limit_pair},
      {2, 60.0, limit_heisenberg},
      {3, 5.0, degenerate},
      {4, 120.0, poisson_laws},
      {5, 60.0, intertwining},
      {6, 60.0, norm_field},
      {7, 1.0, axioms},
      {8, 60.0, reproducibility},
  };
  int failed = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s < it.budget;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d: %s  %s  (%.2f s, budget %.0f s%s)\n", it.id, pass ? "PASS" : "FAIL",
                o.detail.c_str(), s, it.budget, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d check(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
