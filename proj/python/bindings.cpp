#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gcl/algebroid.hpp"
#include "gcl/config.hpp"
#include "gcl/cstar.hpp"
#include "gcl/groupoid.hpp"
#include "gcl/poisson.hpp"
#include "gcl/report.hpp"
#include "gcl/tangent.hpp"

namespace py = pybind11;
using namespace gcl;

namespace {

AlgebroidData data_for(const GroupoidChart& chart, const GridSpec& grid, double fd_step) {
  return extract_algebroid(chart, grid, fd_step);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of groupoid_limit";
  m.attr("__version__") = GCL_VERSION;

  static py::exception<Error> base_exc(m, "GclError");
  static py::exception<ConfigError> config_exc(m, "ConfigError", base_exc.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      std::string msg;
      for (const auto& v : e.violations()) msg += (msg.empty() ? "" : "; ") + v;
      py::set_error(config_exc, msg.c_str());
    } catch (const Error& e) {
      py::set_error(base_exc, e.what());
    }
  });

  py::class_<GroupoidChart>(m, "Chart")
      .def_readonly("name", &GroupoidChart::name)
      .def_readonly("n", &GroupoidChart::n)
      .def_readonly("m", &GroupoidChart::m)
      .def("__repr__", [](const GroupoidChart& c) { return "<Chart " + c.name + ">"; });

  m.def("pair", &catalog::pair, py::arg("n") = 1, py::arg("radius") = 10.0);
  m.def("abelian_bundle", &catalog::abelian_bundle, py::arg("n") = 1, py::arg("m") = 1,
        py::arg("radius") = 10.0);
  m.def("heisenberg", &catalog::heisenberg, py::arg("radius") = 10.0);
  m.def("ax_plus_b", &catalog::ax_plus_b, py::arg("v1_radius") = 3.0, py::arg("v2_radius") = 10.0);

  py::class_<GridSpec>(m, "Grid")
      .def_static("symmetric", &GridSpec::symmetric, py::arg("n"), py::arg("base_radius"),
                  py::arg("base_intervals"), py::arg("m"), py::arg("fiber_radius"),
                  py::arg("fiber_intervals"))
      .def_property_readonly("base_size", &GridSpec::base_size)
      .def_property_readonly("fiber_size", &GridSpec::fiber_size)
      .def_property_readonly("size", &GridSpec::size)
      .def("base_point", py::overload_cast<std::size_t>(&GridSpec::base_point, py::const_))
      .def("fiber_point", py::overload_cast<std::size_t>(&GridSpec::fiber_point, py::const_));

  py::class_<SymbolSpec>(m, "Symbol")
      .def(py::init<std::size_t, std::size_t>(), py::arg("n"), py::arg("m"))
      .def_static("gaussian", &SymbolSpec::gaussian, py::arg("n"), py::arg("m"),
                  py::arg("coef") = cplx(1.0, 0.0), py::arg("alpha") = Vec{}, py::arg("beta") = Vec{},
                  py::arg("x_center") = Vec{}, py::arg("xi_center") = Vec{})
      .def(
          "add_term",
          [](SymbolSpec& s, cplx coef, std::vector<int> x_pow, std::vector<int> xi_pow, Vec alpha,
             Vec x_center, Vec beta, Vec xi_center) {
            s.add_term(SymbolTerm{coef, std::move(x_pow), std::move(xi_pow), std::move(alpha),
                                  std::move(x_center), std::move(beta), std::move(xi_center)});
          },
          py::arg("coef") = cplx(1.0, 0.0), py::arg("x_pow") = std::vector<int>{},
          py::arg("xi_pow") = std::vector<int>{}, py::arg("alpha") = Vec{},
          py::arg("x_center") = Vec{}, py::arg("beta") = Vec{}, py::arg("xi_center") = Vec{})
      .def("d_x", &SymbolSpec::d_x)
      .def("d_xi", &SymbolSpec::d_xi)
      .def("times_x", &SymbolSpec::times_x)
      .def("times_xi", &SymbolSpec::times_xi)
      .def("scaled", &SymbolSpec::scaled)
      .def("__call__", [](const SymbolSpec& s, const Vec& x, const Vec& xi) { return s(x, xi); })
      .def("__add__", [](const SymbolSpec& a, const SymbolSpec& b) { return a + b; })
      .def("__sub__", [](const SymbolSpec& a, const SymbolSpec& b) { return a - b; })
      .def("__eq__", [](const SymbolSpec& a, const SymbolSpec& b) { return a == b; })
      .def("samples", [](const SymbolSpec& s, const GridSpec& g) { return eval_symbol(s, g).values; });

  // std::span has no caster; take lists as Vec.
  m.def(
      "compose",
      [](const GroupoidChart& c, const Vec& u, const Vec& v, const Vec& w) { return compose(c, u, v, w); },
      py::arg("chart"), py::arg("u"), py::arg("v"), py::arg("w"));
  m.def(
      "source_coords", [](const GroupoidChart& c, const Vec& u, const Vec& v) { return source_coords(c, u, v); },
      py::arg("chart"), py::arg("u"), py::arg("v"));
  m.def(
      "invert_element",
      [](const GroupoidChart& c, const Vec& u, const Vec& v) { return invert_element(c, u, v); },
      py::arg("chart"), py::arg("u"), py::arg("v"));

  m.def(
      "validate_axioms",
      [](const GroupoidChart& c, std::size_t samples, std::uint64_t seed) {
        const AxiomReport r = validate_axioms(c, samples, seed);
        py::dict d;
        d["associativity"] = r.associativity;
        d["source_compatibility"] = r.source_compatibility;
        d["unit"] = r.unit;
        d["inverse"] = r.inverse;
        d["samples"] = r.samples;
        d["attempts"] = r.attempts;
        d["failures"] = r.failures();
        return d;
      },
      py::arg("chart"), py::arg("samples") = 100, py::arg("seed") = 1);

  m.def(
      "algebroid",
      [](const GroupoidChart& c, const GridSpec& g, double h) {
        const AlgebroidData a = data_for(c, g, h);
        py::dict d;
        d["base_points"] = a.base_points;
        d["anchors"] = a.anchors;
        d["structures"] = a.structures;
        d["log_weight_grads"] = a.log_weight_grads;
        d["weights"] = a.weights;
        return d;
      },
      py::arg("chart"), py::arg("grid"), py::arg("fd_step") = kDefaultFdStep);

  m.def(
      "bracket",
      [](const SymbolSpec& f, const SymbolSpec& g, const GroupoidChart& c, const GridSpec& grid,
         double h) { return poisson_bracket(f, g, data_for(c, grid, h), grid).values; },
      py::arg("f"), py::arg("g"), py::arg("chart"), py::arg("grid"),
      py::arg("fd_step") = kDefaultFdStep);

  m.def(
      "intertwining",
      [](const SymbolSpec& f, const SymbolSpec& g, const GroupoidChart& c, const GridSpec& grid) {
        const IntertwiningResult r = intertwining_residual(f, g, data_for(c, grid, kDefaultFdStep), grid);
        py::dict d;
        d["residual"] = r.residual;
        d["s1"] = r.s1;
        d["s2"] = r.s2;
        d["by_signs"] = std::vector<double>(r.by_signs.begin(), r.by_signs.end());
        d["band_limited"] = r.band_limited;
        return d;
      },
      py::arg("f"), py::arg("g"), py::arg("chart"), py::arg("grid"));

  m.def(
      "classical_limit",
      [](const GroupoidChart& c, const GridSpec& grid, const SymbolSpec& f, const SymbolSpec& g,
         const Vec& ts) {
        const LimitTable t = classical_limit_error_table(DeformationField{c, grid, f, g, ts});
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict d;
          d["t"] = r.t;
          d["error"] = r.error;
          d["ratio"] = r.ratio;
          d["kappa"] = r.kappa;
          rows.append(d);
        }
        return rows;
      },
      py::arg("chart"), py::arg("grid"), py::arg("f"), py::arg("g"), py::arg("ts"));

  m.def(
      "norm_curve",
      [](const SymbolSpec& f, const GroupoidChart& c, const Vec& ts, const GridSpec& grid) {
        const NormCurve nc = norm_curve(f, c, ts, grid);
        py::dict d;
        d["zero_norm"] = nc.zero_norm;
        py::list rows;
        for (const auto& r : nc.rows) {
          py::dict row;
          row["t"] = r.t;
          row["norm"] = r.norm;
          row["delta"] = r.delta;
          row["residual"] = r.residual;
          rows.append(row);
        }
        d["rows"] = rows;
        d["delta_decreasing"] = nc.delta_decreasing();
        return d;
      },
      py::arg("f"), py::arg("chart"), py::arg("ts"), py::arg("grid"));

  m.def(
      "run_command",
      [](const std::string& name, const std::string& config_json) {
        const RunConfig cfg = parse_config(parse_json_text(config_json, "<config>"));
        return run_command(name, cfg).summary.dump();
      },
      py::arg("name"), py::arg("config_json"));
}
