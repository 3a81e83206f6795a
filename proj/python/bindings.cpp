// Python bindings. Structured inputs and outputs cross the boundary as JSON
// text; the package __init__ converts them to and from dicts.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "closedrange/carleson.hpp"
#include "closedrange/counting.hpp"
#include "closedrange/dirichlet.hpp"
#include "closedrange/errors.hpp"
#include "closedrange/geometry.hpp"
#include "closedrange/scenario.hpp"
#include "closedrange/symbols.hpp"
#include "closedrange/verify.hpp"

namespace py = pybind11;
using namespace closedrange;

namespace {

nlohmann::json parse_text(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(what, std::string("malformed JSON: ") + e.what());
  }
}

symbols::SymbolMap symbol_from_json(const std::string& text) {
  return symbols::build_symbol(scenario::parse_symbol(parse_text(text, "symbol"), "symbol"));
}

carleson::DensityQuery query_from_json(const std::string& text) {
  // Reuse the scenario parser so field checks and paths match the CLI.
  nlohmann::json doc{{"schema_version", scenario::kSchemaVersion},
                     {"symbol", {{"kind", "identity"}}},
                     {"query", parse_text(text.empty() ? "{}" : text, "query")}};
  return scenario::parse_scenario(doc).query;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-range analysis of composition operators on the Dirichlet space";
  m.attr("__version__") = scenario::version();

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ContourError>(m, "ContourError", PyExc_RuntimeError);
  py::register_exception<OverflowError>(m, "SingularityOverflow", PyExc_OverflowError);

  m.def("pseudo_hyperbolic_distance", &geometry::pseudo_hyperbolic_distance, py::arg("z"), py::arg("w"));
  m.def("bergman_distance", &geometry::bergman_distance, py::arg("z"), py::arg("w"));
  m.def(
      "bergman_disk",
      [](Complex z, double r) {
        const auto d = geometry::bergman_disk(z, r);
        return py::make_tuple(d.euclidean_center, d.euclidean_radius);
      },
      py::arg("z"), py::arg("r"), "Euclidean (center, radius) of the Bergman disk D(z, r).");

  py::class_<symbols::SymbolMap>(m, "Symbol")
      .def(py::init(&symbol_from_json), py::arg("spec_json"))
      .def("__call__", [](const symbols::SymbolMap& s, Complex z) { return s(z); })
      .def("derivative", [](const symbols::SymbolMap& s, Complex z) { return s.evaluate(z).derivative; })
      .def_property_readonly("kind", [](const symbols::SymbolMap& s) { return symbols::to_string(s.kind()); })
      .def_property_readonly("degree", &symbols::SymbolMap::degree)
      .def("spec_json", [](const symbols::SymbolMap& s) { return scenario::to_json(s.descriptor()).dump(); });

  m.def("count_preimages", &counting::count_preimages, py::arg("symbol"), py::arg("w"),
        py::arg("eps") = counting::kDefaultTruncation);
  m.def(
      "preimages",
      [](const symbols::SymbolMap& s, Complex w, double eps) {
        std::vector<std::pair<Complex, int>> out;
        for (const auto& p : counting::preimages(s, w, eps)) out.emplace_back(p.point, p.multiplicity);
        return out;
      },
      py::arg("symbol"), py::arg("w"), py::arg("eps") = counting::kDefaultTruncation);
  m.def(
      "tau",
      [](const symbols::SymbolMap& s, Complex w, double eps) { return counting::counting_sample(s, w, eps).tau; },
      py::arg("symbol"), py::arg("w"), py::arg("eps") = counting::kDefaultTruncation);

  m.def(
      "dirichlet_norm",
      [](std::vector<Complex> coeffs) { return dirichlet::dirichlet_norm(dirichlet::DirichletFunction(std::move(coeffs))); },
      py::arg("coefficients"));
  m.def(
      "composition_norm",
      [](const symbols::SymbolMap& s, std::vector<Complex> coeffs) {
        return dirichlet::composition_norm(s, dirichlet::DirichletFunction(std::move(coeffs)));
      },
      py::arg("symbol"), py::arg("coefficients"));
  m.def(
      "peak_ratios",
      [](const symbols::SymbolMap& s, Complex zeta, std::vector<int> ks) {
        return dirichlet::peak_ratio_sequence(s, zeta, ks);
      },
      py::arg("symbol"), py::arg("zeta"), py::arg("ks"));

  m.def(
      "coverage_ratio",
      [](const symbols::SymbolMap& s, Complex z, double r, const std::string& query) {
        const auto e = carleson::coverage_ratio(s, z, r, query_from_json(query));
        return py::make_tuple(e.value, e.std_error);
      },
      py::arg("symbol"), py::arg("z"), py::arg("r"), py::arg("query_json") = "");
  m.def(
      "reverse_carleson_ratio",
      [](const symbols::SymbolMap& s, Complex z, double r, double alpha, const std::string& query) {
        const auto e = carleson::reverse_carleson_ratio(s, z, r, alpha, query_from_json(query));
        return py::make_tuple(e.value, e.std_error);
      },
      py::arg("symbol"), py::arg("z"), py::arg("r"), py::arg("alpha"), py::arg("query_json") = "");

  m.def(
      "parse_scenario",
      [](const std::string& text) { return scenario::to_json(scenario::parse_scenario(parse_text(text, "scenario"))).dump(); },
      py::arg("scenario_json"), "Validate a scenario and return its normalized JSON.");
  m.def(
      "run_scenario",
      [](const std::string& text) {
        const auto config = scenario::parse_scenario(parse_text(text, "scenario"));
        py::gil_scoped_release release;
        return scenario::run_scenario(config).dump();
      },
      py::arg("scenario_json"), "Run a scenario and return the report JSON.");
  m.def(
      "verify",
      [](std::vector<std::string> tags, std::uint64_t seed) {
        py::gil_scoped_release release;
        return verify::verify_suite(tags, seed).to_json().dump();
      },
      py::arg("tags"), py::arg("seed") = 42);
}
