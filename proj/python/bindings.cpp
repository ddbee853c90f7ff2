// JSON crosses the boundary as text; the Python package decodes it.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcosp/config.hpp"
#include "dcosp/generator.hpp"
#include "dcosp/oracle.hpp"
#include "dcosp/scenario_io.hpp"
#include "dcosp/simkernel.hpp"

namespace py = pybind11;
using namespace dcosp;
using nlohmann::json;

namespace {

ScenarioConfig config_from(const std::string& text) {
  ScenarioConfig c = json::parse(text).get<ScenarioConfig>();
  c.validate();
  return c;
}

struct Scenario {
  DcospInstance d;
};

}  // namespace

PYBIND11_MODULE(_dcosp, m) {
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
  py::register_exception<SolverInvariantError>(m, "SolverInvariantError", PyExc_AssertionError);

  m.def("preset_names", &preset_names);
  m.def("preset_config", [](const std::string& name) { return json(preset_config(name)).dump(); });
  m.def("solver_names", [] {
    std::vector<std::string> out;
    for (SolverKind k : all_solver_kinds()) out.push_back(to_string(k));
    return out;
  });

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("agents", [](const Scenario& s) { return s.d.agents.size(); })
      .def_property_readonly("requests", [](const Scenario& s) { return s.d.requests.size(); })
      .def_property_readonly("tasks", [](const Scenario& s) { return s.d.tasks.size(); })
      .def_property_readonly("instances", [](const Scenario& s) { return s.d.instance_count(); })
      .def_property_readonly("ever_active",
                             [](const Scenario& s) { return s.d.ever_active().size(); })
      .def_property_readonly("seed", [](const Scenario& s) { return s.d.seeds.scenario; })
      .def("to_json", [](const Scenario& s) { return dump_json(scenario_to_json(s.d)); })
      .def("save", [](const Scenario& s, const std::string& path) { save_scenario(s.d, path); });

  m.def("generate", [](const std::string& config, int index) {
    return Scenario{generate_scenario(config_from(config), index)};
  });
  m.def("load_scenario", [](const std::string& path) { return Scenario{load_scenario(path)}; });
  m.def("scenario_from_json",
        [](const std::string& text) { return Scenario{scenario_from_json(json::parse(text))}; });

  m.def(
      "run",
      [](const Scenario& s, const std::string& solver, const std::string& params) {
        const SolverParams p = params.empty() ? SolverParams{} : params_from_json(json::parse(params));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(s.d, parse_solver(solver), p);
        }
        return run_to_json(r).dump();
      },
      py::arg("scenario"), py::arg("solver"), py::arg("params") = "");
  m.def("default_params", [](const std::string& config) {
    return params_to_json(SolverParams::from_config(config_from(config))).dump();
  });
  m.def("verify_run", [](const Scenario& s, const std::string& run) {
    return verify_run(s.d, run_from_json(json::parse(run)));
  });
  m.def(
      "optimum",
      [](const Scenario& s, const std::string& method, long long node_budget, int swo_rounds) {
        const auto c = collapse(s.d);
        OracleResult r;
        py::gil_scoped_release release;
        if (method == "bnb")
          r = branch_and_bound(c, {node_budget, 120.0});
        else if (method == "swo")
          r = swo(c, {swo_rounds, 1234});
        else
          throw StructuralError("unknown oracle method '" + method + "'");
        return to_json(r).dump();
      },
      py::arg("scenario"), py::arg("method") = "bnb", py::arg("node_budget") = 20'000'000,
      py::arg("swo_rounds") = 50);
}
