#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "confreach/confidence.hpp"
#include "confreach/config.hpp"
#include "confreach/oracle.hpp"
#include "confreach/pipeline.hpp"
#include "confreach/relax.hpp"
#include "confreach/sdp.hpp"

namespace py = pybind11;
using namespace confreach;

namespace {

VarSpace make_space(int nx, int ntheta, bool time) { return time ? VarSpace::txtheta(nx, ntheta) : VarSpace::xtheta(nx, ntheta); }

RunConfig config_with(const std::string& path, std::optional<int> degree) {
  RunConfig cfg = load_config(path);
  if (degree) apply_degree_override(cfg, *degree);
  return cfg;
}

py::dict summary(const RelaxationResult& r) {
  py::dict d;
  d["status"] = to_string(r.solution.status);
  d["objective"] = r.certificate.objective;
  d["dual_objective"] = r.certificate.dual_objective;
  d["gap"] = r.solution.gap;
  d["iterations"] = r.solution.iterations;
  d["w"] = r.certificate.w;
  d["v"] = r.certificate.v;
  return d;
}

int run_verb(int (*cmd)(const CommandOptions&, std::ostream&), const std::string& config,
             std::optional<std::string> out, std::optional<int> degree, std::optional<std::vector<double>> alphas) {
  CommandOptions o{config, std::move(out), degree, std::move(alphas)};
  std::ostringstream log;
  const int code = cmd(o, log);
  py::print(log.str(), py::arg("end") = "");
  return code;
}

}  // namespace

PYBIND11_MODULE(confreach, m) {
  m.doc() = "Confidence-level backwards reachable sets from SOS relaxations";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<MultiPoly>(m, "Poly")
      .def("evaluate", [](const MultiPoly& p, const std::vector<double>& z) { return p.evaluate(z); })
      .def("degree", &MultiPoly::degree)
      .def("__len__", &MultiPoly::size)
      .def("__str__", &format_poly)
      .def("__eq__", [](const MultiPoly& a, const MultiPoly& b) { return a == b; })
      .def("__add__", [](const MultiPoly& a, const MultiPoly& b) { return a + b; })
      .def("__mul__", [](const MultiPoly& a, const MultiPoly& b) { return a * b; })
      .def("derivative", &MultiPoly::derivative);

  m.def(
      "parse_poly",
      [](const std::string& text, int nx, int ntheta, bool time) { return parse_poly(text, make_space(nx, ntheta, time)); },
      py::arg("text"), py::arg("nx") = 1, py::arg("ntheta") = 1, py::arg("time") = false);
  m.def("format_poly", &format_poly);

  m.def(
      "solve_relaxation",
      [](const std::string& config, std::optional<int> degree) {
        const RunConfig cfg = config_with(config, degree);
        return summary(solve_relaxation(cfg.problem, cfg.degree, cfg.solver));
      },
      py::arg("config"), py::arg("degree") = py::none());

  m.def(
      "confidence_field",
      [](const std::string& config, std::optional<int> degree) {
        const RunConfig cfg = config_with(config, degree);
        const auto r = solve_relaxation(cfg.problem, cfg.degree, cfg.solver);
        const auto f = build_confidence_field(r.certificate.w, cfg.distribution, state_grid(cfg), cfg.degree,
                                              r.certificate.objective);
        return py::make_tuple(f.grid.points, f.values);
      },
      py::arg("config"), py::arg("degree") = py::none());

  m.def(
      "alpha_set",
      [](const std::string& config, double alpha, std::optional<int> degree) {
        const RunConfig cfg = config_with(config, degree);
        const auto r = solve_relaxation(cfg.problem, cfg.degree, cfg.solver);
        const auto s = extract_alpha_set(build_confidence_field(r.certificate.w, cfg.distribution, state_grid(cfg)), alpha);
        py::dict d;
        d["membership"] = s.membership;
        d["intervals"] = s.intervals;
        d["area"] = s.area();
        return d;
      },
      py::arg("config"), py::arg("alpha"), py::arg("degree") = py::none());

  m.def(
      "empirical_confidence",
      [](const std::string& config, std::vector<std::vector<double>> points, std::optional<int> samples) {
        const RunConfig cfg = load_config(config);
        const auto f = empirical_confidence(cfg.problem, cfg.distribution, Grid::scattered(std::move(points)),
                                            samples.value_or(cfg.samples), cfg.seed, OracleOptions{cfg.rk4_steps, 0});
        return py::make_tuple(f.values, f.half_width);
      },
      py::arg("config"), py::arg("points"), py::arg("samples") = py::none());

  m.def(
      "export_standard_form",
      [](const std::string& config, std::optional<int> degree) {
        const RunConfig cfg = config_with(config, degree);
        return export_standard_form(assemble_dual_relaxation(cfg.problem, cfg.degree).sdp);
      },
      py::arg("config"), py::arg("degree") = py::none());

  const auto verb = [&m](const char* name, int (*cmd)(const CommandOptions&, std::ostream&)) {
    m.def(
        name,
        [cmd](const std::string& config, std::optional<std::string> out, std::optional<int> degree,
              std::optional<std::vector<double>> alphas) { return run_verb(cmd, config, out, degree, alphas); },
        py::arg("config"), py::arg("out") = py::none(), py::arg("degree") = py::none(), py::arg("alpha") = py::none());
  };
  verb("cmd_solve", &cmd_solve);
  verb("cmd_validate", &cmd_validate);
  verb("cmd_export", &cmd_export);
}
