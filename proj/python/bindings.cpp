#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hma/diagnostics.hpp"
#include "hma/field_file.hpp"
#include "hma/gauduchon.hpp"
#include "hma/ma_solver.hpp"
#include "hma/scenario.hpp"

namespace py = pybind11;
using namespace hma;

namespace {

py::array_t<double> to_array(const ScalarField& f) {
  const auto sizes = f.grid().sizes();
  std::vector<py::ssize_t> shape(sizes.begin(), sizes.end());
  py::array_t<double> out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

ScalarField from_array(const TorusGrid& grid, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (static_cast<std::size_t>(a.size()) != grid.point_count()) {
    throw std::invalid_argument("array has " + std::to_string(a.size()) + " entries, grid has " +
                                std::to_string(grid.point_count()));
  }
  return ScalarField(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["phi"] = to_array(r.phi);
  d["b"] = r.b;
  d["converged"] = r.converged;
  d["final_residual"] = r.final_residual;
  d["positivity_margin"] = r.min_eig;
  d["newton_iters"] = r.newton_iters;
  d["krylov_iters_total"] = r.krylov_iters_total;
  d["continuity_stages"] = r.continuity_stages;
  d["residual_history"] = r.residual_history();
  d["wall_time_s"] = r.wall_time;
  return d;
}

struct Problem {
  Scenario scenario;
  HermitianField metric;
  ScalarField f;

  explicit Problem(Scenario s) : scenario(std::move(s)), metric(scenario.build_metric()), f(scenario.build_f(metric)) {}
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Complex Monge-Ampere solver on flat tori";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FieldFileError>(m, "FieldFileError", PyExc_OSError);
  auto conv = py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  auto gauduchon_err = py::register_exception<GauduchonError>(m, "GauduchonError", PyExc_RuntimeError);
  py::register_exception<KernelDegeneracyError>(m, "KernelDegeneracyError", gauduchon_err.ptr());
  py::register_exception<PositivityError>(m, "PositivityError", PyExc_ArithmeticError);
  (void)conv;

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("name", [](const Problem& p) { return p.scenario.name; })
      .def_property_readonly("n", [](const Problem& p) { return p.scenario.n; })
      .def_property_readonly("shape", [](const Problem& p) { return p.scenario.sizes; })
      .def_property_readonly("family", [](const Problem& p) { return family_name(p.scenario.metric.family); })
      .def_property_readonly("F", [](const Problem& p) { return to_array(p.f); })
      .def_property_readonly("checks", [](const Problem& p) { return p.scenario.checks; })
      .def("phi_star", [](const Problem& p) -> py::object {
        auto s = p.scenario.phi_star();
        if (!s) return py::none();
        return to_array(*s);
      })
      .def("coordinates", [](const Problem& p) {
        const TorusGrid g = p.scenario.grid();
        std::vector<std::vector<double>> axes;
        for (int a = 0; a < g.axes(); ++a) {
          std::vector<double> x(static_cast<std::size_t>(g.size(a)));
          for (int i = 0; i < g.size(a); ++i) x[static_cast<std::size_t>(i)] = g.coordinate(a, i);
          axes.push_back(std::move(x));
        }
        return axes;
      })
      .def("solve", [](const Problem& p, std::optional<double> tol) {
        SolveOptions o = p.scenario.solve_options();
        if (tol) o.residual_tol = *tol;
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = solve(p.metric, p.f, o);
        }
        return report_dict(r);
      }, py::arg("tol") = py::none())
      .def("residual", [](const Problem& p, py::array_t<double, py::array::c_style | py::array::forcecast> phi,
                          double b) {
        return to_array(ma_residual(from_array(p.metric.grid(), phi), b, p.f, p.metric));
      }, py::arg("phi"), py::arg("b"))
      .def("manufacture", [](const Problem& p, py::array_t<double, py::array::c_style | py::array::forcecast> phi) {
        return to_array(manufacture(p.metric, from_array(p.metric.grid(), phi)));
      }, py::arg("phi_star"))
      .def("positivity_margin", [](const Problem& p, py::array_t<double, py::array::c_style | py::array::forcecast> phi) {
        return positivity_margin(from_array(p.metric.grid(), phi), p.metric);
      }, py::arg("phi"))
      .def("gauduchon", [](const Problem& p) {
        GauduchonResult r;
        {
          py::gil_scoped_release release;
          r = solve_gauduchon(p.metric, p.scenario.gauduchon);
        }
        py::dict d;
        d["u"] = to_array(r.u);
        d["residual"] = r.residual;
        d["iterations"] = r.iterations;
        d["krylov_iters"] = r.krylov_iters;
        d["complement_ratio"] = r.complement_ratio;
        return d;
      })
      .def("classify", [](const Problem& p, double threshold) {
        const MetricClass c = classify_metric(p.metric, threshold);
        py::dict d;
        d["kahler"] = c.kahler();
        d["balanced"] = c.balanced();
        d["pluriclosed"] = c.pluriclosed();
        d["gauduchon"] = c.gauduchon();
        d["condition_k12"] = c.condition_k12();
        d["d_omega"] = c.d_omega;
        d["ddbar_omega"] = c.ddbar_omega;
        d["ddbar_omega_n1"] = c.ddbar_omega_n1;
        return d;
      }, py::arg("threshold") = 1e-10)
      .def("diagnose", [](const Problem& p, py::array_t<double, py::array::c_style | py::array::forcecast> phi,
                          double b, std::vector<std::string> checks) {
        const ScalarField ph = from_array(p.metric.grid(), phi);
        DiagnosticsReport rep;
        {
          py::gil_scoped_release release;
          rep = run_diagnostics({p.metric, p.f, ph, b, std::nullopt}, p.scenario.diagnostics,
                                checks.empty() ? p.scenario.checks : checks);
        }
        py::list out;
        for (const CheckResult& c : rep.checks) {
          py::dict d;
          d["name"] = c.name;
          d["pass"] = c.pass;
          d["theorem_backed"] = c.theorem_backed;
          d["values"] = c.values;
          d["tolerances"] = c.tolerances;
          d["samples"] = c.samples;
          d["note"] = c.note;
          out.append(d);
        }
        return out;
      }, py::arg("phi"), py::arg("b"), py::arg("checks") = std::vector<std::string>{});

  m.def("load_scenario", [](const std::filesystem::path& path) { return Problem(load_scenario(path)); },
        py::arg("path"));
  m.def("parse_scenario", [](const std::string& text) { return Problem(parse_scenario(text)); }, py::arg("text"));

  m.def("check_names", &check_names);

  m.def("pointwise_sample", [](int n, long trials, double eps, std::uint64_t seed, long validation) {
    const PointwiseResult r = pointwise_ineq_sample(n, trials, eps, seed, validation);
    py::list levels;
    for (const PointwiseLevel& l : r.levels) {
      py::dict d;
      d["k"] = l.k;
      d["calibrated_c"] = l.calibrated_c;
      d["uniform_c"] = l.uniform_c;
      d["validation_max"] = l.validation_max;
      d["violations"] = l.violations;
      levels.append(d);
    }
    py::dict d;
    d["pass"] = r.pass();
    d["levels"] = levels;
    return d;
  }, py::arg("n") = 2, py::arg("trials") = 10000, py::arg("eps") = 0.5, py::arg("seed") = 1,
     py::arg("validation") = 0);

  m.def("read_field", [](const std::filesystem::path& path) { return to_array(read_scalar_field(path)); },
        py::arg("path"));
  m.def("write_field", [](const std::filesystem::path& path,
                          py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 4 && a.ndim() != 6) throw std::invalid_argument("field must have 4 or 6 axes");
    std::vector<int> sizes;
    for (py::ssize_t i = 0; i < a.ndim(); ++i) sizes.push_back(static_cast<int>(a.shape(i)));
    const TorusGrid g = TorusGrid::build(static_cast<int>(a.ndim() / 2), sizes);
    write_field(path, from_array(g, a));
  }, py::arg("path"), py::arg("field"));
}
