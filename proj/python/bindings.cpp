#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curveflow/cli.hpp"
#include "curveflow/curvature_functions.hpp"
#include "curveflow/errors.hpp"
#include "curveflow/flow_solver.hpp"
#include "curveflow/graph_geometry.hpp"
#include "curveflow/ladder.hpp"
#include "curveflow/radial_oracle.hpp"
#include "curveflow/scenarios.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace curveflow;

namespace {

CurvatureVector to_kappa(const std::vector<double>& k) {
  return Eigen::Map<const Eigen::VectorXd>(k.data(), static_cast<Eigen::Index>(k.size()));
}

std::vector<double> to_list(const CurvatureVector& k) { return {k.data(), k.data() + k.size()}; }

py::array_t<double> as_array(const std::vector<double>& u, const Grid& g) {
  std::vector<py::ssize_t> shape;
  // x_1 varies fastest, so in 2D u[j, i] sits at (x_i, y_j)
  for (int a = g.dim() - 1; a >= 0; --a) shape.push_back(g.n(a));
  py::array_t<double> out(shape);
  std::copy(u.begin(), u.end(), out.mutable_data());
  return out;
}

StepperConfig stepper(double t_end, double snapshot_every, const std::string& mode,
                      int smoothing_passes) {
  StepperConfig cfg;
  cfg.t_end = t_end;
  cfg.snapshot_every = snapshot_every;
  cfg.smoothing_passes = smoothing_passes;
  if (mode == "strict") {
    cfg.admissibility_mode = AdmissibilityMode::strict;
  } else if (mode == "auto_boost") {
    cfg.admissibility_mode = AdmissibilityMode::auto_boost;
  } else if (mode == "weak") {
    cfg.admissibility_mode = AdmissibilityMode::weak;
  } else {
    throw ConfigError("unknown admissibility mode '" + mode + "'");
  }
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "curvature flow of graphs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", PyExc_RuntimeError);
  py::register_exception<NumericalFault>(m, "NumericalFault", PyExc_RuntimeError);

  py::class_<CurvatureFunctionSpec>(m, "Speed")
      .def(py::init([](const std::string& name, int dim) { return parse_speed(name, dim); }),
           "name"_a = "H1", "dim"_a = 2)
      .def_property_readonly("name", &CurvatureFunctionSpec::name)
      .def_readonly("dim", &CurvatureFunctionSpec::dim)
      .def("__call__",
           [](const CurvatureFunctionSpec& s, const std::vector<double>& k) {
             return eval_f(s, to_kappa(k));
           })
      .def("grad", [](const CurvatureFunctionSpec& s,
                      const std::vector<double>& k) { return to_list(grad_f(s, to_kappa(k))); })
      .def("__repr__", [](const CurvatureFunctionSpec& s) {
        return "Speed('" + s.name() + "', dim=" + std::to_string(s.dim) + ")";
      });

  m.def(
      "cone_contains",
      [](const CurvatureFunctionSpec& s, const std::vector<double>& k) {
        return cone_contains(to_kappa(k), s.cone, s.cone_floor);
      },
      "speed"_a, "kappa"_a);

  m.def(
      "structure_conditions",
      [](const CurvatureFunctionSpec& s, int samples, std::uint64_t seed) {
        const PropertyReport rep = verify_structure_conditions(s, samples, seed);
        py::dict out;
        for (const auto& c : rep.conditions) {
          out[py::str(c.name)] =
              py::dict("worst"_a = c.worst, "tolerance"_a = c.tolerance, "passed"_a = c.passed);
        }
        return out;
      },
      "speed"_a, "samples"_a = 1000, "seed"_a = 7);

  m.def(
      "shape_operator",
      [](const std::vector<double>& gradient, py::array_t<double, py::array::c_style> hessian) {
        const int d = static_cast<int>(gradient.size());
        if (hessian.ndim() != 2 || hessian.shape(0) != d || hessian.shape(1) != d) {
          throw ConfigError("hessian must be a d x d array");
        }
        SmallVector g(d);
        SmallMatrix h(d, d);
        for (int i = 0; i < d; ++i) {
          g[i] = gradient[i];
          for (int j = 0; j < d; ++j) h(i, j) = hessian.at(i, j);
        }
        const ShapeOperatorSample s = shape_operator(g, h);
        return py::dict("kappa"_a = to_list(s.kappa), "W"_a = s.W, "nu"_a = s.nu_vertical);
      },
      "gradient"_a, "hessian"_a);

  m.def("cylinder_extinction_time", &cylinder_extinction_time, "rho0"_a, "speed"_a);

  m.def(
      "run_ball",
      [](const CurvatureFunctionSpec& spec, int nodes, double extent, double L, double rho0,
         double t_end, double snapshot_every, const std::string& mode, int smoothing_passes) {
        const Grid grid = Grid::cube(spec.dim, extent, nodes);
        const StepperConfig cfg = stepper(t_end, snapshot_every, mode, smoothing_passes);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = solve_dirichlet(grid, sample_ball(grid, rho0), L, spec, cfg);
        }
        py::list times, fields;
        for (std::size_t k : r.regular_snapshots()) {
          times.append(r.snapshots[k].t);
          fields.append(as_array(r.snapshots[k].u, grid));
        }
        py::object escape = py::none();
        if (r.escape_time) escape = py::float_(*r.escape_time);
        return py::dict("escape_time"_a = escape, "stop_reason"_a = to_string(r.stop_reason),
                        "steps"_a = r.steps, "h"_a = grid.h(), "times"_a = times,
                        "u"_a = fields, "worst_descent"_a = r.worst_descent);
      },
      "speed"_a, "nodes"_a = 65, "extent"_a = 2.0, "L"_a = 20.0, "rho0"_a = 1.0,
      "t_end"_a = 1.5, "snapshot_every"_a = 0.05, "mode"_a = "weak", "smoothing_passes"_a = 1);

  m.def(
      "radial_ball",
      [](const CurvatureFunctionSpec& spec, int nodes, double L, double rho0, double t_end,
         double snapshot_every) {
        StepperConfig cfg;
        cfg.t_end = t_end;
        cfg.snapshot_every = snapshot_every;
        RadialOptions opts;
        opts.nodes = nodes;
        opts.radius = rho0;
        RadialRunResult r;
        {
          py::gil_scoped_release release;
          r = radial_run([rho0](double x) { return ball_radial_profile(x, rho0); }, L, spec,
                         cfg, opts);
        }
        py::list times, fields;
        for (const Snapshot& s : r.snapshots) {
          times.append(s.t);
          fields.append(py::array_t<double>(static_cast<py::ssize_t>(s.u.size()), s.u.data()));
        }
        py::object escape = py::none();
        if (r.escape_time) escape = py::float_(*r.escape_time);
        return py::dict("escape_time"_a = escape, "stop_reason"_a = to_string(r.stop_reason),
                        "dr"_a = r.dr, "times"_a = times, "u"_a = fields, "u_min"_a = r.u_min);
      },
      "speed"_a, "nodes"_a = 1024, "L"_a = 40.0, "rho0"_a = 1.0, "t_end"_a = 1.5,
      "snapshot_every"_a = 0.05);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        py::gil_scoped_release release;
        return run_cli(args);
      },
      "args"_a, "Runs the curveflow command line with the given arguments; returns the exit code.");
}
