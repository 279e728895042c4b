#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mcflow/bench.hpp"
#include "mcflow/config.hpp"
#include "mcflow/discretization.hpp"
#include "mcflow/energy.hpp"
#include "mcflow/levelset.hpp"
#include "mcflow/minimize.hpp"
#include "mcflow/runner.hpp"
#include "mcflow/schemes.hpp"

namespace py = pybind11;
using namespace mcflow;

namespace {

// Arrays are (n + 1, n + 1) with a[j, i] = value at (x_i, y_j).
Field to_field(const GridSpec& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  const auto n1 = static_cast<py::ssize_t>(g.n + 1);
  if (a.ndim() != 2 || a.shape(0) != n1 || a.shape(1) != n1)
    throw InvalidArgument("array must have shape (n + 1, n + 1)");
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_array(const Field& f) {
  const auto n1 = static_cast<py::ssize_t>(f.grid().n + 1);
  py::array_t<double> out({n1, n1});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Functional functional_from(const std::string& s) {
  if (s == "plain") return Functional::Plain;
  if (s == "penalized") return Functional::Penalized;
  if (s == "scaled") return Functional::ScaledRemark;
  throw InvalidArgument("functional must be plain, penalized or scaled");
}

SchemeId scheme_from(const std::string& s) {
  for (SchemeId id : {SchemeId::FIS, SchemeId::ConvexSplitting, SchemeId::SemiImplicit,
                      SchemeId::ModifiedCN})
    if (s == to_string(id)) return id;
  throw InvalidArgument("scheme must be fis, css, semi or mcn");
}

StepParams params(double eps, double k, double delta, const std::string& functional) {
  StepParams p{eps, k, delta, functional_from(functional)};
  p.validate();
  return p;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  d["name"] = r.config.name;
  d["classification"] = std::string(to_string(r.topology.classification));
  std::vector<std::string> events;
  for (TopologyEvent e : r.topology.event_types()) events.emplace_back(to_string(e));
  d["events"] = events;
  d["times"] = r.times;
  d["energies"] = r.energies;
  d["component_counts"] = r.component_counts;
  d["radii"] = r.radii;
  d["final_time"] = r.final_time;
  d["failure"] = r.failure ? py::object(py::str(r.failure->message)) : py::object(py::none());
  d["final_state"] = r.final_state ? py::object(to_array(*r.final_state)) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_mcflow, m) {
  m.doc() = "Phase-field and level-set mean curvature flow solvers";
  m.attr("__version__") = "0.1.0";

  // Translators are tried newest first, so the base class goes first.
  const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<VanishedInterface>(m, "VanishedInterface", base.ptr());

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double x_min, double x_max, double y_min, double y_max, int n) {
             GridSpec g{x_min, x_max, y_min, y_max, n};
             g.validate();
             return g;
           }),
           py::arg("x_min"), py::arg("x_max"), py::arg("y_min"), py::arg("y_max"), py::arg("n"))
      .def_static("unit_box", &GridSpec::unit_box, py::arg("n"))
      .def_static("with_spacing", [](double h) { return GridSpec::with_spacing(GridSpec::unit_box(1), h); },
                  py::arg("h"), "Grid on [-0.5, 0.5]^2 with spacing h")
      .def_readonly("n", &GridSpec::n)
      .def_readonly("x_min", &GridSpec::x_min)
      .def_readonly("x_max", &GridSpec::x_max)
      .def_readonly("y_min", &GridSpec::y_min)
      .def_readonly("y_max", &GridSpec::y_max)
      .def_property_readonly("h", &GridSpec::h)
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; })
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(n=" + std::to_string(g.n) + ", h=" + format_number(g.h()) + ")";
      });

  m.def("laplacian", [](const GridSpec& g, py::array_t<double> u) {
    return to_array(apply_neumann_laplacian(to_field(g, u)));
  }, py::arg("grid"), py::arg("u"), "Five-point Laplacian with homogeneous Neumann closure");
  m.def("inner_product", [](const GridSpec& g, py::array_t<double> a, py::array_t<double> b) {
    return lumped_inner_product(to_field(g, a), to_field(g, b));
  }, py::arg("grid"), py::arg("a"), py::arg("b"), "Lumped (trapezoid) L2 inner product");

  m.def("j_eps", [](const GridSpec& g, py::array_t<double> u, double eps) {
    return j_eps(to_field(g, u), eps);
  }, py::arg("grid"), py::arg("u"), py::arg("eps"));
  m.def("functional_value",
        [](const GridSpec& g, py::array_t<double> u, py::array_t<double> prev, double eps, double k,
           double delta, const std::string& functional) {
          return functional_value(to_field(g, u), to_field(g, prev), params(eps, k, delta, functional));
        },
        py::arg("grid"), py::arg("u"), py::arg("u_prev"), py::arg("eps"), py::arg("k"),
        py::arg("delta") = 0.0, py::arg("functional") = "plain");
  m.def("energy_gradient",
        [](const GridSpec& g, py::array_t<double> u, py::array_t<double> prev, double eps, double k,
           double delta, const std::string& functional) {
          return to_array(energy_gradient(to_field(g, u), to_field(g, prev), params(eps, k, delta, functional)));
        },
        py::arg("grid"), py::arg("u"), py::arg("u_prev"), py::arg("eps"), py::arg("k"),
        py::arg("delta") = 0.0, py::arg("functional") = "plain");

  m.def("step_scheme",
        [](const std::string& scheme, const GridSpec& g, py::array_t<double> prev, double eps, double k,
           double tol) {
          NewtonConfig cfg;
          cfg.tol = tol;
          return to_array(step_scheme(scheme_from(scheme), to_field(g, prev), {eps, k}, cfg));
        },
        py::arg("scheme"), py::arg("grid"), py::arg("u_prev"), py::arg("eps"), py::arg("k"),
        py::arg("tol") = 1e-8, "One time step of fis, css, semi or mcn");
  m.def("scheme_residual_norm",
        [](const std::string& scheme, const GridSpec& g, py::array_t<double> u, py::array_t<double> prev,
           double eps, double k) {
          return lumped_norm(scheme_residual(scheme_from(scheme), to_field(g, u), to_field(g, prev), {eps, k}));
        },
        py::arg("scheme"), py::arg("grid"), py::arg("u"), py::arg("u_prev"), py::arg("eps"), py::arg("k"));

  m.def("minimize",
        [](const GridSpec& g, py::array_t<double> guess, py::array_t<double> prev, double eps, double k,
           double delta, const std::string& functional, double tol) {
          const StepParams p = params(eps, k, delta, functional);
          auto [u, rep] = minimize_functional(p.functional, to_field(g, guess), to_field(g, prev), p, tol);
          py::dict report;
          report["outer_iterations"] = rep.outer_iterations;
          report["final_gradient_norm"] = rep.final_gradient_norm;
          report["energy_trace"] = rep.energy_trace;
          return py::make_tuple(to_array(u), report);
        },
        py::arg("grid"), py::arg("guess"), py::arg("u_prev"), py::arg("eps"), py::arg("k"),
        py::arg("delta") = 0.0, py::arg("functional") = "plain", py::arg("tol") = 1e-8,
        "argmin of a step functional; returns (u, report)");
  m.def("multilevel_step",
        [](const GridSpec& g, py::array_t<double> prev, py::array_t<double> guess,
           const std::vector<std::pair<double, double>>& levels, double eps, double k, double tol) {
          MultilevelSchedule s;
          for (const auto& [h, e] : levels) s.levels.push_back({h, e});
          return to_array(multilevel_step(to_field(g, prev), to_field(g, guess), s, {eps, k}, tol));
        },
        py::arg("grid"), py::arg("u_prev"), py::arg("guess"), py::arg("levels"), py::arg("eps"),
        py::arg("k"), py::arg("tol") = 1e-8, "levels: [(h, eps), ...] coarse to fine");

  m.def("levelset_run",
        [](const GridSpec& g, py::array_t<double> omega0, double k, double t_end) {
          const LevelSetRun r = ls_run(to_field(g, omega0), k, t_end);
          return py::make_tuple(to_array(r.final_state.omega), r.final_state.time, r.vanished);
        },
        py::arg("grid"), py::arg("omega0"), py::arg("k"), py::arg("t_end"),
        "Explicit level-set run; returns (omega, time, vanished)");

  m.def("circle",
        [](const GridSpec& g, double radius, double cx, double cy, std::optional<double> eps) {
          InitialCondition ic{Circle{cx, cy, radius}, SignedDistance{}};
          if (eps) ic.profile = TanhProfile{*eps};
          return to_array(make_initial_condition(ic, g));
        },
        py::arg("grid"), py::arg("radius"), py::arg("cx") = 0.0, py::arg("cy") = 0.0,
        py::arg("eps") = py::none(), "tanh profile when eps is given, else signed distance");
  m.def("two_circles",
        [](const GridSpec& g, double gap, double radius, std::optional<double> eps) {
          InitialCondition ic{TwoCircles{gap, radius}, SignedDistance{}};
          if (eps) ic.profile = TanhProfile{*eps};
          return to_array(make_initial_condition(ic, g));
        },
        py::arg("grid"), py::arg("gap"), py::arg("radius") = 0.14, py::arg("eps") = py::none());
  m.def("wedges",
        [](const GridSpec& g, double M, std::optional<double> eps) {
          InitialCondition ic{Wedges{M}, SignedDistance{}};
          ic.profile = TanhProfile{eps.value_or(M)};
          return to_array(make_initial_condition(ic, g));
        },
        py::arg("grid"), py::arg("M"), py::arg("eps") = py::none());

  m.def("measure_radius", [](const GridSpec& g, py::array_t<double> u) {
    return measure_radius(to_field(g, u));
  }, py::arg("grid"), py::arg("u"));
  m.def("count_components", [](const GridSpec& g, py::array_t<double> u, double threshold) {
    return count_components(to_field(g, u), threshold);
  }, py::arg("grid"), py::arg("u"), py::arg("threshold") = 0.0);
  m.def("classify_topology",
        [](const std::vector<double>& times, const std::vector<int>& counts) {
          const TopologyTimeline t = classify_topology(times, counts);
          std::vector<std::pair<std::string, double>> events;
          for (const TimedEvent& e : t.events) events.emplace_back(to_string(e.type), e.time);
          return py::make_tuple(std::string(to_string(t.classification)), events);
        },
        py::arg("times"), py::arg("counts"), "Returns (classification, [(event, time), ...])");

  m.def("parse_config", [](const std::string& text) { return to_text(parse_config(text)); },
        py::arg("text"), "Validates a config and returns its canonical text");
  m.def("run",
        [](const std::string& text, std::optional<std::filesystem::path> output_dir) {
          const RunConfig c = parse_config(text);
          c.validate();
          RunResult r;
          {
            py::gil_scoped_release release;
            r = execute(c);
          }
          if (output_dir) write_artifacts(r, *output_dir);
          return result_dict(r);
        },
        py::arg("config_text"), py::arg("output_dir") = py::none(),
        "Runs a configuration given as text; writes artifacts when output_dir is set");
  m.def("run_file",
        [](const std::filesystem::path& path, std::optional<std::filesystem::path> output_dir) {
          const RunConfig c = load_config(path);
          c.validate();
          RunResult r;
          {
            py::gil_scoped_release release;
            r = execute(c);
          }
          if (output_dir) write_artifacts(r, *output_dir);
          return result_dict(r);
        },
        py::arg("path"), py::arg("output_dir") = py::none());
}
