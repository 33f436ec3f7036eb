#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pe/analysis.hpp"
#include "pe/config.hpp"
#include "pe/errors.hpp"
#include "pe/experiment.hpp"
#include "pe/periodic.hpp"

namespace py = pybind11;
using namespace pe;

namespace {

py::array_t<double> component(const PeriodicField& f, int comp) {
  py::array_t<double> out({f.nt(), f.nx()});
  auto v = out.mutable_unchecked<2>();
  for (int j = 0; j < f.nt(); ++j)
    for (int k = 0; k < f.nx(); ++k) v(j, k) = f(comp, j, k);
  return out;
}

PeriodicField from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> phi1,
                          py::array_t<double, py::array::c_style | py::array::forcecast> phi2,
                          double period, double length) {
  if (phi1.ndim() != 2 || phi2.ndim() != 2 || phi1.shape(0) != phi2.shape(0) ||
      phi1.shape(1) != phi2.shape(1))
    throw DomainError("phi1 and phi2 must be 2-D arrays of equal shape (nt, nx)");
  const int nt = static_cast<int>(phi1.shape(0));
  const int nx = static_cast<int>(phi1.shape(1));
  PeriodicField f(nt, nx, period, length);
  auto a = phi1.unchecked<2>();
  auto b = phi2.unchecked<2>();
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < nx; ++k) {
      f(0, j, k) = a(j, k);
      f(1, j, k) = b(j, k);
    }
  return f;
}

py::dict report_dict(const ConvergenceReport& r) {
  py::dict d;
  d["diffs"] = r.diffs;
  d["theta_estimates"] = r.theta_estimates;
  d["theta"] = r.theta;
  d["final_c0_norm"] = r.final_c0_norm;
  d["final_c1_norm"] = r.final_c1_norm;
  d["iterations_used"] = r.iterations_used;
  d["converged"] = r.converged;
  d["tol"] = r.tol;
  return d;
}

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Time-periodic solutions of the damped isentropic Euler equations.";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("sound_speed", &sound_speed, py::arg("rho"), py::arg("gamma"));
  m.def(
      "riemann_from_state",
      [](double rho, double u, double gamma) {
        const RiemannPair r = riemann_from_state({rho, u}, gamma);
        return py::make_tuple(r.m, r.n);
      },
      py::arg("rho"), py::arg("u"), py::arg("gamma"));
  m.def(
      "state_from_riemann",
      [](double mm, double n, double gamma) {
        const GasState s = state_from_riemann({mm, n}, gamma);
        return py::make_tuple(s.rho, s.u);
      },
      py::arg("m"), py::arg("n"), py::arg("gamma"));

  py::class_<Equilibrium>(m, "Equilibrium")
      .def_readonly("gamma", &Equilibrium::gamma)
      .def_readonly("rho_bar", &Equilibrium::rho_bar)
      .def_readonly("c_bar", &Equilibrium::c_bar)
      .def_readonly("m_bar", &Equilibrium::m_bar)
      .def_readonly("n_bar", &Equilibrium::n_bar)
      .def_readonly("neighborhood_radius", &Equilibrium::neighborhood_radius)
      .def_readonly("A0", &Equilibrium::A0);
  m.def(
      "make_equilibrium",
      [](double rho_bar, double gamma, std::optional<double> radius) {
        return make_equilibrium(rho_bar, gamma,
                                radius ? *radius : default_neighborhood_radius(rho_bar, gamma));
      },
      py::arg("rho_bar"), py::arg("gamma"), py::arg("radius") = py::none());

  py::class_<PeriodicSignal>(m, "PeriodicSignal")
      .def_static("zero", &PeriodicSignal::zero, py::arg("period"))
      .def_static("sine", &PeriodicSignal::sine, py::arg("period"), py::arg("amplitude"))
      .def_static("fourier", &PeriodicSignal::fourier, py::arg("period"), py::arg("mean"),
                  py::arg("cos"), py::arg("sin"))
      .def_static("power_sine", &PeriodicSignal::power_sine, py::arg("period"),
                  py::arg("amplitude"), py::arg("exponent"), py::arg("phase") = 0.0)
      .def("__call__", &PeriodicSignal::value, py::arg("t"))
      .def("derivative", &PeriodicSignal::derivative, py::arg("t"))
      .def_property_readonly("period", &PeriodicSignal::period);

  py::class_<DampingField>(m, "DampingField")
      .def_static("constant", &DampingField::constant, py::arg("beta0"), py::arg("period"),
                  py::arg("length"))
      .def_static("separable", &DampingField::separable, py::arg("beta0"), py::arg("temporal"),
                  py::arg("spatial"), py::arg("length"))
      .def("__call__", &DampingField::value, py::arg("t"), py::arg("x"))
      .def_property_readonly("beta_star", &DampingField::beta_star);

  py::class_<BoundaryForcing>(m, "BoundaryForcing")
      .def_readonly("kappa1", &BoundaryForcing::kappa1)
      .def_readonly("kappa2", &BoundaryForcing::kappa2)
      .def_readonly("period", &BoundaryForcing::period)
      .def_readonly("eps_measured", &BoundaryForcing::eps_measured);
  m.def("make_forcing", &make_forcing, py::arg("phi1b"), py::arg("phi2b"), py::arg("kappa1"),
        py::arg("kappa2"));

  m.def(
      "solve_periodic",
      [](const BoundaryForcing& forcing, const DampingField& damping, const Equilibrium& eq,
         int nt, int nx, double tol, int max_iter, bool frozen, const std::string& method,
         int threads) {
        IterationConfig c;
        c.nt = nt;
        c.nx = nx;
        c.tol = tol;
        c.max_iter = max_iter;
        c.frozen_coefficients = frozen;
        c.threads = threads;
        if (method == "full_path") c.method = SweepMethod::full_path;
        else if (method != "column_march") throw DomainError("unknown method '" + method + "'");
        PeriodicSolution s;
        {
          py::gil_scoped_release release;
          s = solve_periodic(forcing, damping, eq, c);
        }
        return py::make_tuple(component(s.field, 0), component(s.field, 1),
                              report_dict(s.report));
      },
      py::arg("forcing"), py::arg("damping"), py::arg("equilibrium"), py::arg("nt") = 128,
      py::arg("nx") = 128, py::arg("tol") = 0.0, py::arg("max_iter") = 60,
      py::arg("frozen") = false, py::arg("method") = "column_march", py::arg("threads") = 1,
      "Returns (phi1, phi2, report) with phi arrays of shape (nt, nx).");

  m.def(
      "frozen_oracle",
      [](const BoundaryForcing& forcing, const DampingField& damping, const Equilibrium& eq,
         double length, int nt, int nx, bool reflection) {
        const FrozenOracle o(forcing, damping, eq, length,
                             reflection ? FrozenOracle::Mode::reflection
                                        : FrozenOracle::Mode::transport);
        const PeriodicField f = o.sample(nt, nx);
        return py::make_tuple(component(f, 0), component(f, 1));
      },
      py::arg("forcing"), py::arg("damping"), py::arg("equilibrium"), py::arg("length"),
      py::arg("nt"), py::arg("nx"), py::arg("reflection") = false);

  m.def(
      "pde_residual",
      [](py::array_t<double> phi1, py::array_t<double> phi2, const BoundaryForcing& forcing,
         const DampingField& damping, const Equilibrium& eq, double length, bool frozen) {
        const PdeResidual r =
            pde_residual(from_arrays(phi1, phi2, forcing.period, length), forcing, damping, eq,
                         frozen);
        py::dict d;
        d["residual1"] = r.residual1;
        d["residual2"] = r.residual2;
        d["boundary_mismatch"] = r.boundary_mismatch;
        return d;
      },
      py::arg("phi1"), py::arg("phi2"), py::arg("forcing"), py::arg("damping"),
      py::arg("equilibrium"), py::arg("length"), py::arg("frozen") = false);

  m.def(
      "euler_residual",
      [](py::array_t<double> phi1, py::array_t<double> phi2, const Equilibrium& eq,
         const DampingField& damping, double period, double length) {
        return euler_residual(from_arrays(phi1, phi2, period, length), eq, damping).residual();
      },
      py::arg("phi1"), py::arg("phi2"), py::arg("equilibrium"), py::arg("damping"),
      py::arg("period"), py::arg("length"));

  m.def(
      "validate_config",
      [](const std::string& path) { return to_python(config_to_json(parse_config(path))); },
      py::arg("path"), "Parses and validates a config file; returns the populated config.");

  m.def(
      "run",
      [](const std::string& config_path, std::optional<std::string> mode,
         std::optional<std::string> out, std::optional<int> threads, int grid_scale) {
        RunOverrides o;
        if (mode) {
          o.mode = parse_mode(*mode);
          if (!o.mode) throw ConfigError("unknown mode '" + *mode + "'");
        }
        o.out_dir = out;
        o.threads = threads;
        o.grid_scale = grid_scale;
        const ExperimentConfig c = apply_overrides(parse_config(config_path), o);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        return py::make_tuple(r.exit_code, to_python(r.manifest));
      },
      py::arg("config"), py::arg("mode") = py::none(), py::arg("out") = py::none(),
      py::arg("threads") = py::none(), py::arg("grid_scale") = 1,
      "Runs one experiment; returns (exit_code, manifest).");
}
