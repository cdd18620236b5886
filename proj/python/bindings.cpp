#include "choreo/action.hpp"
#include "choreo/analysis.hpp"
#include "choreo/cli.hpp"
#include "choreo/parallel.hpp"
#include "choreo/serialize.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace choreo;

namespace {

using TermList = std::vector<std::pair<double, double>>;

ForceLaw make_force(const TermList& terms) {
  std::vector<PowerTerm> t;
  for (const auto& [c, e] : terms) t.push_back({c, e});
  ForceLaw f(std::move(t));
  f.require_valid();
  return f;
}

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(canonical_dump(j));
}

py::dict residual_dict(const ResidualStats& s) {
  py::dict d;
  d["max"] = s.max;
  d["mean"] = s.mean;
  d["samples"] = s.samples;
  d["energy_drift"] = s.energy_drift ? py::object(py::float_(*s.energy_drift)) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Equally spaced choreographies: constructors, dynamics, action search and mass analysis";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> base(m, "ChoreoError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ContractError>(m, "ContractError", base);
  py::register_exception<CollisionError>(m, "CollisionError", base);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base);
  py::register_exception<ParseError>(m, "ParseError", base);

  py::class_<ChoreographyConfig>(m, "Config")
      .def_static(
          "from_json", [](const std::string& text) { return config_from_json(parse_json(text)); },
          py::arg("text"))
      .def(
          "to_json",
          [](const ChoreographyConfig& c, std::uint64_t seed) {
            return canonical_dump(config_to_json(c, Meta{.seed = seed, .tol = {}, .run = Json::object()}));
          },
          py::arg("seed") = 0)
      .def_property_readonly("bodies", &ChoreographyConfig::bodies)
      .def_property_readonly("period", [](const ChoreographyConfig& c) { return c.path.period(); })
      .def_property_readonly("order", [](const ChoreographyConfig& c) { return c.path.order(); })
      .def_property_readonly("masses", [](const ChoreographyConfig& c) { return c.masses.values(); })
      .def_property_readonly("offsets", [](const ChoreographyConfig& c) { return c.offsets.values(); })
      .def_property_readonly("central_mass", [](const ChoreographyConfig& c) { return c.central_mass; })
      .def_property_readonly("is_curved", [](const ChoreographyConfig& c) { return c.space.is_curved(); })
      .def(
          "with_masses",
          [](const ChoreographyConfig& c, std::vector<double> masses) {
            ChoreographyConfig out = c;
            out.masses = MassVector(std::move(masses));
            out.check();
            return out;
          },
          py::arg("masses"))
      .def("positions", &ChoreographyConfig::positions, py::arg("t"), "Column k is body k.")
      .def("velocities", &ChoreographyConfig::velocities, py::arg("t"))
      .def("accelerations", &ChoreographyConfig::accelerations, py::arg("t"));

  m.def(
      "polygon_flat",
      [](int n, double radius, const TermList& force, double central_mass) {
        return polygon_flat(n, radius, make_force(force), central_mass).config;
      },
      py::arg("n"), py::arg("radius") = 1.0, py::arg("force") = TermList{{1.0, 1.5}},
      py::arg("central_mass") = 0.0, "Rigidly rotating regular n-gon with loop period n.");
  m.def(
      "polygon_curved",
      [](int n, double z, int sigma, double central_mass) {
        return polygon_curved(n, z, sigma, central_mass).config;
      },
      py::arg("n"), py::arg("z"), py::arg("sigma") = 1, py::arg("central_mass") = 0.0);

  m.def(
      "minimize_action",
      [](int n, std::optional<std::vector<double>> masses, const std::string& ansatz, int order,
         std::uint64_t seed, int iterations, const TermList& force) {
        ActionOptions opt;
        opt.order = order;
        opt.seed = seed;
        opt.iterations = iterations;
        const MassVector mv = masses ? MassVector(*masses) : MassVector::equal(static_cast<std::size_t>(n));
        ActionResult r = [&] {
          py::gil_scoped_release release;
          return minimize_action(n, mv, make_force(force), parse_ansatz(ansatz), opt);
        }();
        py::dict d;
        d["config"] = std::move(r.config);
        d["action"] = r.action;
        d["gradient_norm"] = r.gradient_norm;
        d["residual"] = residual_dict(r.residual);
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        d["restarts"] = r.restarts;
        d["history"] = r.history;
        d["warning"] = r.warning;
        return d;
      },
      py::arg("n") = 3, py::arg("masses") = py::none(), py::arg("ansatz") = "eight", py::arg("order") = 12,
      py::arg("seed") = 0, py::arg("iterations") = 4000, py::arg("force") = TermList{{1.0, 1.5}});

  m.def(
      "verify", [](const ChoreographyConfig& c, double dt) { return residual_dict(verify_config(c, dt)); },
      py::arg("config"), py::arg("dt") = 2.5e-3, "Finite-difference check of a sampled period.");
  m.def("config_residual", &config_residual, py::arg("config"), py::arg("samples") = 128);

  m.def(
      "simulate",
      [](const ChoreographyConfig& c, double dt, double periods, const std::string& scheme) {
        const bool curved = c.space.is_curved();
        Scheme s = curved ? Scheme::kRk4Projected : Scheme::kRk4;
        if (scheme == "rk4") s = Scheme::kRk4;
        else if (scheme == "verlet") s = Scheme::kVerlet;
        else if (scheme == "rk4_projected") s = Scheme::kRk4Projected;
        else if (scheme != "auto") throw DomainError("unknown scheme '" + scheme + "'");
        const auto steps = static_cast<std::size_t>(std::llround(periods * c.path.period() / dt));
        const Trajectory traj = integrate(c.state(0.0), c.model(), dt, steps, s);
        std::vector<double> times;
        std::vector<Positions> q;
        std::vector<Positions> v;
        for (const auto& st : traj.states) {
          times.push_back(st.time);
          q.push_back(st.q);
          v.push_back(st.v);
        }
        return py::make_tuple(times, q, v);
      },
      py::arg("config"), py::arg("dt") = 1e-3, py::arg("periods") = 1.0, py::arg("scheme") = "auto",
      "Returns (times, positions, velocities).");

  m.def(
      "analyze",
      [](const ChoreographyConfig& c, bool modes, bool span, bool nullspace, bool symmetry, bool verdict,
         int samples) {
        AnalysisOptions opt;
        opt.modes = modes;
        opt.span = span;
        opt.nullspace = nullspace;
        opt.symmetry = symmetry;
        opt.verdict = verdict;
        opt.samples = samples;
        const AnalysisReport r = analyze(c, opt);
        return to_python(report_to_json(r, Meta{}));
      },
      py::arg("config"), py::arg("modes") = true, py::arg("span") = true, py::arg("nullspace") = true,
      py::arg("symmetry") = false, py::arg("verdict") = true, py::arg("samples") = kDefaultSamples,
      "Analysis report as a dict.");

  m.def(
      "mass_feasibility",
      [](const ChoreographyConfig& c, int samples, double rank_rel) {
        Tolerances tol;
        tol.rank_rel = rank_rel;
        const FeasibilityResult r = mass_feasibility(c, samples, tol);
        py::dict d;
        d["dim"] = r.nullspace_dim;
        d["basis"] = r.basis;
        d["singular_values"] = r.singular_values;
        d["classification"] = r.classification;
        d["spectral_gap"] = r.spectral_gap;
        return d;
      },
      py::arg("config"), py::arg("samples") = kDefaultSamples, py::arg("rank_rel") = 1e-8);

  m.def("span_dimension", [](const ChoreographyConfig& c, int samples) { return span_dimension(c, samples).d; },
        py::arg("config"), py::arg("samples") = kDefaultSamples);
  m.def("mode_residual_curved", &mode_residual_curved, py::arg("config"), py::arg("l"),
        py::arg("samples") = kDefaultSamples);
  m.def(
      "mode_residual_flat",
      [](const ChoreographyConfig& c, int l, int samples) {
        const ModeResidual r = mode_residual_flat(c, l, samples);
        return py::make_tuple(r.with_f, r.without_f);
      },
      py::arg("config"), py::arg("l"), py::arg("samples") = kDefaultSamples, "(with_f, without_f)");
  m.def("great_circle_test",
        [](const ChoreographyConfig& c) { return great_circle_test(c); }, py::arg("config"));

  m.def(
      "detect_symmetry_axis",
      [](const ChoreographyConfig& c) -> py::object {
        const auto axis = detect_symmetry_axis(c.path);
        if (!axis) return py::none();
        py::dict d;
        d["theta"] = axis->theta;
        d["tau"] = axis->tau;
        d["residual"] = axis->residual;
        return d;
      },
      py::arg("config"));

  m.def(
      "dft_basis",
      [](int n) {
        const SpectralBasis b = dft_basis(n);
        return py::make_tuple(b.vectors, b.eigenvalues);
      },
      py::arg("n"), "(vectors, eigenvalues); column l-1 holds e_l.");
  m.def("mass_modes", [](const std::vector<double>& masses) { return mass_modes(MassVector(masses)).a; },
        py::arg("masses"), "Coefficients a_1..a_{n-1} of the mass deviation vector.");

  m.def("thread_count", &thread_count);
  m.def("set_thread_count", &set_thread_count, py::arg("threads"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"choreo"};
        for (const auto& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs the command-line front end and returns its exit code.");
}
