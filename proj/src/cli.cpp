#include "choreo/cli.hpp"

#include "choreo/action.hpp"
#include "choreo/analysis.hpp"
#include "choreo/parallel.hpp"
#include "choreo/serialize.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace choreo {
namespace {

struct Globals {
  int threads = 0;
  std::uint64_t seed = 0;
  Tolerances tol;
};

struct GenArgs {
  std::string kind;
  int n = 0;
  double radius = 1.0;
  double z = 0.0;
  int sigma = 1;
  double central_mass = 0.0;
  std::string force;
  std::string masses;
  int order = 12;
  int iterations = 4000;
  std::string input;
  std::string out;
  double verify_dt = 2.5e-3;
};

struct SimulateArgs {
  std::string config;
  double dt = 1e-3;
  double periods = 1.0;
  std::string scheme = "auto";
  std::string out;
};

struct AnalyzeArgs {
  std::string config;
  bool modes = false;
  bool span = false;
  bool nullspace = false;
  bool symmetry = false;
  bool verdict = false;
  int samples = kDefaultSamples;
  std::string out;
  std::string csv;
};

struct VerifyArgs {
  std::string input;
  double dt = 2.5e-3;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

double to_number(const std::string& text, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ParseError(std::string("cannot read ") + what + " from '" + text + "'");
  }
  return v;
}

/// "c:e" terms separated by commas, e.g. "1:1.5,0.5:2".
ForceLaw parse_force(const std::string& text) {
  if (text.empty()) return ForceLaw::classical();
  std::vector<PowerTerm> terms;
  for (const auto& term : split(text, ',')) {
    const auto pair = split(term, ':');
    if (pair.size() != 2) throw ParseError("force terms are written coefficient:exponent");
    terms.push_back({to_number(pair[0], "force coefficient"), to_number(pair[1], "force exponent")});
  }
  ForceLaw f(std::move(terms));
  f.require_valid();
  return f;
}

MassVector parse_masses(const std::string& text, int n) {
  if (text.empty()) return MassVector::equal(static_cast<std::size_t>(n));
  std::vector<double> m;
  for (const auto& item : split(text, ',')) m.push_back(to_number(item, "mass"));
  if (static_cast<int>(m.size()) != n) throw ContractError("--masses must list exactly n values");
  return MassVector(std::move(m));
}

Scheme parse_scheme(const std::string& name, bool curved) {
  if (name == "auto") return curved ? Scheme::kRk4Projected : Scheme::kRk4;
  if (name == "rk4") return Scheme::kRk4;
  if (name == "verlet") return Scheme::kVerlet;
  if (name == "rk4_projected") return Scheme::kRk4Projected;
  throw ParseError("unknown scheme '" + name + "' (rk4, verlet, rk4_projected, auto)");
}

Json tolerance_json(const Tolerances& tol) {
  return Json{{"rank_rel", tol.rank_rel}, {"residual_abs", tol.residual_abs}, {"constraint_abs", tol.constraint_abs}};
}

Meta make_meta(const Globals& g, Json run) {
  return Meta{.seed = g.seed, .tol = g.tol, .run = std::move(run)};
}

void emit(std::ostream& out, const Json& line) { out << canonical_dump(line) << '\n'; }

int cmd_gen(const GenArgs& a, const Globals& g, std::ostream& out) {
  Json run{{"command", "gen"}, {"kind", a.kind}, {"verify_dt", a.verify_dt}};
  Json extra = Json::object();
  std::optional<ChoreographyConfig> config;

  if (a.kind == "polygon-flat" || a.kind == "polygon-curved") {
    if (a.n < 2) throw ContractError("--n must be at least 2");
    PolygonResult poly = [&] {
      if (a.kind == "polygon-flat") {
        const ForceLaw f = parse_force(a.force);
        run.update(Json{{"n", a.n}, {"radius", a.radius}, {"central_mass", a.central_mass}, {"force", to_json(f)}});
        return polygon_flat(a.n, a.radius, f, a.central_mass);
      }
      run.update(Json{{"n", a.n}, {"z", a.z}, {"sigma", a.sigma}, {"central_mass", a.central_mass}});
      return polygon_curved(a.n, a.z, a.sigma, a.central_mass);
    }();
    extra["generator"] = Json{{"omega_squared_unit", poly.omega_squared_unit}, {"mass_scale", poly.mass_scale}};
    config = std::move(poly.config);
  } else if (a.kind == "eight") {
    const int n = a.n == 0 ? 3 : a.n;
    const ForceLaw f = parse_force(a.force);
    const MassVector m = parse_masses(a.masses, n);
    ActionOptions opt;
    opt.order = a.order;
    opt.iterations = a.iterations;
    opt.seed = g.seed;
    opt.verify_dt = a.verify_dt;
    run.update(Json{{"n", n}, {"order", a.order}, {"iterations", a.iterations}, {"masses", m.values()}, {"force", to_json(f)}});
    ActionResult res = minimize_action(n, m, f, Ansatz::kEight, opt);
    extra["search"] = Json{{"ansatz", "eight"},
                           {"action", res.action},
                           {"gradient_norm", res.gradient_norm},
                           {"converged", res.converged},
                           {"iterations", res.iterations},
                           {"restarts", res.restarts},
                           {"warning", res.warning}};
    config = std::move(res.config);
  } else if (a.kind == "custom-json") {
    if (a.input.empty()) throw ContractError("custom-json needs --input");
    run["input"] = a.input;
    config = config_from_json(read_json_file(a.input));
  } else {
    throw ParseError("unknown generator '" + a.kind + "' (polygon-flat, polygon-curved, eight, custom-json)");
  }

  const ResidualStats stats = verify_config(*config, a.verify_dt);
  const Json doc = config_to_json(*config, make_meta(g, run), extra);
  write_text_file(a.out, canonical_dump(doc) + "\n");

  Json summary{{"command", "gen"},
               {"kind", a.kind},
               {"out", a.out},
               {"residual", residual_to_json(stats)},
               {"analytic_residual", config_residual(*config)},
               {"residual_ok", stats.below(g.tol.residual_abs)}};
  if (config->space.is_curved()) {
    summary["constraint_drift"] = config_constraint_drift(*config);
    summary["great_circle"] = doc["flags"].value("great_circle", false);
  }
  if (extra.contains("search")) summary["search"] = extra["search"];
  emit(out, summary);
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out) {
  const ChoreographyConfig config = config_from_json(read_json_file(a.config));
  if (!(a.periods >= 0.0)) throw DomainError("--periods must be non-negative");
  if (!(a.dt > 0.0)) throw DomainError("--dt must be positive");
  const bool curved = config.space.is_curved();
  const Scheme scheme = parse_scheme(a.scheme, curved);
  const double span = a.periods * config.path.period();
  const double exact = span / a.dt;
  const auto steps = static_cast<std::size_t>(std::llround(exact));
  if (std::abs(exact - static_cast<double>(steps)) > 1e-9 * std::max(1.0, exact)) {
    throw ContractError("--periods times the loop period must be a whole number of --dt steps");
  }
  const Model model = config.model();
  const Trajectory traj = integrate(config.state(0.0), model, a.dt, steps, scheme);

  const SystemState& first = traj.states.front();
  const SystemState& last = traj.states.back();
  const double closure =
      std::sqrt((last.q - first.q).squaredNorm() + (last.v - first.v).squaredNorm());
  Json run{{"command", "simulate"}, {"dt", a.dt}, {"periods", a.periods}, {"scheme", a.scheme}};
  write_text_file(a.out, canonical_dump(trajectory_to_json(traj, make_meta(g, run))) + "\n");

  Json summary{{"command", "simulate"}, {"out", a.out}, {"states", traj.states.size()}, {"closure_error", closure}};
  if (curved) {
    summary["constraint_drift"] = constraint_drift(traj);
  } else {
    const double e0 = energy(model, first);
    double drift = 0.0;
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(energy(model, s) - e0));
    summary["energy_drift"] = drift;
  }
  emit(out, summary);
  return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out) {
  const ChoreographyConfig config = config_from_json(read_json_file(a.config));
  AnalysisOptions opt;
  opt.samples = a.samples;
  opt.tol = g.tol;
  const bool any = a.modes || a.span || a.nullspace || a.symmetry || a.verdict;
  opt.modes = any ? a.modes : true;
  opt.span = any ? a.span : true;
  opt.nullspace = any ? a.nullspace : true;
  opt.verdict = any ? a.verdict : true;
  opt.symmetry = a.symmetry;
  const AnalysisReport report = analyze(config, opt);

  Json run{{"command", "analyze"},
           {"modes", opt.modes},
           {"span", opt.span},
           {"nullspace", opt.nullspace},
           {"symmetry", opt.symmetry},
           {"verdict", opt.verdict},
           {"samples", opt.samples}};
  const Json doc = report_to_json(report, make_meta(g, run));
  if (!a.csv.empty()) write_text_file(a.csv, mode_table_csv(report));

  const bool consistent = !report.verdict || report.verdict->consistent;
  if (a.out.empty()) {
    out << canonical_dump(doc) << '\n';
  } else {
    write_text_file(a.out, canonical_dump(doc) + "\n");
    emit(out, Json{{"command", "analyze"},
                   {"out", a.out},
                   {"d", doc["d"]},
                   {"nullspace_dim", report.nullspace ? Json(report.nullspace->nullspace_dim) : Json(nullptr)},
                   {"verdict", doc["verdict"]},
                   {"prediction_consistent", doc["prediction_consistent"]},
                   {"warnings", report.warnings}});
  }
  return consistent ? kExitOk : kExitFail;
}

int cmd_verify(const VerifyArgs& a, const Globals& g, std::ostream& out) {
  const Json doc = read_json_file(a.input);
  const std::string kind = doc.is_object() ? doc.value("kind", "") : "";
  Json summary{{"command", "verify"}, {"input", a.input}, {"kind", kind}, {"tolerance", tolerance_json(g.tol)}};
  bool pass = false;
  if (kind == "choreography_config") {
    const ChoreographyConfig config = config_from_json(doc);
    const ResidualStats stats = verify_config(config, a.dt);
    summary["residual"] = residual_to_json(stats);
    pass = stats.below(g.tol.residual_abs);
    if (config.space.is_curved()) {
      const double drift = config_constraint_drift(config);
      summary["constraint_drift"] = drift;
      pass = pass && drift < g.tol.constraint_abs;
    }
  } else if (kind == "trajectory") {
    const Trajectory traj = trajectory_from_json(doc);
    const ResidualStats stats = verify_solution(traj);
    summary["residual"] = residual_to_json(stats);
    pass = stats.below(g.tol.residual_abs);
    if (traj.model.space.is_curved()) {
      const double drift = constraint_drift(traj);
      summary["constraint_drift"] = drift;
      pass = pass && drift < g.tol.constraint_abs;
    }
  } else {
    throw ParseError("input kind must be 'choreography_config' or 'trajectory'");
  }
  summary["pass"] = pass;
  emit(out, summary);
  return pass ? kExitOk : kExitFail;
}

void apply_threads(int flag) {
  int threads = flag;
  if (threads <= 0) {
    if (const char* env = std::getenv("CHOREO_THREADS")) threads = std::atoi(env);
  }
  set_thread_count(threads);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equally spaced choreographies: generate, simulate, analyze and verify"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (default: CHOREO_THREADS or all cores)");
  app.add_option("--seed", g.seed, "Seed for stochastic searches");
  app.add_option("--rank-rel", g.tol.rank_rel, "Relative singular value cutoff");
  app.add_option("--residual-abs", g.tol.residual_abs, "Residual threshold for verification");
  app.add_option("--constraint-abs", g.tol.constraint_abs, "Manifold constraint threshold");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a choreography config");
  gen_cmd->add_option("kind", gen.kind, "polygon-flat | polygon-curved | eight | custom-json")->required();
  gen_cmd->add_option("--n", gen.n, "Number of bodies");
  gen_cmd->add_option("--radius", gen.radius, "Flat polygon radius");
  gen_cmd->add_option("--z", gen.z, "Curved polygon height");
  gen_cmd->add_option("--sigma", gen.sigma, "Curvature sign (1 sphere, -1 hyperboloid)");
  gen_cmd->add_option("--central-mass", gen.central_mass, "Fixed-center mass in body-mass units");
  gen_cmd->add_option("--force", gen.force, "Force law terms coefficient:exponent,...");
  gen_cmd->add_option("--masses", gen.masses, "Comma-separated masses for the eight search");
  gen_cmd->add_option("--order", gen.order, "Fourier order of the eight search");
  gen_cmd->add_option("--iterations", gen.iterations, "Iteration cap of the eight search");
  gen_cmd->add_option("--input", gen.input, "Config to re-emit (custom-json)");
  gen_cmd->add_option("--verify-dt", gen.verify_dt, "Step of the verification trajectory");
  gen_cmd->add_option("--out", gen.out, "Output config file")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate a config from t = 0");
  sim_cmd->add_option("--config", sim.config, "Config file")->required();
  sim_cmd->add_option("--dt", sim.dt, "Time step");
  sim_cmd->add_option("--periods", sim.periods, "Number of loop periods");
  sim_cmd->add_option("--scheme", sim.scheme, "rk4 | verlet | rk4_projected | auto");
  sim_cmd->add_option("--out", sim.out, "Output trajectory file")->required();

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Mode, span, nullspace, symmetry and verdict analysis");
  an_cmd->add_option("--config", an.config, "Config file")->required();
  an_cmd->add_flag("--modes", an.modes, "Mode residual table");
  an_cmd->add_flag("--span", an.span, "Span dimension");
  an_cmd->add_flag("--nullspace", an.nullspace, "Mass feasibility nullspace");
  an_cmd->add_flag("--symmetry", an.symmetry, "Reflection pair identities");
  an_cmd->add_flag("--verdict", an.verdict, "Theorem verdict");
  an_cmd->add_option("--samples", an.samples, "Samples per period");
  an_cmd->add_option("--out", an.out, "Report file (default: standard output)");
  an_cmd->add_option("--csv", an.csv, "Mode table CSV file");

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Check a config or trajectory against the equations of motion");
  ver_cmd->add_option("--input", ver.input, "Config or trajectory file")->required();
  ver_cmd->add_option("--dt", ver.dt, "Step of the verification trajectory for configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    g.tol.validate();
    apply_threads(g.threads);
    if (*gen_cmd) return cmd_gen(gen, g, out);
    if (*sim_cmd) return cmd_simulate(sim, g, out);
    if (*an_cmd) return cmd_analyze(an, g, out);
    if (*ver_cmd) return cmd_verify(ver, g, out);
  } catch (const CollisionError& e) {
    err << "collision: " << e.what() << '\n';
    return kExitFail;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace choreo
