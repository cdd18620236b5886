#include "choreo/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace choreo {
namespace {

void dump_into(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::null:
    case Json::value_t::discarded:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      break;
    case Json::value_t::number_float: {
      double x = v.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        break;
      }
      if (x == 0.0) x = 0.0;  // drop the sign of -0
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      break;
    }
    case Json::value_t::string:
      out += v.dump();
      break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ',';
        first = false;
        dump_into(e, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::binary:
      throw Error("binary JSON values are not supported");
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string("field '") + what + "' must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("field '") + what + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number(e, what));
  return out;
}

Json vec_json(const Eigen::Ref<const Vec>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json columns_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(vec_json(m.col(c)));
  return a;
}

Positions columns_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string("field '") + what + "' must be a non-empty array");
  const auto first = numbers(j[0], what);
  Positions out(static_cast<Eigen::Index>(first.size()), static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const auto col = numbers(j[c], what);
    if (col.size() != first.size()) throw ParseError(std::string("ragged vectors in '") + what + "'");
    for (std::size_t r = 0; r < col.size(); ++r) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
  }
  return out;
}

template <class F>
auto guarded(F fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

Json to_json(const Meta& meta) {
  return Json{{"tool_version", kToolVersion},
              {"seed", meta.seed},
              {"tolerances",
               {{"rank_rel", meta.tol.rank_rel},
                {"residual_abs", meta.tol.residual_abs},
                {"constraint_abs", meta.tol.constraint_abs}}},
              {"run", meta.run}};
}

Json to_json(const Space& space) {
  if (space.is_curved()) return Json{{"type", "curved"}, {"sigma", space.sigma()}};
  return Json{{"type", "flat"}, {"dim", space.ambient_dim()}};
}

Space space_from_json(const Json& j) {
  return guarded([&] {
    const std::string type = field(j, "type").get<std::string>();
    if (type == "flat") {
      const int dim = field(j, "dim").get<int>();
      if (dim < 1) throw ParseError("flat dimension must be positive");
      return Space::flat(dim);
    }
    if (type == "curved") {
      const int sigma = field(j, "sigma").get<int>();
      if (sigma != 1 && sigma != -1) throw ParseError("sigma must be +1 or -1");
      return Space::curved(sigma);
    }
    throw ParseError("space type must be 'flat' or 'curved'");
  });
}

Json to_json(const ForceLaw& force) {
  Json a = Json::array();
  for (const auto& t : force.terms()) a.push_back(Json::array({t.coefficient, t.exponent}));
  return a;
}

ForceLaw force_from_json(const Json& j) {
  return guarded([&] {
    if (!j.is_array()) throw ParseError("force must be an array of [coefficient, exponent] pairs");
    std::vector<PowerTerm> terms;
    for (const auto& t : j) {
      const auto pair = numbers(t, "force");
      if (pair.size() != 2) throw ParseError("force terms must be [coefficient, exponent] pairs");
      terms.push_back({pair[0], pair[1]});
    }
    return ForceLaw(std::move(terms));
  });
}

Json to_json(const FourierPath& path) {
  Json coeffs = Json::array();
  for (int d = 0; d < path.dim(); ++d) {
    Json a = Json::array();
    Json b = Json::array();
    for (int m = 1; m <= path.order(); ++m) {
      a.push_back(path.cos_coeff(d, m));
      b.push_back(path.sin_coeff(d, m));
    }
    coeffs.push_back(Json::array({path.cos_coeff(d, 0), a, b}));
  }
  return Json{{"dim", path.dim()}, {"period", path.period()}, {"order", path.order()}, {"coeffs", coeffs}};
}

FourierPath path_from_json(const Json& j) {
  return guarded([&] {
    const int dim = field(j, "dim").get<int>();
    const double period = number(field(j, "period"), "period");
    const int order = field(j, "order").get<int>();
    const Json& coeffs = field(j, "coeffs");
    if (dim < 1 || order < 0 || !(period > 0.0)) throw ParseError("invalid path header");
    if (!coeffs.is_array() || coeffs.size() != static_cast<std::size_t>(dim)) {
      throw ParseError("path coeffs must hold one entry per dimension");
    }
    FourierPath path(dim, period, order);
    for (int d = 0; d < dim; ++d) {
      const Json& c = coeffs[static_cast<std::size_t>(d)];
      if (!c.is_array() || c.size() != 3) throw ParseError("path coeffs entries are [a0, [a...], [b...]]");
      const auto a = numbers(c[1], "coeffs");
      const auto b = numbers(c[2], "coeffs");
      if (a.size() != static_cast<std::size_t>(order) || b.size() != static_cast<std::size_t>(order)) {
        throw ParseError("path coefficient lists must have 'order' entries");
      }
      path.cos_coeff(d, 0) = number(c[0], "coeffs");
      for (int m = 1; m <= order; ++m) {
        path.cos_coeff(d, m) = a[static_cast<std::size_t>(m - 1)];
        path.sin_coeff(d, m) = b[static_cast<std::size_t>(m - 1)];
      }
    }
    return path;
  });
}

Json config_to_json(const ChoreographyConfig& config, const Meta& meta, const Json& extra) {
  Json j = extra.is_object() ? extra : Json::object();
  j["kind"] = "choreography_config";
  j["path"] = to_json(config.path);
  j["offsets"] = Json{{"h", config.offsets.values()}, {"equally_spaced", config.offsets.is_equally_spaced()}};
  j["masses"] = config.masses.values();
  j["space"] = to_json(config.space);
  j["force"] = to_json(config.force);
  j["central_mass"] = config.central_mass;
  Json flags = j.contains("flags") ? j["flags"] : Json::object();
  if (config.space.is_curved()) {
    flags["great_circle"] = config.space.sigma() == 1 && great_circle_test(config);
  }
  j["flags"] = flags;
  j["meta"] = to_json(meta);
  return j;
}

ChoreographyConfig config_from_json(const Json& j) {
  return guarded([&] {
    if (j.contains("kind") && j["kind"] != "choreography_config") {
      throw ParseError("expected kind 'choreography_config'");
    }
    const Json& offsets = field(j, "offsets");
    ChoreographyConfig config{
        .path = path_from_json(field(j, "path")),
        .offsets = PhaseOffsets(numbers(field(offsets, "h"), "h"), field(offsets, "equally_spaced").get<bool>()),
        .masses = MassVector(numbers(field(j, "masses"), "masses")),
        .space = space_from_json(field(j, "space")),
        .force = j.contains("force") ? force_from_json(j["force"]) : ForceLaw::classical(),
        .central_mass = j.contains("central_mass") ? number(j["central_mass"], "central_mass") : 0.0};
    config.check();
    return config;
  });
}

Json trajectory_to_json(const Trajectory& traj, const Meta& meta) {
  Json states = Json::array();
  for (const auto& s : traj.states) states.push_back(Json::array({columns_json(s.q), columns_json(s.v)}));
  return Json{{"kind", "trajectory"},
              {"n", traj.model.bodies()},
              {"space", to_json(traj.model.space)},
              {"dt", traj.step},
              {"t0", traj.states.empty() ? 0.0 : traj.states.front().time},
              {"masses", traj.model.masses.values()},
              {"force", to_json(traj.model.force)},
              {"central_mass", traj.model.central_mass},
              {"states", states},
              {"meta", to_json(meta)}};
}

Trajectory trajectory_from_json(const Json& j) {
  return guarded([&] {
    if (j.contains("kind") && j["kind"] != "trajectory") throw ParseError("expected kind 'trajectory'");
    Model model{.masses = MassVector(numbers(field(j, "masses"), "masses")),
                .force = j.contains("force") ? force_from_json(j["force"]) : ForceLaw::classical(),
                .space = space_from_json(field(j, "space")),
                .central_mass = j.contains("central_mass") ? number(j["central_mass"], "central_mass") : 0.0};
    const double dt = number(field(j, "dt"), "dt");
    const double t0 = j.contains("t0") ? number(j["t0"], "t0") : 0.0;
    if (!(dt > 0.0)) throw ParseError("trajectory dt must be positive");
    Trajectory traj{.states = {}, .step = dt, .model = model};
    const Json& states = field(j, "states");
    if (!states.is_array()) throw ParseError("states must be an array");
    for (std::size_t i = 0; i < states.size(); ++i) {
      const Json& s = states[i];
      if (!s.is_array() || s.size() != 2) throw ParseError("each state is [positions, velocities]");
      SystemState state{columns_from_json(s[0], "states"), columns_from_json(s[1], "states"),
                        t0 + dt * static_cast<double>(i)};
      if (state.q.cols() != static_cast<Eigen::Index>(model.bodies()) || state.v.cols() != state.q.cols() ||
          state.v.rows() != state.q.rows() || state.q.rows() != model.space.ambient_dim()) {
        throw ParseError("state shape does not match the masses and space");
      }
      traj.states.push_back(std::move(state));
    }
    return traj;
  });
}

Json residual_to_json(const ResidualStats& stats) {
  Json j{{"max", stats.max}, {"mean", stats.mean}, {"samples", stats.samples}};
  j["energy_drift"] = stats.energy_drift ? Json(*stats.energy_drift) : Json(nullptr);
  return j;
}

Json report_to_json(const AnalysisReport& r, const Meta& meta) {
  Json j;
  j["kind"] = "analysis_report";
  j["n"] = r.n;
  j["space"] = to_json(r.space);
  j["central_mass"] = r.central_mass;
  j["solution_residual"] = r.solution_residual;
  if (r.span) {
    j["d"] = r.span->d;
    Json hist = Json::object();
    for (const auto& [rank, frac] : r.span->histogram) hist[std::to_string(rank)] = frac;
    j["rank_histogram"] = hist;
  } else {
    j["d"] = nullptr;
    j["rank_histogram"] = nullptr;
  }
  const bool curved = r.space.is_curved();
  Json modes = Json::array();
  for (const auto& m : r.modes) {
    Json e{{"l", m.l}, {"with_f", m.with_f}};
    e["without_f"] = curved ? Json(nullptr) : Json(m.without_f);
    if (!m.sine_with_f.empty()) {
      e["sine_with_f"] = m.sine_with_f;
      e["sine_without_f"] = m.sine_without_f;
    }
    modes.push_back(e);
  }
  j["modes"] = modes;
  if (r.nullspace) {
    const auto& ns = *r.nullspace;
    j["nullspace"] = Json{{"dim", ns.nullspace_dim},
                          {"basis", columns_json(ns.basis)},
                          {"singular_values", vec_json(ns.singular_values)},
                          {"classification", ns.classification},
                          {"spectral_gap", ns.spectral_gap},
                          {"rows", ns.rows}};
  } else {
    j["nullspace"] = nullptr;
  }
  j["flags"] = Json{{"simplex", r.simplex}, {"great_circle", r.great_circle}, {"collinear", r.collinear}};
  if (r.verdict) {
    j["verdict"] = r.verdict->text;
    j["prediction"] = Json{{"has_prediction", r.verdict->has_prediction},
                           {"allowed_basis", r.verdict->has_prediction ? columns_json(r.verdict->allowed) : Json(nullptr)}};
    j["prediction_consistent"] = r.verdict->consistent;
  } else {
    j["verdict"] = nullptr;
    j["prediction"] = nullptr;
    j["prediction_consistent"] = nullptr;
  }
  Json sym = Json::array();
  for (const auto& s : r.symmetry) {
    sym.push_back(Json{{"k", s.k},
                       {"l", s.l},
                       {"residuals", Json::array({s.residuals[0], s.residuals[1], s.residuals[2], s.residuals[3]})},
                       {"implied_difference_with_f", s.implied_difference_with_f},
                       {"implied_difference_without_f", s.implied_difference_without_f},
                       {"certificate", s.certificate},
                       {"axis", {{"theta", s.axis.theta}, {"tau", s.axis.tau}, {"residual", s.axis.residual}}}});
  }
  j["symmetry"] = sym;
  j["excluded_samples"] = r.excluded;
  j["warnings"] = r.warnings;
  j["meta"] = to_json(meta);
  return j;
}

std::string mode_table_csv(const AnalysisReport& report) {
  std::string out = "l,with_f,without_f\n";
  const bool curved = report.space.is_curved();
  char buf[96];
  for (const auto& m : report.modes) {
    if (curved) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,\n", m.l, m.with_f);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", m.l, m.with_f, m.without_f);
    }
    out += buf;
  }
  return out;
}

}  // namespace choreo
