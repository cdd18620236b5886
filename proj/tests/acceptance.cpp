// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "choreo/action.hpp"
#include "choreo/analysis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace choreo;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += failures.empty() ? " | failed: " : ", ";
      failures += what;
    }
  }
};

struct CurvedCase {
  int sigma;
  int n;
  double z;
};

const CurvedCase kCurved[] = {{1, 3, 0.0}, {1, 3, 0.5}, {1, 4, 0.5}, {1, 5, 0.3}, {-1, 3, 1.2}, {-1, 5, 1.5}};

std::string label(const CurvedCase& c) {
  std::ostringstream os;
  os << "(sigma=" << c.sigma << ",n=" << c.n << ",z=" << c.z << ")";
  return os.str();
}

const ChoreographyConfig& eight32() {
  static const ChoreographyConfig cfg = [] {
    ActionOptions opt;
    opt.order = 32;
    return minimize_action(3, MassVector::equal(3), ForceLaw::classical(), Ansatz::kEight, opt).config;
  }();
  return cfg;
}

Outcome constructors() {
  Outcome o;
  double worst = 0.0;
  double slowest = 0.0;
  for (int n = 2; n <= 8; ++n) {
    const auto start = Clock::now();
    const double r = verify_config(polygon_flat(n, 1.0, ForceLaw::classical()).config).max;
    const double s = seconds_since(start);
    worst = std::max(worst, r);
    slowest = std::max(slowest, s);
    o.require(r < 1e-8, "flat n=" + std::to_string(n));
    o.require(s < 5.0, "flat n=" + std::to_string(n) + " time");
  }
  for (const auto& c : kCurved) {
    const auto start = Clock::now();
    const double r = verify_config(polygon_curved(c.n, c.z, c.sigma).config).max;
    const double s = seconds_since(start);
    worst = std::max(worst, r);
    slowest = std::max(slowest, s);
    o.require(r < 1e-8, "curved " + label(c));
    o.require(s < 5.0, "curved " + label(c) + " time");
  }
  o.detail << "max residual " << worst << ", slowest run " << slowest << " s";
  return o;
}

Outcome identity_suite() {
  Outcome o;
  double flat = 0.0;
  for (int n = 2; n <= 8; ++n) {
    for (double central : {0.0, 1.0}) {
      const ChoreographyConfig c = polygon_flat(n, 1.0, ForceLaw::classical(), central).config;
      for (long k = 0; k < n; ++k) {
        const IdentityNorms r = lemma1_residual(c, k);
        flat = std::max({flat, r.with_f, r.without_f});
      }
    }
  }
  double curved = 0.0;
  for (const auto& cc : kCurved) {
    const ChoreographyConfig c = polygon_curved(cc.n, cc.z, cc.sigma).config;
    for (long k = 0; k < cc.n; ++k) curved = std::max(curved, lemma3_residual(c, k));
  }
  o.require(flat < 1e-10, "flat identities");
  o.require(curved < 1e-10, "curved identities");
  o.detail << "flat max " << flat << ", curved max " << curved;
  return o;
}

Outcome linearity_bridge() {
  Outcome o;
  const int n = 5;
  const ChoreographyConfig poly = polygon_flat(n, 1.0, ForceLaw::classical()).config;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  const SampleGrid grid = sample_grid(poly);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> m(n);
    for (auto& x : m) x = u(gen);
    ChoreographyConfig c = poly;
    c.masses = MassVector(m);
    const ModeCoefficients a = mass_modes(c.masses);
    for (double t : grid.times) {
      std::vector<ModeVectors> w;
      for (int l = 1; l < n; ++l) w.push_back(mode_vectors_flat(c, l, t));
      for (long k = 0; k < n; ++k) {
        CVec with = CVec::Zero(2), without = CVec::Zero(2);
        for (int l = 1; l < n; ++l) {
          const cplx coeff = a.at(l) * root_power(n, l, k + 1) / std::sqrt(static_cast<double>(n));
          with += coeff * w[l - 1].with_f;
          without += coeff * w[l - 1].without_f;
        }
        const IdentityVectors v = lemma1_vectors(c, k, t);
        worst = std::max({worst, (with.real() - v.with_f).norm(), (without.real() - v.without_f).norm(),
                          with.imag().norm(), without.imag().norm()});
      }
    }
  }
  o.require(worst < 1e-10, "pointwise mismatch");
  o.detail << "100 mass vectors x " << grid.times.size() << " samples x 5 shifts, max mismatch " << worst;
  return o;
}

void nullspace_check(Outcome& o, const std::string& name, const ChoreographyConfig& c, int expect_d) {
  const auto start = Clock::now();
  const AnalysisReport r = analyze(c);
  const double s = seconds_since(start);
  const auto& ns = *r.nullspace;
  o.require(r.span->d == expect_d, name + " d=" + std::to_string(r.span->d));
  o.require(ns.nullspace_dim == 0, name + " nullspace dim " + std::to_string(ns.nullspace_dim));
  o.require(ns.spectral_gap >= 1e3, name + " spectral gap");
  o.require(r.verdict->has_prediction && r.verdict->consistent, name + " verdict");
  o.require(s < 30.0, name + " time");
  o.detail << name << ": d=" << r.span->d << " dim=" << ns.nullspace_dim << " gap=" << ns.spectral_gap << " ("
           << s << " s); ";
}

Outcome flat_nullspace() {
  Outcome o;
  for (int n : {3, 4, 5}) {
    nullspace_check(o, "polygon n=" + std::to_string(n), polygon_flat(n, 1.0, ForceLaw::classical()).config, 2);
  }
  nullspace_check(o, "eight", eight32(), 2);
  return o;
}

Outcome curved_modes() {
  Outcome o;
  double weakest = 1e300;
  for (const auto& c : kCurved) {
    const ChoreographyConfig cfg = polygon_curved(c.n, c.z, c.sigma).config;
    const bool gc = great_circle_test(cfg);
    o.require(gc == (c.sigma == 1 && c.z == 0.0), "great circle " + label(c));
    if (gc) continue;
    std::vector<int> ls;
    for (int l = 1; l < c.n; ++l) {
      if (c.n == 4 && l == 2) continue;
      ls.push_back(l);
    }
    for (int l : ls) {
      const double r = mode_residual_curved(cfg, l);
      weakest = std::min(weakest, r);
      o.require(r > 1e-4, label(c) + " l=" + std::to_string(l));
    }
    const AnalysisReport rep = analyze(cfg);
    o.require(rep.verdict->consistent, label(c) + " verdict");
    if (c.n != 4) o.require(rep.nullspace->nullspace_dim == 0, label(c) + " nullspace");
  }
  o.detail << "smallest certifying mode norm " << weakest << "; great circle only for the equator";
  return o;
}

Outcome fixed_center() {
  Outcome o;
  double worst = 0.0;
  for (int n : {3, 4, 5}) {
    const ChoreographyConfig c = polygon_flat(n, 1.0, ForceLaw::classical(), 1.0).config;
    const double r = verify_config(c).max;
    worst = std::max(worst, r);
    o.require(r < 1e-8, "flat n=" + std::to_string(n) + " residual");
    const AnalysisReport rep = analyze(c);
    o.require(rep.nullspace->nullspace_dim == 0, "flat n=" + std::to_string(n) + " nullspace");
    o.require(rep.verdict->consistent, "flat n=" + std::to_string(n) + " verdict");
  }
  for (const CurvedCase c : {CurvedCase{1, 3, 0.5}, CurvedCase{1, 4, 0.5}, CurvedCase{1, 5, 0.3},
                             CurvedCase{-1, 3, 1.2}, CurvedCase{-1, 5, 1.5}}) {
    const ChoreographyConfig cfg = polygon_curved(c.n, c.z, c.sigma, 1.0).config;
    const double r = verify_config(cfg).max;
    worst = std::max(worst, r);
    o.require(r < 1e-8, "curved " + label(c) + " residual");
    for (int l = 1; l < c.n; ++l) {
      if (c.n == 4 && l == 2) continue;
      o.require(mode_residual_curved(cfg, l) > 1e-4, "curved " + label(c) + " l=" + std::to_string(l));
    }
    const AnalysisReport rep = analyze(cfg);
    o.require(rep.verdict->consistent, "curved " + label(c) + " verdict");
    if (c.n != 4) o.require(rep.nullspace->nullspace_dim == 0, "curved " + label(c) + " nullspace");
  }
  o.detail << "max residual " << worst << "; nullspace conclusions match the free-center cases";
  return o;
}

Outcome reflection_identities() {
  Outcome o;
  const ChoreographyConfig& e8 = eight32();
  const auto axis = detect_symmetry_axis(e8.path);
  o.require(axis.has_value(), "symmetry axis");
  if (!axis) return o;
  double equal_worst = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = k + 1; l < 3; ++l)
      for (double r : symmetry_identities(e8, k, l).residuals) equal_worst = std::max(equal_worst, r);
  ChoreographyConfig heavy = e8;
  heavy.masses = MassVector({1.1, 1.0, 1.0});
  double perturbed_worst = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = k + 1; l < 3; ++l)
      for (double r : symmetry_identities(heavy, k, l).residuals) perturbed_worst = std::max(perturbed_worst, r);
  o.require(equal_worst < 1e-3, "equal-mass identities");
  o.require(perturbed_worst > 1e-2, "perturbed identities");
  o.detail << "axis theta=" << axis->theta << " tau=" << axis->tau << "; equal masses max " << equal_worst
           << ", one mass +10% max " << perturbed_worst;
  return o;
}

Outcome hygiene() {
  Outcome o;
  double dft = 0.0;
  for (int n = 2; n <= 64; ++n) {
    const SpectralBasis b = dft_basis(n);
    dft = std::max(dft, (b.vectors.adjoint() * b.vectors - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  o.require(dft < 1e-13, "dft orthonormality");

  const ActionFunctional a(MassVector::equal(3), ForceLaw::classical(), Ansatz::kEight, 8, 256);
  FourierPath p(2, 3.0, 8);
  p.sin_coeff(0, 1) = 1.0;
  p.sin_coeff(1, 2) = 0.5;
  Vec x = a.parameters(p);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> g(0.0, 0.02);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += g(gen);
  Vec grad;
  a.value_and_gradient(x, grad);
  Vec fd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5;
    Vec xp = x, xm = x, xp2 = x, xm2 = x;
    xp(i) += h;
    xm(i) -= h;
    xp2(i) += 2 * h;
    xm2(i) -= 2 * h;
    fd(i) = (-a.value(xp2) + 8 * a.value(xp) - 8 * a.value(xm) + a.value(xm2)) / (12 * h);
  }
  const double grad_err = (grad - fd).norm() / grad.norm();
  o.require(grad_err < 1e-6, "action gradient");

  // Two unit masses on an eccentric ellipse.
  Positions q(2, 2), v(2, 2);
  q << -0.5, 0.5, 0.0, 0.0;
  v << 0.0, 0.0, -0.5, 0.5;
  const Model model{.masses = MassVector::equal(2)};
  auto drift = [&](double dt) {
    const auto steps = static_cast<std::size_t>(std::llround(2.4 / dt));
    const Trajectory t = integrate(SystemState{q, v, 0.0}, model, dt, steps, Scheme::kRk4);
    const double e0 = energy(model, t.states.front());
    double worst = 0.0;
    for (const auto& s : t.states) worst = std::max(worst, std::abs(energy(model, s) - e0));
    return worst;
  };
  const double ratio = drift(0.01) / drift(0.005);
  o.require(ratio >= 12.0, "energy drift ratio");

  double constraint = 0.0;
  for (const auto& c : kCurved) {
    const ChoreographyConfig cfg = polygon_curved(c.n, c.z, c.sigma).config;
    const auto steps = static_cast<std::size_t>(std::llround(cfg.path.period() / 1e-3));
    const Trajectory t = integrate(cfg.state(0.0), cfg.model(), 1e-3, steps, Scheme::kRk4Projected);
    constraint = std::max(constraint, constraint_drift(t));
  }
  o.require(constraint < 1e-8, "constraint drift");
  o.detail << "dft " << dft << ", gradient rel err " << grad_err << ", drift ratio " << ratio
           << ", constraint drift " << constraint;
  return o;
}

Outcome search() {
  Outcome o;
  ActionOptions opt;
  opt.order = 12;
  opt.seed = 0;
  const auto start = Clock::now();
  const ActionResult a = minimize_action(3, MassVector::equal(3), ForceLaw::classical(), Ansatz::kEight, opt);
  const double s = seconds_since(start);
  const ActionResult b = minimize_action(3, MassVector::equal(3), ForceLaw::classical(), Ansatz::kEight, opt);
  const bool same = a.config.path == b.config.path && a.history == b.history;
  o.require(a.residual.max < 1e-4, "residual below 1e-4");
  o.require(s < 60.0, "time");
  o.require(same, "determinism");
  o.detail << "order 12: residual " << a.residual.max << ", action " << a.action << ", " << a.iterations
           << " iterations, " << s << " s, deterministic " << (same ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"constructor soundness", constructors},
      {"identity suite", identity_suite},
      {"linearity bridge", linearity_bridge},
      {"flat nullspace desk check", flat_nullspace},
      {"curved mode desk check", curved_modes},
      {"fixed-center variants", fixed_center},
      {"reflection pair identities", reflection_identities},
      {"numerical hygiene", hygiene},
      {"eight search reproduction", search},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s%s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str(),
                o.failures.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
