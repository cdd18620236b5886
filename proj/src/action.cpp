#include "choreo/action.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace choreo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

Ansatz parse_ansatz(const std::string& name) {
  if (name == "eight") return Ansatz::kEight;
  if (name == "free") return Ansatz::kFree;
  throw DomainError("unknown ansatz '" + name + "' (expected eight or free)");
}

std::string to_string(Ansatz ansatz) { return ansatz == Ansatz::kEight ? "eight" : "free"; }

ActionFunctional::ActionFunctional(MassVector masses, ForceLaw force, Ansatz ansatz, int order,
                                   int quadrature_points)
    : masses_(std::move(masses)),
      force_(std::move(force)),
      ansatz_(ansatz),
      order_(order),
      points_(quadrature_points),
      period_(static_cast<double>(masses_.size())) {
  if (masses_.size() < 2) throw DomainError("action search needs at least two bodies");
  if (order_ < 1) throw DomainError("action order must be positive");
  if (points_ < 4 * order_) throw DomainError("too few quadrature points for the order");
  force_.require_valid();

  for (int d = 0; d < 2; ++d) {
    for (int m = 1; m <= order_; ++m) {
      if (ansatz_ == Ansatz::kEight) {
        if ((d == 0) == (m % 2 == 1)) slots_.push_back({d, m, true});
      } else {
        slots_.push_back({d, m, false});
        slots_.push_back({d, m, true});
      }
    }
  }
  dim_slots_.assign(2, {});
  for (std::size_t s = 0; s < slots_.size(); ++s) dim_slots_[static_cast<std::size_t>(slots_[s].dim)].push_back(static_cast<int>(s));

  const double w = 2.0 * std::numbers::pi / period_;
  const double h = period_ / points_;
  basis_.assign(masses_.size(), std::vector<Eigen::MatrixXd>(2));
  rate_.assign(2, {});
  for (int d = 0; d < 2; ++d) {
    const auto& ids = dim_slots_[static_cast<std::size_t>(d)];
    const auto cols = static_cast<Eigen::Index>(ids.size());
    rate_[static_cast<std::size_t>(d)] = Eigen::MatrixXd(points_, cols);
    for (std::size_t k = 0; k < masses_.size(); ++k) {
      Eigen::MatrixXd& b = basis_[k][static_cast<std::size_t>(d)];
      b.resize(points_, cols);
      for (int i = 0; i < points_; ++i) {
        const double t = h * i + static_cast<double>(k);
        for (Eigen::Index c = 0; c < cols; ++c) {
          const Slot& slot = slots_[static_cast<std::size_t>(ids[static_cast<std::size_t>(c)])];
          const double phase = w * slot.harmonic * std::remainder(t, period_);
          b(i, c) = slot.is_sin ? std::sin(phase) : std::cos(phase);
          if (k == 0) {
            const double wm = w * slot.harmonic;
            rate_[static_cast<std::size_t>(d)](i, c) =
                slot.is_sin ? wm * std::cos(phase) : -wm * std::sin(phase);
          }
        }
      }
    }
  }
}

double ActionFunctional::value(const Vec& params) const { return evaluate(params, nullptr); }

double ActionFunctional::value_and_gradient(const Vec& params, Vec& gradient) const {
  return evaluate(params, &gradient);
}

double ActionFunctional::evaluate(const Vec& params, Vec* gradient) const {
  if (params.size() != static_cast<Eigen::Index>(slots_.size())) {
    throw ContractError("parameter vector has the wrong length");
  }
  const std::size_t n = masses_.size();
  std::array<Vec, 2> coeffs;
  for (int d = 0; d < 2; ++d) {
    const auto& ids = dim_slots_[static_cast<std::size_t>(d)];
    coeffs[static_cast<std::size_t>(d)].resize(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t c = 0; c < ids.size(); ++c) {
      coeffs[static_cast<std::size_t>(d)](static_cast<Eigen::Index>(c)) = params(ids[c]);
    }
  }

  // Positions per body and dimension on the grid.
  std::vector<std::array<Vec, 2>> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t d = 0; d < 2; ++d) x[k][d] = basis_[k][d] * coeffs[d];
  }
  std::array<Vec, 2> rate;
  for (std::size_t d = 0; d < 2; ++d) rate[d] = rate_[d] * coeffs[d];

  const double h = period_ / points_;
  const double total = masses_.total();
  double kinetic = 0.0;
  for (std::size_t d = 0; d < 2; ++d) kinetic += 0.5 * total * rate[d].squaredNorm();

  std::vector<std::array<Vec, 2>> pull;
  if (gradient) pull.assign(n, {Vec::Zero(points_), Vec::Zero(points_)});
  double potential = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double mm = masses_[j] * masses_[k];
      for (int i = 0; i < points_; ++i) {
        const double dx = x[k][0](i) - x[j][0](i);
        const double dy = x[k][1](i) - x[j][1](i);
        const double r2 = dx * dx + dy * dy;
        if (r2 < kCollisionGuard) return kInf;
        potential += mm * force_.pair_potential(r2);
        if (gradient) {
          const double g = mm * force_(r2);
          pull[k][0](i) += g * dx;
          pull[k][1](i) += g * dy;
          pull[j][0](i) -= g * dx;
          pull[j][1](i) -= g * dy;
        }
      }
    }
  }

  if (gradient) {
    gradient->setZero(static_cast<Eigen::Index>(slots_.size()));
    for (std::size_t d = 0; d < 2; ++d) {
      Vec g = total * (rate_[d].transpose() * rate[d]);
      for (std::size_t k = 0; k < n; ++k) g -= basis_[k][d].transpose() * pull[k][d];
      const auto& ids = dim_slots_[d];
      for (std::size_t c = 0; c < ids.size(); ++c) (*gradient)(ids[c]) = h * g(static_cast<Eigen::Index>(c));
    }
  }
  return h * (kinetic - potential);
}

Vec ActionFunctional::harmonics() const {
  Vec out(static_cast<Eigen::Index>(slots_.size()));
  for (std::size_t s = 0; s < slots_.size(); ++s) out(static_cast<Eigen::Index>(s)) = slots_[s].harmonic;
  return out;
}

FourierPath ActionFunctional::path(const Vec& params) const {
  FourierPath out(2, period_, order_);
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const Slot& slot = slots_[s];
    if (slot.is_sin) {
      out.sin_coeff(slot.dim, slot.harmonic) = params(static_cast<Eigen::Index>(s));
    } else {
      out.cos_coeff(slot.dim, slot.harmonic) = params(static_cast<Eigen::Index>(s));
    }
  }
  return out;
}

Vec ActionFunctional::parameters(const FourierPath& path) const {
  if (path.dim() != 2) throw ContractError("action search is planar");
  Vec out = Vec::Zero(static_cast<Eigen::Index>(slots_.size()));
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const Slot& slot = slots_[s];
    if (slot.harmonic > path.order()) continue;
    out(static_cast<Eigen::Index>(s)) = slot.is_sin ? path.sin_coeff(slot.dim, slot.harmonic)
                                                    : path.cos_coeff(slot.dim, slot.harmonic);
  }
  return out;
}

namespace {

struct Descent {
  Vec x;
  double value = kInf;
  Vec gradient;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

// Limited-memory BFGS with Armijo backtracking. Rejected trial points never
// replace the iterate, so the accepted values are non-increasing.
// The iteration runs in the scaled variables z = m c (m the harmonic), where
// the kinetic Hessian is a multiple of the identity.
Descent lbfgs(const ActionFunctional& action, Vec x, const ActionOptions& options) {
  constexpr std::size_t kMemory = 12;
  constexpr double kArmijo = 1e-4;
  const Vec scale = action.harmonics();
  auto value_and_gradient = [&](const Vec& z, Vec& g) {
    const double v = action.value_and_gradient(z.cwiseQuotient(scale), g);
    if (std::isfinite(v)) g = g.cwiseQuotient(scale);
    return v;
  };
  Descent out;
  out.x = x.cwiseProduct(scale);
  out.value = value_and_gradient(out.x, out.gradient);
  if (!std::isfinite(out.value)) return out;
  out.history.push_back(out.value);
  const auto finish = [&]() {
    out.x = out.x.cwiseQuotient(scale);
    out.gradient = out.gradient.cwiseProduct(scale);
  };

  const auto small_gradient = [&](double tol) {
    return out.gradient.cwiseProduct(scale).lpNorm<Eigen::Infinity>() <
           tol * std::max(1.0, std::abs(out.value));
  };

  std::deque<std::pair<Vec, Vec>> memory;
  int stalled = 0;
  for (int it = 0; it < options.iterations; ++it) {
    out.iterations = it;
    if (small_gradient(options.gradient_tol) || stalled >= 5) {
      out.converged = small_gradient(options.stall_gradient_tol);
      finish();
      return out;
    }
    Vec dir = -out.gradient;
    {
      std::vector<double> alpha(memory.size());
      for (std::size_t i = memory.size(); i-- > 0;) {
        const auto& [s, y] = memory[i];
        alpha[i] = s.dot(dir) / y.dot(s);
        dir -= alpha[i] * y;
      }
      if (!memory.empty()) {
        const auto& [s, y] = memory.back();
        dir *= s.dot(y) / y.squaredNorm();
      }
      for (std::size_t i = 0; i < memory.size(); ++i) {
        const auto& [s, y] = memory[i];
        const double beta = y.dot(dir) / y.dot(s);
        dir += (alpha[i] - beta) * s;
      }
    }
    double slope = out.gradient.dot(dir);
    if (!(slope < 0.0)) {
      memory.clear();
      dir = -out.gradient;
      slope = -out.gradient.squaredNorm();
    }

    bool accepted = false;
    double step = memory.empty() ? std::min(1.0, 1.0 / out.gradient.norm()) : 1.0;
    for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
      Vec trial = out.x + step * dir;
      Vec trial_gradient;
      const double v = value_and_gradient(trial, trial_gradient);
      if (std::isfinite(v) && v < out.value && v <= out.value + kArmijo * step * slope) {
        stalled = out.value - v <= 1e-14 * std::abs(out.value) ? stalled + 1 : 0;
        Vec s = trial - out.x;
        Vec y = trial_gradient - out.gradient;
        if (s.dot(y) > 1e-16 * s.norm() * y.norm()) {
          memory.emplace_back(std::move(s), std::move(y));
          if (memory.size() > kMemory) memory.pop_front();
        }
        out.x = std::move(trial);
        out.gradient = std::move(trial_gradient);
        out.value = v;
        out.history.push_back(v);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (memory.empty()) {
        // No descent left at working precision.
        out.converged = small_gradient(options.stall_gradient_tol);
        finish();
        return out;
      }
      memory.clear();
    }
  }
  out.iterations = options.iterations;
  finish();
  return out;
}

Vec initial_guess(const ActionFunctional& action, std::mt19937_64& gen, double noise) {
  const int n = static_cast<int>(action.bodies());
  const double r = polygon_flat_radius_for_mass(n, action.force(), action.masses().mean());
  FourierPath seed(2, static_cast<double>(n), action.order());
  if (action.ansatz() == Ansatz::kEight) {
    seed.sin_coeff(0, 1) = r;
    if (action.order() >= 2) seed.sin_coeff(1, 2) = 0.5 * r;
  } else {
    seed.cos_coeff(0, 1) = r;
    seed.sin_coeff(1, 1) = r;
  }
  Vec x = action.parameters(seed);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += noise * r * (2.0 * uniform(gen) - 1.0);
  return x;
}

}  // namespace

ActionResult minimize_action(int n, const MassVector& masses, const ForceLaw& force, Ansatz ansatz,
                             const ActionOptions& options) {
  if (n < 2) throw DomainError("action search needs n >= 2");
  if (masses.size() != static_cast<std::size_t>(n)) throw ContractError("mass count does not match n");
  if (options.order < 4) throw DomainError("action search needs order >= 4");
  if (options.iterations < 1) throw DomainError("iteration budget must be positive");

  const ActionFunctional action(masses, force, ansatz, options.order, options.quadrature_points);
  std::mt19937_64 gen(options.seed);

  std::optional<Descent> best;
  int restarts = 0;
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    const double noise = options.seed_noise * (1 << std::min(attempt, 4));
    Descent run = lbfgs(action, initial_guess(action, gen, noise), options);
    if (!std::isfinite(run.value)) {
      ++restarts;
      continue;
    }
    best = std::move(run);
    break;
  }
  if (!best) {
    throw CollisionError("every action seed collided", 0, 1);
  }

  ChoreographyConfig config{.path = action.path(best->x),
                            .offsets = PhaseOffsets::equally_spaced(static_cast<std::size_t>(n)),
                            .masses = masses,
                            .space = Space::flat(2),
                            .force = force,
                            .central_mass = 0.0};
  config = recentre(config);

  ActionResult out{.config = std::move(config),
                   .action = best->value,
                   .gradient_norm = best->gradient.lpNorm<Eigen::Infinity>(),
                   .residual = {},
                   .converged = best->converged,
                   .iterations = best->iterations,
                   .restarts = restarts,
                   .history = std::move(best->history),
                   .warning = {}};
  out.residual = verify_config(out.config, options.verify_dt);
  if (!out.converged) {
    out.warning = "iteration budget exhausted before convergence; returning best iterate";
  }
  return out;
}

double polygon_action(const ChoreographyConfig& polygon) {
  if (polygon.space.is_curved()) throw ContractError("action is defined for flat configs");
  const double period = polygon.path.period();
  constexpr int kPoints = 512;
  const double h = period / kPoints;
  const Model model = polygon.model();
  double sum = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const SystemState s = polygon.state(h * i);
    double lagrangian = 0.0;
    for (Eigen::Index k = 0; k < s.q.cols(); ++k) {
      lagrangian += 0.5 * polygon.masses[static_cast<std::size_t>(k)] * s.v.col(k).squaredNorm();
      for (Eigen::Index j = 0; j < k; ++j) {
        lagrangian -= polygon.masses[static_cast<std::size_t>(j)] *
                      polygon.masses[static_cast<std::size_t>(k)] *
                      model.force.pair_potential((s.q.col(k) - s.q.col(j)).squaredNorm());
      }
      if (polygon.central_mass > 0.0) {
        lagrangian -= polygon.masses[static_cast<std::size_t>(k)] * polygon.central_mass *
                      model.force.pair_potential(s.q.col(k).squaredNorm());
      }
    }
    sum += lagrangian;
  }
  return h * sum;
}

}  // namespace choreo
