#include "choreo/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace choreo {
namespace {

void check_shape(const Positions& q, const MassVector& masses) {
  if (static_cast<std::size_t>(q.cols()) != masses.size()) {
    throw ContractError("position count does not match mass count");
  }
}

std::string pair_message(const char* what, Eigen::Index a, Eigen::Index b) {
  std::ostringstream os;
  os << what << " between bodies " << a << " and " << b;
  return os.str();
}

// Denominator (sigma - sigma c^2) for c = x . y, guarded.
double curved_gap(double c, int sigma) { return sigma * (1.0 - c * c); }

}  // namespace

Positions accel_flat(const Positions& q, const MassVector& masses, const ForceLaw& f) {
  check_shape(q, masses);
  const Eigen::Index n = q.cols();
  Positions a = Positions::Zero(q.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = k + 1; j < n; ++j) {
      const Vec d = q.col(j) - q.col(k);
      const double r2 = d.squaredNorm();
      if (r2 < kCollisionGuard) {
        throw CollisionError(pair_message("collision", k, j), static_cast<int>(k),
                             static_cast<int>(j));
      }
      const double w = f(r2);
      a.col(k) += masses[static_cast<std::size_t>(j)] * w * d;
      a.col(j) -= masses[static_cast<std::size_t>(k)] * w * d;
    }
  }
  return a;
}

Positions accel_flat_fixed_center(const Positions& q, const MassVector& masses, const ForceLaw& f,
                                  double central_mass) {
  Positions a = accel_flat(q, masses, f);
  if (central_mass == 0.0) return a;
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double r2 = q.col(k).squaredNorm();
    if (r2 < kCollisionGuard) {
      throw CollisionError(pair_message("collision with fixed center", k, -1),
                           static_cast<int>(k), -1);
    }
    a.col(k) -= central_mass * f(r2) * q.col(k);
  }
  return a;
}

Positions accel_curved(const Positions& q, const Positions& v, const MassVector& masses, int sigma) {
  check_shape(q, masses);
  if (q.rows() != 3 || v.rows() != 3 || v.cols() != q.cols()) {
    throw ContractError("curved dynamics needs 3-vectors for positions and velocities");
  }
  const Eigen::Index n = q.cols();
  Positions a(3, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec qk = q.col(k);
    Vec acc = -static_cast<double>(sigma) * odot(v.col(k), v.col(k), sigma) * qk;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == k) continue;
      const double c = odot(qk, q.col(j), sigma);
      const double gap = curved_gap(c, sigma);
      if (gap < kCollisionGuard) {
        throw CollisionError(pair_message("singular separation (collision or antipodal)", k, j),
                             static_cast<int>(k), static_cast<int>(j));
      }
      acc += masses[static_cast<std::size_t>(j)] * (q.col(j) - sigma * c * qk) /
             std::pow(gap, 1.5);
    }
    a.col(k) = acc;
  }
  return a;
}

Positions accel_curved_fixed_center(const Positions& q, const Positions& v,
                                    const MassVector& masses, int sigma, double central_mass) {
  Positions a = accel_curved(q, v, masses, sigma);
  if (central_mass == 0.0) return a;
  const Vec e = Vec::Unit(3, 2);
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double c = odot(q.col(k), e, sigma);
    const double gap = curved_gap(c, sigma);
    if (gap < kCollisionGuard) {
      throw CollisionError(pair_message("body at the fixed center", k, -1), static_cast<int>(k),
                           -1);
    }
    a.col(k) += central_mass * (e - sigma * c * q.col(k)) / std::pow(gap, 1.5);
  }
  return a;
}

Positions acceleration(const Model& model, const Positions& q, const Positions& v) {
  if (model.space.is_curved()) {
    return accel_curved_fixed_center(q, v, model.masses, model.space.sigma(), model.central_mass);
  }
  return accel_flat_fixed_center(q, model.masses, model.force, model.central_mass);
}

void project_to_manifold(Positions& q, Positions& v, int sigma) {
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double s = odot(q.col(k), q.col(k), sigma);
    q.col(k) /= std::sqrt(std::abs(s));
    if (sigma == -1 && q(2, k) < 0.0) q.col(k) = -q.col(k);
    v.col(k) -= sigma * odot(q.col(k), v.col(k), sigma) * q.col(k);
  }
}

namespace {

SystemState rk4_step(const Model& model, const SystemState& s, double dt) {
  const Positions k1v = acceleration(model, s.q, s.v);
  const Positions k1q = s.v;
  const Positions q2 = s.q + 0.5 * dt * k1q;
  const Positions v2 = s.v + 0.5 * dt * k1v;
  const Positions k2v = acceleration(model, q2, v2);
  const Positions q3 = s.q + 0.5 * dt * v2;
  const Positions v3 = s.v + 0.5 * dt * k2v;
  const Positions k3v = acceleration(model, q3, v3);
  const Positions q4 = s.q + dt * v3;
  const Positions v4 = s.v + dt * k3v;
  const Positions k4v = acceleration(model, q4, v4);
  SystemState out;
  out.q = s.q + dt / 6.0 * (k1q + 2.0 * v2 + 2.0 * v3 + v4);
  out.v = s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  out.time = s.time + dt;
  return out;
}

}  // namespace

Trajectory integrate(const SystemState& initial, const Model& model, double dt, std::size_t steps,
                     Scheme scheme) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const bool curved = model.space.is_curved();
  if (scheme == Scheme::kVerlet && curved) {
    throw ContractError("verlet integration is only available for flat spaces");
  }
  if (scheme == Scheme::kRk4Projected && !curved) {
    throw ContractError("projected rk4 is only available for curved spaces");
  }

  Trajectory traj{.states = {}, .step = dt, .model = model};
  traj.states.reserve(steps + 1);
  traj.states.push_back(initial);

  Positions verlet_acc;
  for (std::size_t i = 0; i < steps; ++i) {
    const SystemState& s = traj.states.back();
    try {
      if (scheme == Scheme::kVerlet) {
        if (i == 0) verlet_acc = acceleration(model, s.q, s.v);
        SystemState next;
        const Positions v_half = s.v + 0.5 * dt * verlet_acc;
        next.q = s.q + dt * v_half;
        verlet_acc = acceleration(model, next.q, v_half);
        next.v = v_half + 0.5 * dt * verlet_acc;
        next.time = s.time + dt;
        traj.states.push_back(std::move(next));
      } else {
        SystemState next = rk4_step(model, s, dt);
        if (scheme == Scheme::kRk4Projected) project_to_manifold(next.q, next.v, model.space.sigma());
        traj.states.push_back(std::move(next));
      }
    } catch (const CollisionError& e) {
      std::ostringstream os;
      os << e.what() << " during step starting at t = " << s.time;
      throw CollisionError(os.str(), e.first(), e.second(), s.time);
    }
  }
  return traj;
}

double energy(const Model& model, const SystemState& state) {
  if (model.space.is_curved()) throw ContractError("energy is only defined here for flat models");
  const auto& m = model.masses;
  const Eigen::Index n = state.q.cols();
  double kinetic = 0.0;
  double potential = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mk = m[static_cast<std::size_t>(k)];
    kinetic += 0.5 * mk * state.v.col(k).squaredNorm();
    for (Eigen::Index j = k + 1; j < n; ++j) {
      potential += mk * m[static_cast<std::size_t>(j)] *
                   model.force.pair_potential((state.q.col(j) - state.q.col(k)).squaredNorm());
    }
    if (model.central_mass != 0.0) {
      potential += mk * model.central_mass * model.force.pair_potential(state.q.col(k).squaredNorm());
    }
  }
  return kinetic + potential;
}

double constraint_drift(const Trajectory& traj) {
  const int sigma = traj.model.space.sigma();
  double worst = 0.0;
  for (const auto& s : traj.states) {
    for (Eigen::Index k = 0; k < s.q.cols(); ++k) {
      worst = std::max(worst, std::abs(odot(s.q.col(k), s.q.col(k), sigma) - sigma));
    }
  }
  return worst;
}

ResidualStats verify_solution(const Trajectory& traj) {
  const auto& st = traj.states;
  if (st.size() < 5) throw ContractError("verify_solution needs at least 5 states");
  const double h2 = traj.step * traj.step;
  ResidualStats stats;
  double sum = 0.0;
  for (std::size_t i = 2; i + 2 < st.size(); ++i) {
    const Positions fd =
        (-st[i + 2].q + 16.0 * st[i + 1].q - 30.0 * st[i].q + 16.0 * st[i - 1].q - st[i - 2].q) /
        (12.0 * h2);
    const double r = (fd - acceleration(traj.model, st[i].q, st[i].v)).norm();
    stats.max = std::max(stats.max, r);
    sum += r;
    ++stats.samples;
  }
  stats.mean = sum / static_cast<double>(stats.samples);
  if (!traj.model.space.is_curved()) {
    const double e0 = energy(traj.model, st.front());
    double drift = 0.0;
    for (const auto& s : st) drift = std::max(drift, std::abs(energy(traj.model, s) - e0));
    stats.energy_drift = drift;
  }
  return stats;
}

}  // namespace choreo
