#pragma once

#include "choreo/core.hpp"

#include <optional>
#include <vector>

namespace choreo {

/// Everything the right-hand side needs: masses, force law (flat spaces only),
/// the space, and an optional fixed center (origin when flat, (0,0,1) when
/// curved).
struct Model {
  MassVector masses;
  ForceLaw force = ForceLaw::classical();
  Space space = Space::flat(2);
  double central_mass = 0.0;

  std::size_t bodies() const { return masses.size(); }
};

// Right-hand sides. All are pure functions of their arguments.

Positions accel_flat(const Positions& q, const MassVector& masses, const ForceLaw& f);

Positions accel_flat_fixed_center(const Positions& q, const MassVector& masses, const ForceLaw& f,
                                  double central_mass);

Positions accel_curved(const Positions& q, const Positions& v, const MassVector& masses, int sigma);

/// Adds central_mass (e - sigma (q.e) q) / (sigma - sigma (q.e)^2)^(3/2) with e = (0,0,1).
Positions accel_curved_fixed_center(const Positions& q, const Positions& v,
                                    const MassVector& masses, int sigma, double central_mass);

/// Dispatches on the model's space and central mass.
Positions acceleration(const Model& model, const Positions& q, const Positions& v);

struct SystemState {
  Positions q;
  Positions v;
  double time = 0.0;
};

struct Trajectory {
  std::vector<SystemState> states;
  double step = 0.0;
  Model model;
};

enum class Scheme { kRk4, kVerlet, kRk4Projected };

/// Fixed-step integration; returns steps + 1 states. Verlet is flat-only and
/// rk4_projected curved-only. Collisions raise CollisionError carrying the
/// time of the failing step.
Trajectory integrate(const SystemState& initial, const Model& model, double dt, std::size_t steps,
                     Scheme scheme);

/// Puts q back on the surface and removes the normal velocity component.
void project_to_manifold(Positions& q, Positions& v, int sigma);

/// Kinetic plus potential energy (flat models only).
double energy(const Model& model, const SystemState& state);

/// max_k |q_k . q_k - sigma| over all states (curved models only).
double constraint_drift(const Trajectory& traj);

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  std::size_t samples = 0;
  /// max_i |E_i - E_0| for flat models.
  std::optional<double> energy_drift;

  bool below(double tol) const { return max < tol; }
};

/// Compares a fourth-order central difference of the positions against the
/// model acceleration at every interior state. Needs at least five states.
ResidualStats verify_solution(const Trajectory& traj);

}  // namespace choreo
