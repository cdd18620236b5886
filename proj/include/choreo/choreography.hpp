#pragma once

#include "choreo/core.hpp"
#include "choreo/dynamics.hpp"
#include "choreo/fourier_path.hpp"

#include <optional>
#include <vector>

namespace choreo {

/// Time offsets h_k with q_k(t) = p(t + h_k). Equally spaced offsets are
/// stored in normal form h_k = k (0-based) with path period n.
class PhaseOffsets {
 public:
  PhaseOffsets(std::vector<double> h, bool equally_spaced);
  static PhaseOffsets equally_spaced(std::size_t n);

  std::size_t size() const { return h_.size(); }
  bool is_equally_spaced() const { return equally_spaced_; }
  const std::vector<double>& values() const { return h_; }
  double operator[](std::size_t k) const { return h_[k]; }
  /// h_{k + K n} = h_k + K period.
  double at(long k, double period) const;

  bool operator==(const PhaseOffsets& other) const = default;

 private:
  std::vector<double> h_;
  bool equally_spaced_;
};

struct ChoreographyConfig {
  FourierPath path;
  PhaseOffsets offsets;
  MassVector masses;
  Space space;
  ForceLaw force = ForceLaw::classical();
  double central_mass = 0.0;

  std::size_t bodies() const { return masses.size(); }
  Model model() const { return Model{masses, force, space, central_mass}; }

  Positions positions(double t) const;
  Positions velocities(double t) const;
  /// Analytic second derivative of every body's track.
  Positions accelerations(double t) const;
  SystemState state(double t) const { return SystemState{positions(t), velocities(t), t}; }

  /// Throws ContractError on size mismatches, non-normal equally spaced
  /// offsets, or a dimension that does not fit the space.
  void check() const;
};

/// max over sample_count uniform times of || p'' - accel(q, q') || using the
/// analytic path derivatives.
double config_residual(const ChoreographyConfig& config, int sample_count = 128);

/// Samples the loop (positions and analytic velocities) as a trajectory with
/// uniform step over `periods` periods, starting at t = 0.
Trajectory sample_trajectory(const ChoreographyConfig& config, double dt, double periods = 1.0);

/// verify_solution on a one-period sampled trajectory.
ResidualStats verify_config(const ChoreographyConfig& config, double dt = 2.5e-3);

/// max over a grid and bodies of |q.q - sigma| (curved configs).
double config_constraint_drift(const ChoreographyConfig& config, int sample_count = 128);

// ---------------------------------------------------------------------------
// Polygon relative equilibria
// ---------------------------------------------------------------------------

struct PolygonResult {
  ChoreographyConfig config;
  /// Squared angular velocity the polygon would rotate at with unit body
  /// masses (and the requested central-mass ratio).
  double omega_squared_unit = 0.0;
  /// Factor applied to all masses so that the rotation period is exactly n.
  double mass_scale = 1.0;
  bool great_circle = false;
};

/// Regular n-gon of the given radius in the plane, rotating rigidly. Body
/// masses are equal; central_mass is the fixed-center mass in units of one
/// body mass. All masses are scaled together so that the loop period is n.
PolygonResult polygon_flat(int n, double radius, const ForceLaw& f, double central_mass = 0.0);

/// Regular n-gon at height x3 = z on the sphere (sigma = 1, |z| < 1) or the
/// upper hyperboloid sheet (sigma = -1, z > 1), rotating about the x3 axis.
/// The mass scale balancing the motion is found by a bracketed root solve of
/// the tangential residual. Throws InfeasibleError when no positive scale
/// balances it.
PolygonResult polygon_curved(int n, double z, int sigma, double central_mass = 0.0);

/// Radius at which polygon_flat's mass scale equals body_mass, i.e. the
/// circle a polygon of that body mass traces with period n.
double polygon_flat_radius_for_mass(int n, const ForceLaw& f, double body_mass = 1.0,
                                    double central_mass = 0.0);

// ---------------------------------------------------------------------------
// Centering and symmetry
// ---------------------------------------------------------------------------

/// Removes every Fourier component of the path that moves the mass-weighted
/// center sum_k m_k p(t + h_k): the mean (constant B / M) always, plus any
/// harmonic whose mass-weighted phase sum does not vanish. Flat configs with
/// no fixed center only. Idempotent.
ChoreographyConfig recentre(const ChoreographyConfig& config);

struct SymmetryAxis {
  /// Axis direction in [0, pi).
  double theta = 0.0;
  /// Time shift with R(-theta) p(tau - t) = diag(1, -1) R(-theta) p(t).
  double tau = 0.0;
  /// max over the check grid of the reflection mismatch.
  double residual = 0.0;
  /// R(-theta) p(t + tau / 2): satisfies p(-t) = diag(1, -1) p(t).
  FourierPath normal_form;
};

struct SymmetryOptions {
  int check_samples = 256;
  /// Coarse scan resolution for the time shift.
  int shift_candidates = 2048;
  double tol = 1e-8;
};

/// Smallest axis angle theta (then smallest tau) for which the rotated planar
/// loop is reflection-symmetric under time reversal. std::nullopt when none
/// meets the tolerance.
std::optional<SymmetryAxis> detect_symmetry_axis(const FourierPath& path,
                                                 const SymmetryOptions& options = {});

/// 2x2 rotation by angle.
Eigen::Matrix2d rotation(double angle);

}  // namespace choreo
