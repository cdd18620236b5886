#pragma once

#include "choreo/choreography.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace choreo {

/// Symmetry class searched by the action minimizer.
///  - kEight: x has only odd sine harmonics, y only even sine harmonics
///    (x(t + P/2) = -x(t), y(t + P/2) = y(t), p(-t) = -p(t)).
///  - kFree: every cosine and sine harmonic m >= 1 in both coordinates.
enum class Ansatz { kEight, kFree };

Ansatz parse_ansatz(const std::string& name);
std::string to_string(Ansatz ansatz);

/// Discretized Lagrangian action of an equally spaced planar choreography,
///   A = int_0^P [ 1/2 M |p'|^2 - sum_{j<k} m_j m_k U(|q_j - q_k|^2) ] dt,
/// with U the pair potential of the force law, as a function of the free
/// Fourier coefficients of the ansatz. Uniform trapezoidal quadrature.
class ActionFunctional {
 public:
  ActionFunctional(MassVector masses, ForceLaw force, Ansatz ansatz, int order,
                   int quadrature_points = 512);

  std::size_t parameter_count() const { return slots_.size(); }
  double value(const Vec& params) const;
  double value_and_gradient(const Vec& params, Vec& gradient) const;

  FourierPath path(const Vec& params) const;
  Vec parameters(const FourierPath& path) const;

  std::size_t bodies() const { return masses_.size(); }
  const MassVector& masses() const { return masses_; }
  const ForceLaw& force() const { return force_; }
  Ansatz ansatz() const { return ansatz_; }
  int order() const { return order_; }
  /// Harmonic number of every parameter slot.
  Vec harmonics() const;

 private:
  struct Slot {
    int dim;
    int harmonic;
    bool is_sin;
  };

  double evaluate(const Vec& params, Vec* gradient) const;

  MassVector masses_;
  ForceLaw force_;
  Ansatz ansatz_;
  int order_;
  int points_;
  double period_;
  std::vector<Slot> slots_;
  // basis_[k][d]: N x (slots in dim d) values at t_i + h_k; rate_[d] derivative at t_i.
  std::vector<std::vector<Eigen::MatrixXd>> basis_;
  std::vector<Eigen::MatrixXd> rate_;
  std::vector<std::vector<int>> dim_slots_;
};

struct ActionOptions {
  int order = 12;
  int iterations = 4000;
  int quadrature_points = 512;
  std::uint64_t seed = 0;
  int max_restarts = 4;
  /// Stop once the gradient infinity norm drops below gradient_tol * max(1, |A|).
  double gradient_tol = 1e-11;
  /// When the line search stalls at round-off, the run counts as converged
  /// if the relative gradient is below this.
  double stall_gradient_tol = 1e-7;
  /// Initial-guess perturbation relative to the loop size.
  double seed_noise = 0.02;
  /// Step of the trajectory used for the final verification.
  double verify_dt = 2.5e-3;
};

struct ActionResult {
  ChoreographyConfig config;
  double action = 0.0;
  double gradient_norm = 0.0;
  ResidualStats residual;
  bool converged = false;
  int iterations = 0;
  int restarts = 0;
  /// Action at every accepted iterate; non-increasing.
  std::vector<double> history;
  std::string warning;
};

/// Minimizes the action over the ansatz by limited-memory quasi-Newton
/// descent with a monotone backtracking line search. Flat, planar, equally
/// spaced normal form. Deterministic given options.seed.
ActionResult minimize_action(int n, const MassVector& masses, const ForceLaw& force, Ansatz ansatz,
                             const ActionOptions& options = {});

/// Action of a flat config over one period by 512-point trapezoidal
/// quadrature (exact to round-off for rigidly rotating polygons).
double polygon_action(const ChoreographyConfig& polygon);

}  // namespace choreo
