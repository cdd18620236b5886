#include "choreo/choreography.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace choreo {

PhaseOffsets::PhaseOffsets(std::vector<double> h, bool equally_spaced)
    : h_(std::move(h)), equally_spaced_(equally_spaced) {
  if (h_.empty()) throw DomainError("phase offsets are empty");
  if (equally_spaced_) {
    for (std::size_t k = 0; k < h_.size(); ++k) {
      if (std::abs(h_[k] - static_cast<double>(k)) > 1e-12) {
        throw ContractError("equally spaced offsets must be stored in normal form h_k = k");
      }
    }
  }
}

PhaseOffsets PhaseOffsets::equally_spaced(std::size_t n) {
  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k) h[k] = static_cast<double>(k);
  return PhaseOffsets(std::move(h), true);
}

double PhaseOffsets::at(long k, double period) const {
  const long n = static_cast<long>(h_.size());
  long wraps = k / n;
  long r = k % n;
  if (r < 0) {
    r += n;
    --wraps;
  }
  return h_[static_cast<std::size_t>(r)] + static_cast<double>(wraps) * period;
}

Positions ChoreographyConfig::positions(double t) const {
  Positions q(path.dim(), static_cast<Eigen::Index>(bodies()));
  for (std::size_t k = 0; k < bodies(); ++k) q.col(static_cast<Eigen::Index>(k)) = path.position(t + offsets[k]);
  return q;
}

Positions ChoreographyConfig::velocities(double t) const {
  Positions v(path.dim(), static_cast<Eigen::Index>(bodies()));
  for (std::size_t k = 0; k < bodies(); ++k) v.col(static_cast<Eigen::Index>(k)) = path.velocity(t + offsets[k]);
  return v;
}

Positions ChoreographyConfig::accelerations(double t) const {
  Positions a(path.dim(), static_cast<Eigen::Index>(bodies()));
  for (std::size_t k = 0; k < bodies(); ++k) a.col(static_cast<Eigen::Index>(k)) = path.evaluate(t + offsets[k]).ddp;
  return a;
}

void ChoreographyConfig::check() const {
  if (offsets.size() != masses.size()) throw ContractError("offset count does not match mass count");
  if (path.dim() != space.ambient_dim()) throw ContractError("path dimension does not match the space");
  if (offsets.is_equally_spaced() &&
      std::abs(path.period() - static_cast<double>(bodies())) > 1e-12) {
    throw ContractError("equally spaced configs must have path period n");
  }
  if (central_mass < 0.0) throw ContractError("central mass must be non-negative");
  if (!space.is_curved()) force.require_valid();
}

double config_residual(const ChoreographyConfig& config, int sample_count) {
  const Model model = config.model();
  double worst = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    const double t = config.path.period() * i / sample_count;
    const Positions r = config.accelerations(t) - acceleration(model, config.positions(t), config.velocities(t));
    worst = std::max(worst, r.norm());
  }
  return worst;
}

Trajectory sample_trajectory(const ChoreographyConfig& config, double dt, double periods) {
  if (!(dt > 0.0)) throw DomainError("sampling step must be positive");
  const double span = periods * config.path.period();
  const auto steps = static_cast<std::size_t>(std::llround(span / dt));
  const double step = steps > 0 ? span / static_cast<double>(steps) : dt;
  Trajectory traj{.states = {}, .step = step, .model = config.model()};
  traj.states.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) traj.states.push_back(config.state(step * static_cast<double>(i)));
  return traj;
}

ResidualStats verify_config(const ChoreographyConfig& config, double dt) {
  return verify_solution(sample_trajectory(config, dt, 1.0));
}

double config_constraint_drift(const ChoreographyConfig& config, int sample_count) {
  const int sigma = config.space.sigma();
  double worst = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    const Positions q = config.positions(config.path.period() * i / sample_count);
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      worst = std::max(worst, std::abs(odot(q.col(k), q.col(k), sigma) - sigma));
    }
  }
  return worst;
}

ChoreographyConfig recentre(const ChoreographyConfig& config) {
  if (config.space.is_curved()) throw ContractError("recentre applies to flat configs only");
  if (config.central_mass != 0.0) throw ContractError("recentre applies without a fixed center");
  ChoreographyConfig out = config;
  FourierPath& path = out.path;
  const double w = path.frequency();
  const double total = config.masses.total();
  for (int d = 0; d < path.dim(); ++d) path.cos_coeff(d, 0) = 0.0;
  for (int m = 1; m <= path.order(); ++m) {
    std::complex<double> phase_sum = 0.0;
    for (std::size_t k = 0; k < config.bodies(); ++k) {
      phase_sum += config.masses[k] * std::polar(1.0, w * m * config.offsets[k]);
    }
    if (std::abs(phase_sum) / total > 1e-12) {
      for (int d = 0; d < path.dim(); ++d) {
        path.cos_coeff(d, m) = 0.0;
        path.sin_coeff(d, m) = 0.0;
      }
    }
  }
  return out;
}

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace choreo
