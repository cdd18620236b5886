#include "choreo/analysis.hpp"
#include "choreo/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace choreo {
namespace {

void require_flat(const ChoreographyConfig& config) {
  if (config.space.is_curved()) throw ContractError("this identity needs a flat config");
  if (!config.offsets.is_equally_spaced()) {
    throw ContractError("this identity needs equally spaced offsets in normal form h_k = k");
  }
}

void require_curved(const ChoreographyConfig& config) {
  if (!config.space.is_curved()) throw ContractError("this identity needs a curved config");
  if (!config.offsets.is_equally_spaced()) {
    throw ContractError("this identity needs equally spaced offsets in normal form h_k = k");
  }
}

void require_mode(const ChoreographyConfig& config, int l) {
  const int n = static_cast<int>(config.bodies());
  if (l < 1 || l >= n) throw DomainError("mode index must lie in 1..n-1");
}

// Delta_j f(|Delta_j|^2) for every column.
Positions weighted_deltas(const ChoreographyConfig& config, const Positions& deltas) {
  Positions out = deltas;
  for (Eigen::Index j = 0; j < deltas.cols(); ++j) out.col(j) *= config.force(deltas.col(j).squaredNorm());
  return out;
}

template <class F>
double grid_max(const ChoreographyConfig& config, int sample_count, F value) {
  const SampleGrid grid = sample_grid(config, sample_count);
  std::vector<double> slots(grid.times.size(), 0.0);
  parallel_for(grid.times.size(), [&](std::size_t i) { slots[i] = value(grid.times[i]); });
  double worst = 0.0;
  for (double v : slots) worst = std::max(worst, v);
  return worst;
}

}  // namespace

double shift_coefficient(const MassVector& masses, long k, int j) {
  return masses.at(k + j) - masses.mean();
}

IdentityVectors lemma1_vectors(const ChoreographyConfig& config, long k, double t) {
  require_flat(config);
  const Positions d = delta_vectors(config, t);
  const Positions df = weighted_deltas(config, d);
  IdentityVectors out{Vec::Zero(d.rows()), Vec::Zero(d.rows())};
  for (Eigen::Index j = 1; j <= d.cols(); ++j) {
    const double c = shift_coefficient(config.masses, k, static_cast<int>(j));
    out.with_f += c * df.col(j - 1);
    out.without_f += c * d.col(j - 1);
  }
  return out;
}

IdentityNorms lemma1_residual(const ChoreographyConfig& config, long k, int sample_count) {
  require_flat(config);
  const SampleGrid grid = sample_grid(config, sample_count);
  std::vector<IdentityNorms> slots(grid.times.size());
  parallel_for(grid.times.size(), [&](std::size_t i) {
    const IdentityVectors v = lemma1_vectors(config, k, grid.times[i]);
    slots[i] = {v.with_f.norm(), v.without_f.norm()};
  });
  IdentityNorms out;
  for (const auto& s : slots) {
    out.with_f = std::max(out.with_f, s.with_f);
    out.without_f = std::max(out.without_f, s.without_f);
  }
  return out;
}

Positions curved_pair_terms(const ChoreographyConfig& config, double t) {
  require_curved(config);
  const int sigma = config.space.sigma();
  const int n = static_cast<int>(config.bodies());
  const Vec base = config.path.position(t);
  Positions out(3, n - 1);
  for (int j = 1; j < n; ++j) {
    const Vec other = config.path.position(t + j);
    const double c = odot(other, base, sigma);
    const double gap = sigma * (1.0 - c * c);
    if (!(gap > kCollisionGuard)) {
      std::ostringstream os;
      os << "singular curved separation at t = " << t << ", j = " << j;
      throw DomainError(os.str());
    }
    out.col(j - 1) = (other - sigma * c * base) / std::pow(gap, 1.5);
  }
  return out;
}

Vec lemma3_vector(const ChoreographyConfig& config, long k, double t) {
  const Positions v = curved_pair_terms(config, t);
  Vec out = Vec::Zero(3);
  for (Eigen::Index j = 1; j <= v.cols(); ++j) {
    out += shift_coefficient(config.masses, k, static_cast<int>(j)) * v.col(j - 1);
  }
  return out;
}

double lemma3_residual(const ChoreographyConfig& config, long k, int sample_count) {
  require_curved(config);
  return grid_max(config, sample_count, [&](double t) { return lemma3_vector(config, k, t).norm(); });
}

ModeVectors mode_vectors_flat(const ChoreographyConfig& config, int l, double t) {
  require_flat(config);
  require_mode(config, l);
  const int n = static_cast<int>(config.bodies());
  const Positions d = delta_vectors(config, t);
  const Positions df = weighted_deltas(config, d);
  ModeVectors out{CVec::Zero(d.rows()), CVec::Zero(d.rows())};
  for (int j = 1; j < n; ++j) {
    const cplx w = root_power(n, l, j - 1);
    out.with_f += w * df.col(j - 1).cast<cplx>();
    out.without_f += w * d.col(j - 1).cast<cplx>();
  }
  return out;
}

ModeResidual mode_residual_flat(const ChoreographyConfig& config, int l, int sample_count) {
  require_flat(config);
  require_mode(config, l);
  const int n = static_cast<int>(config.bodies());
  const bool even = n % 2 == 0;
  const SampleGrid grid = sample_grid(config, sample_count);

  struct Slot {
    double with_f = 0.0;
    double without_f = 0.0;
    std::vector<double> sine_with_f;
    std::vector<double> sine_without_f;
  };
  std::vector<Slot> slots(grid.times.size());
  parallel_for(grid.times.size(), [&](std::size_t i) {
    const double t = grid.times[i];
    const ModeVectors m = mode_vectors_flat(config, l, t);
    Slot& s = slots[i];
    s.with_f = m.with_f.norm();
    s.without_f = m.without_f.norm();
    if (!even) return;
    const Positions d = delta_vectors(config, t);
    const Positions df = weighted_deltas(config, d);
    for (int k = 0; k < n; ++k) {
      Vec a = Vec::Zero(d.rows());
      Vec b = Vec::Zero(d.rows());
      for (int j = 1; j < n; ++j) {
        const int r = ((k - j) % n + n) % n;
        if (r == 0 || r == n / 2) continue;
        const double w = std::sin(2.0 * std::numbers::pi * l * r / n);
        a += w * df.col(j - 1);
        b += w * d.col(j - 1);
      }
      s.sine_with_f.push_back(a.norm());
      s.sine_without_f.push_back(b.norm());
    }
  });

  ModeResidual out;
  out.l = l;
  if (even) {
    out.sine_with_f.assign(static_cast<std::size_t>(n), 0.0);
    out.sine_without_f.assign(static_cast<std::size_t>(n), 0.0);
  }
  for (const Slot& s : slots) {
    out.with_f = std::max(out.with_f, s.with_f);
    out.without_f = std::max(out.without_f, s.without_f);
    for (std::size_t k = 0; k < s.sine_with_f.size(); ++k) {
      out.sine_with_f[k] = std::max(out.sine_with_f[k], s.sine_with_f[k]);
      out.sine_without_f[k] = std::max(out.sine_without_f[k], s.sine_without_f[k]);
    }
  }
  return out;
}

CVec mode_vector_curved(const ChoreographyConfig& config, int l, double t) {
  require_mode(config, l);
  const int n = static_cast<int>(config.bodies());
  const Positions v = curved_pair_terms(config, t);
  CVec out = CVec::Zero(3);
  for (int j = 1; j < n; ++j) out += root_power(n, l, j - 1) * v.col(j - 1).cast<cplx>();
  return out;
}

double mode_residual_curved(const ChoreographyConfig& config, int l, int sample_count) {
  require_curved(config);
  require_mode(config, l);
  return grid_max(config, sample_count, [&](double t) { return mode_vector_curved(config, l, t).norm(); });
}

}  // namespace choreo
