#include "choreo/analysis.hpp"
#include "choreo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace choreo {

cplx root_power(int n, int l, long power) {
  const long r = ((static_cast<long>(l) * power) % n + n) % n;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / n);
}

CVec SpectralBasis::e(int l) const {
  const int idx = ((l - 1) % n + n) % n;
  return vectors.col(idx);
}

cplx SpectralBasis::lambda(int l) const { return root_power(n, l, 1); }

SpectralBasis dft_basis(int n) {
  if (n < 2) throw DomainError("spectral basis needs n >= 2");
  SpectralBasis b;
  b.n = n;
  b.vectors.resize(n, n);
  b.eigenvalues.resize(n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int l = 1; l <= n; ++l) {
    b.eigenvalues(l - 1) = root_power(n, l, 1);
    for (int j = 0; j < n; ++j) b.vectors(j, l - 1) = norm * root_power(n, l, j);
  }
  b.shift = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) b.shift(j, (j + 1) % n) = 1.0;
  return b;
}

ModeCoefficients mass_modes(const MassVector& masses) {
  const int n = static_cast<int>(masses.size());
  if (n < 2) throw DomainError("mass modes need n >= 2");
  const Vec mu = masses.deviations();
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  ModeCoefficients out{n, {}};
  for (int l = 1; l < n; ++l) {
    cplx a = 0.0;
    for (int j = 0; j < n; ++j) a += std::conj(norm * root_power(n, l, j)) * mu(j);
    out.a.push_back(a);
  }
  return out;
}

Vec ModeCoefficients::reconstruct() const {
  Vec out = Vec::Zero(n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int l = 1; l < n; ++l) {
    for (int j = 0; j < n; ++j) out(j) += std::real(at(l) * norm * root_power(n, l, j));
  }
  return out;
}

SampleGrid sample_grid(const ChoreographyConfig& config, int sample_count) {
  if (sample_count < 1) throw DomainError("sample count must be positive");
  SampleGrid grid;
  const bool curved = config.space.is_curved();
  const int sigma = curved ? config.space.sigma() : 0;
  const double floor2 = kSeparationFloor * kSeparationFloor;
  for (int i = 0; i < sample_count; ++i) {
    const double t = config.path.period() * i / sample_count;
    const Positions q = config.positions(t);
    bool close = false;
    for (Eigen::Index a = 0; a < q.cols() && !close; ++a) {
      if (config.central_mass > 0.0) {
        if (curved) {
          const double c = q(2, a);
          close = sigma * (1.0 - c * c) < floor2;
        } else {
          close = q.col(a).squaredNorm() < floor2;
        }
      }
      for (Eigen::Index b = a + 1; b < q.cols() && !close; ++b) {
        close = (q.col(a) - q.col(b)).squaredNorm() < floor2;
        if (curved && !close) {
          const double c = odot(q.col(a), q.col(b), sigma);
          close = sigma * (1.0 - c * c) < floor2;
        }
      }
    }
    (close ? grid.excluded : grid.times).push_back(t);
  }
  return grid;
}

namespace {

void require_equally_spaced(const ChoreographyConfig& config) {
  if (!config.offsets.is_equally_spaced()) {
    throw ContractError("analysis requires equally spaced offsets in normal form h_k = k");
  }
  if (config.bodies() < 2) throw ContractError("analysis requires at least two bodies");
}

}  // namespace

Positions delta_vectors(const ChoreographyConfig& config, double t) {
  require_equally_spaced(config);
  const int n = static_cast<int>(config.bodies());
  const Vec base = config.path.position(t);
  Positions out(config.path.dim(), n - 1);
  for (int j = 1; j < n; ++j) out.col(j - 1) = config.path.position(t + j) - base;
  return out;
}

SpanResult span_dimension(const ChoreographyConfig& config, int sample_count, double rank_rel) {
  require_equally_spaced(config);
  const SampleGrid grid = sample_grid(config, sample_count);
  SpanResult out;
  out.excluded = grid.excluded;
  out.ranks.assign(grid.times.size(), 0);
  parallel_for(grid.times.size(), [&](std::size_t i) {
    const Positions d = delta_vectors(config, grid.times[i]);
    const Vec s = Eigen::JacobiSVD<Eigen::MatrixXd>(d).singularValues();
    int rank = 0;
    if (s.size() > 0 && s(0) > 0.0) {
      for (Eigen::Index r = 0; r < s.size(); ++r) rank += s(r) > rank_rel * s(0) ? 1 : 0;
    }
    out.ranks[i] = rank;
  });
  for (int r : out.ranks) {
    out.d = std::max(out.d, r);
    out.histogram[r] += 1.0;
  }
  for (auto& [rank, count] : out.histogram) count /= static_cast<double>(out.ranks.size());
  return out;
}

bool simplex_test(const ChoreographyConfig& config, int sample_count, double tol) {
  require_equally_spaced(config);
  const SampleGrid grid = sample_grid(config, sample_count);
  std::vector<double> spread(grid.times.size(), 0.0);
  parallel_for(grid.times.size(), [&](std::size_t i) {
    const Positions d = delta_vectors(config, grid.times[i]);
    const Vec norms = d.colwise().norm().transpose();
    spread[i] = norms.size() > 0 ? norms.maxCoeff() - norms.minCoeff() : 0.0;
  });
  return std::all_of(spread.begin(), spread.end(), [&](double s) { return s < tol; });
}

bool great_circle_test(const ChoreographyConfig& config, int sample_count, double rank_rel) {
  if (!config.space.is_curved()) throw ContractError("great-circle test needs a curved config");
  if (config.space.sigma() == -1) return false;
  const int n = static_cast<int>(config.bodies());
  Eigen::MatrixXd stacked(3, static_cast<Eigen::Index>(sample_count) * n);
  for (int i = 0; i < sample_count; ++i) {
    stacked.middleCols(static_cast<Eigen::Index>(i) * n, n) =
        config.positions(config.path.period() * i / sample_count);
  }
  const Vec s = Eigen::JacobiSVD<Eigen::MatrixXd>(stacked).singularValues();
  return s(2) < rank_rel * s(0);
}

}  // namespace choreo
