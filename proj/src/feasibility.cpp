#include "choreo/analysis.hpp"
#include "choreo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace choreo {
namespace {

Vec alternating(int n) {
  Vec v(n);
  for (int j = 0; j < n; ++j) v(j) = (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n));
  return v;
}

// Rows for one sample: per shift k, the with-f then the without-f identity
// (flat) or the curved identity, each contributing one row per coordinate.
Eigen::MatrixXd sample_rows(const ChoreographyConfig& config, double t) {
  const int n = static_cast<int>(config.bodies());
  const bool curved = config.space.is_curved();
  Positions terms;
  Positions plain;
  if (curved) {
    terms = curved_pair_terms(config, t);
  } else {
    plain = delta_vectors(config, t);
    terms = plain;
    for (Eigen::Index j = 0; j < terms.cols(); ++j) terms.col(j) *= config.force(plain.col(j).squaredNorm());
  }
  const auto dim = terms.rows();
  const int kinds = curved ? 1 : 2;
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * kinds * dim, n);
  Eigen::Index r = 0;
  for (int k = 0; k < n; ++k) {
    for (int kind = 0; kind < kinds; ++kind) {
      const Positions& src = kind == 0 ? terms : plain;
      for (int j = 1; j < n; ++j) {
        rows.block(r, (k + j) % n, dim, 1) += src.col(j - 1);
      }
      r += dim;
    }
  }
  return rows;
}

}  // namespace

FeasibilityResult mass_feasibility(const ChoreographyConfig& config, int sample_count,
                                   const Tolerances& tol) {
  tol.validate();
  if (!config.offsets.is_equally_spaced()) {
    throw ContractError("mass feasibility needs equally spaced offsets in normal form h_k = k");
  }
  const int n = static_cast<int>(config.bodies());
  if (n < 2) throw ContractError("mass feasibility needs at least two bodies");
  const SampleGrid grid = sample_grid(config, sample_count);
  if (grid.times.size() < static_cast<std::size_t>(n)) {
    throw ContractError("mass feasibility needs at least n retained samples");
  }

  std::vector<Eigen::MatrixXd> blocks(grid.times.size());
  parallel_for(grid.times.size(), [&](std::size_t i) { blocks[i] = sample_rows(config, grid.times[i]); });
  Eigen::Index total = 1;
  for (const auto& b : blocks) total += b.rows();
  Eigen::MatrixXd system(total, n);
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    system.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  system.row(r).setOnes();

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeThinV);
  FeasibilityResult out;
  out.rows = static_cast<std::size_t>(total);
  out.excluded = grid.excluded;
  out.singular_values = svd.singularValues();
  const Vec& s = out.singular_values;
  const double rel = std::max(tol.rank_rel, 1e3 * std::numeric_limits<double>::epsilon());
  const double cutoff = rel * s(0);
  int retained = 0;
  while (retained < n && s(retained) > cutoff) ++retained;
  out.nullspace_dim = n - retained;
  out.basis = svd.matrixV().rightCols(out.nullspace_dim);

  if (retained == 0) {
    out.spectral_gap = 0.0;
  } else if (retained == n) {
    out.spectral_gap = s(n - 1) / cutoff;
  } else {
    const double floor = std::numeric_limits<double>::epsilon() * s(0);
    out.spectral_gap = s(retained - 1) / std::max(s(retained), floor);
  }

  if (out.nullspace_dim == 0) {
    out.classification = "rigid";
  } else if (out.nullspace_dim == 1 && n % 2 == 0 &&
             std::abs(out.basis.col(0).dot(alternating(n))) > 1.0 - 1e-6) {
    out.classification = "alternating";
  } else {
    out.classification = "other";
  }
  return out;
}

Verdict theorem_verdict(const VerdictInputs& in, const FeasibilityResult& feasibility) {
  const int n = in.n;
  Verdict v;
  std::string detail;
  enum class Allowed { kNone, kEqual, kAlternating } allowed = Allowed::kNone;

  if (!in.curved) {
    if (n >= 2 && in.d == n - 1) {
      allowed = Allowed::kEqual;
      detail = "d=n−1";
    } else if (n >= 3 && in.d == n - 2) {
      allowed = Allowed::kEqual;
      detail = "d=n−2";
    } else if (n >= 4 && in.d == n - 3) {
      allowed = n % 2 == 1 ? Allowed::kEqual : Allowed::kAlternating;
      detail = n % 2 == 1 ? "d=n−3, n odd" : "d=n−3, n even";
    }
  } else if (!(in.sigma == 1 && in.great_circle)) {
    if (n == 4) {
      allowed = Allowed::kAlternating;
    } else if (n < 6) {
      allowed = Allowed::kEqual;
      detail = "n<6, n≠4";
    }
  }

  const std::string prefix = in.fixed_center ? "first n " : "";
  if (in.fixed_center) detail += detail.empty() ? "fixed center" : ", fixed center";
  const std::string suffix = detail.empty() ? "" : " (" + detail + ")";
  switch (allowed) {
    case Allowed::kEqual:
      v.text = prefix + "masses equal predicted" + suffix;
      v.allowed = Eigen::MatrixXd::Zero(n, 0);
      break;
    case Allowed::kAlternating:
      v.text = in.curved ? "m₁=m₃, m₂=m₄ predicted" + suffix
                         : prefix + "odd-equal / even-equal predicted" + suffix;
      v.allowed = alternating(n);
      break;
    case Allowed::kNone: {
      std::string why = in.curved && in.sigma == 1 && in.great_circle ? " (great circle)" : "";
      if (in.fixed_center) why += " (fixed center)";
      v.text = "outside theorem" + why + " — reporting computed nullspace";
      break;
    }
  }
  v.has_prediction = allowed != Allowed::kNone;
  if (v.has_prediction) {
    const Eigen::MatrixXd& b = feasibility.basis;
    if (b.cols() == 0) {
      v.consistent = true;
    } else if (v.allowed.cols() == 0) {
      v.consistent = false;
    } else {
      const Eigen::MatrixXd outside = b - v.allowed * (v.allowed.transpose() * b);
      v.consistent = outside.norm() < 1e-6;
    }
  }
  return v;
}

}  // namespace choreo
