#include "choreo/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace choreo {

SymmetryIdentities symmetry_identities(const ChoreographyConfig& config, std::size_t k,
                                       std::size_t l, int sample_count,
                                       const SymmetryOptions& options) {
  if (config.space.is_curved() || config.path.dim() != 2) {
    throw ContractError("symmetry identities need a flat planar config");
  }
  const std::size_t n = config.bodies();
  if (k >= n || l >= n || k == l) throw DomainError("symmetry identities need distinct body indices");
  if (sample_count < 1) throw DomainError("sample count must be positive");

  auto axis = detect_symmetry_axis(config.path, options);
  if (!axis) throw ContractError("path has no symmetry axis at the requested tolerance");
  const FourierPath& p = axis->normal_form;
  const auto& h = config.offsets.values();
  const MassVector& m = config.masses;
  const ForceLaw& f = config.force;
  const double floor2 = kSeparationFloor * kSeparationFloor;

  auto pulled = [&](const Vec& v, bool with_f, bool& ok) -> Vec {
    const double x = v.squaredNorm();
    if (x < floor2) {
      ok = false;
      return v;
    }
    return with_f ? Vec(v * f(x)) : v;
  };

  std::array<double, 4> worst{};
  double num_f = 0.0, den_f = 0.0, num_c = 0.0, den_c = 0.0;
  std::vector<double> gaps;
  const double dm = m[k] - m[l];
  for (int i = 0; i < sample_count; ++i) {
    const double t = p.period() * i / sample_count;
    const Vec pt = p.position(t);
    const Vec s = p.position(t + h[l] - h[k]);
    const Vec u = s - pt;
    bool ok = true;
    std::array<Vec, 4> rhs;
    rhs.fill(Vec::Zero(2));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k || j == l) continue;
      const Vec a = p.position(t + h[j] - h[k]);
      const Vec b = p.position(t - (h[j] - h[l]));
      const Vec c = p.position(t + h[l] - h[j]);
      rhs[0] += m[j] * (pulled(a - pt, true, ok) - pulled(b - pt, true, ok));
      rhs[1] += m[j] * (pulled(a - s, true, ok) - pulled(c - s, true, ok));
      rhs[2] += m[j] * ((a - pt) - (b - pt));
      rhs[3] += m[j] * ((a - s) - (c - s));
    }
    const Vec uf = pulled(u, true, ok);
    if (!ok) continue;
    const std::array<Vec, 4> lhs{dm * uf, dm * uf, dm * u, dm * u};
    for (std::size_t q = 0; q < 4; ++q) worst[q] = std::max(worst[q], (lhs[q] - rhs[q]).norm());
    num_f += rhs[0].dot(uf);
    den_f += uf.squaredNorm();
    num_c += rhs[2].dot(u);
    den_c += u.squaredNorm();
    gaps.push_back(u.norm());
  }

  SymmetryIdentities out{.k = k,
                         .l = l,
                         .residuals = worst,
                         .implied_difference_with_f = den_f > 0.0 ? num_f / den_f : 0.0,
                         .implied_difference_without_f = den_c > 0.0 ? num_c / den_c : 0.0,
                         .certificate = 0.0,
                         .axis = std::move(*axis)};
  const double implied =
      std::max(std::abs(out.implied_difference_with_f), std::abs(out.implied_difference_without_f));
  for (double g : gaps) out.certificate = std::max(out.certificate, implied * g);
  return out;
}

}  // namespace choreo
