#include "choreo/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace choreo {

ForceLaw::ForceLaw(std::vector<PowerTerm> terms) : terms_(std::move(terms)) {}

ForceLaw ForceLaw::classical() { return ForceLaw({{1.0, 1.5}}); }

double ForceLaw::operator()(double x) const {
  if (!(x > 0.0)) {
    throw DomainError("force law evaluated at non-positive squared separation " +
                      std::to_string(x));
  }
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.coefficient * std::pow(x, -t.exponent);
  return sum;
}

double ForceLaw::derivative(double x) const {
  if (!(x > 0.0)) throw DomainError("force law derivative at non-positive x");
  double sum = 0.0;
  for (const auto& t : terms_) sum -= t.exponent * t.coefficient * std::pow(x, -t.exponent - 1.0);
  return sum;
}

double ForceLaw::pair_potential(double x) const {
  if (!(x > 0.0)) throw DomainError("pair potential at non-positive x");
  double sum = 0.0;
  for (const auto& t : terms_) {
    if (t.exponent == 1.0) {
      sum += 0.5 * t.coefficient * std::log(x);
    } else {
      const double p = 1.0 - t.exponent;
      sum += 0.5 * t.coefficient * std::pow(x, p) / p;
    }
  }
  return sum;
}

std::optional<ForceLawViolation> ForceLaw::validate() const {
  if (terms_.empty()) return ForceLawViolation{"force law has no terms", std::nullopt, std::nullopt};
  bool strict = false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (!(t.coefficient > 0.0) || !std::isfinite(t.coefficient)) {
      return ForceLawViolation{"coefficient must be positive", i, std::nullopt};
    }
    if (!(t.exponent >= 0.5) || !std::isfinite(t.exponent)) {
      return ForceLawViolation{"exponent below 1/2 makes sqrt(x) f(x) increasing", i, std::nullopt};
    }
    strict = strict || t.exponent > 0.5;
  }
  if (!strict) {
    return ForceLawViolation{"sqrt(x) f(x) is constant: need one exponent above 1/2",
                             std::nullopt, std::nullopt};
  }

  constexpr int kGrid = 256;
  const double lo = std::log(1e-6);
  const double hi = std::log(1e6);
  double prev_x = std::exp(lo);
  double prev = std::sqrt(prev_x) * (*this)(prev_x);
  for (int i = 1; i < kGrid; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / (kGrid - 1));
    const double g = std::sqrt(x) * (*this)(x);
    if (!(g < prev)) {
      return ForceLawViolation{"sqrt(x) f(x) not decreasing on grid", std::nullopt,
                               std::make_pair(prev_x, x)};
    }
    prev = g;
    prev_x = x;
  }
  return std::nullopt;
}

void ForceLaw::require_valid() const {
  if (auto v = validate()) {
    std::ostringstream os;
    os << "invalid force law: " << v->message;
    if (v->term) os << " (term " << *v->term << ")";
    throw DomainError(os.str());
  }
}

bool ForceLaw::operator==(const ForceLaw& other) const {
  return std::equal(terms_.begin(), terms_.end(), other.terms_.begin(), other.terms_.end(),
                    [](const PowerTerm& a, const PowerTerm& b) {
                      return a.coefficient == b.coefficient && a.exponent == b.exponent;
                    });
}

MassVector::MassVector(std::vector<double> masses) : m_(std::move(masses)) {
  if (m_.empty()) throw DomainError("mass vector is empty");
  for (double m : m_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("masses must be positive and finite");
  }
  total_ = std::accumulate(m_.begin(), m_.end(), 0.0);
}

MassVector MassVector::equal(std::size_t n, double value) {
  return MassVector(std::vector<double>(n, value));
}

double MassVector::at(long k) const {
  const long n = static_cast<long>(m_.size());
  long r = k % n;
  if (r < 0) r += n;
  return m_[static_cast<std::size_t>(r)];
}

Vec MassVector::deviations() const {
  Vec d(static_cast<Eigen::Index>(m_.size()));
  const double avg = mean();
  for (std::size_t k = 0; k < m_.size(); ++k) d(static_cast<Eigen::Index>(k)) = m_[k] - avg;
  return d;
}

MassVector MassVector::shifted(long shift) const {
  std::vector<double> out(m_.size());
  for (std::size_t k = 0; k < m_.size(); ++k) out[k] = at(static_cast<long>(k) + shift);
  return MassVector(std::move(out));
}

MassVector MassVector::scaled(double factor) const {
  std::vector<double> out(m_);
  for (double& m : out) m *= factor;
  return MassVector(std::move(out));
}

Space::Space(FlatSpace flat) : variant_(flat) {
  if (flat.dim < 1) throw DomainError("flat dimension must be positive");
}

Space::Space(CurvedSpace curved) : variant_(curved) {
  if (curved.sigma != 1 && curved.sigma != -1) throw DomainError("sigma must be +1 or -1");
}

int Space::ambient_dim() const {
  if (const auto* f = std::get_if<FlatSpace>(&variant_)) return f->dim;
  return 3;
}

int Space::sigma() const {
  if (const auto* c = std::get_if<CurvedSpace>(&variant_)) return c->sigma;
  throw ContractError("sigma requested for a flat space");
}

bool Space::on_manifold(const Vec& x, double tol) const {
  if (!is_curved()) return x.size() == ambient_dim();
  if (x.size() != 3) return false;
  const int s = sigma();
  if (std::abs(odot(x, x, s) - s) > tol) return false;
  return s == 1 || x(2) > 0.0;
}

void Tolerances::validate() const {
  if (!(rank_rel > 0.0 && rank_rel < 1.0)) throw DomainError("rank_rel must lie in (0, 1)");
  if (!(residual_abs > 0.0)) throw DomainError("residual_abs must be positive");
  if (!(constraint_abs > 0.0)) throw DomainError("constraint_abs must be positive");
}

}  // namespace choreo
