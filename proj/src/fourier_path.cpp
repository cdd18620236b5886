#include "choreo/fourier_path.hpp"

#include <cmath>
#include <numbers>

namespace choreo {

FourierPath::FourierPath(int dim, double period, int order)
    : period_(period),
      cos_(Eigen::MatrixXd::Zero(dim, order + 1)),
      sin_(Eigen::MatrixXd::Zero(dim, order + 1)) {
  if (dim < 1) throw DomainError("path dimension must be positive");
  if (order < 0) throw DomainError("path order must be non-negative");
  if (!(period > 0.0)) throw DomainError("path period must be positive");
}

double FourierPath::frequency() const { return 2.0 * std::numbers::pi / period_; }

FourierPath::Sample FourierPath::evaluate(double t) const {
  const double w = frequency();
  Sample s{cos_.col(0), Vec::Zero(dim()), Vec::Zero(dim())};
  for (int m = 1; m <= order(); ++m) {
    // Reduce the phase modulo the period first so that t and t + P agree to round-off.
    const double phase = w * m * std::remainder(t, period_);
    const double c = std::cos(phase);
    const double sn = std::sin(phase);
    const double wm = w * m;
    s.p += cos_.col(m) * c + sin_.col(m) * sn;
    s.dp += wm * (-cos_.col(m) * sn + sin_.col(m) * c);
    s.ddp -= wm * wm * (cos_.col(m) * c + sin_.col(m) * sn);
  }
  return s;
}

Vec FourierPath::position(double t) const {
  const double w = frequency();
  Vec p = cos_.col(0);
  for (int m = 1; m <= order(); ++m) {
    const double phase = w * m * std::remainder(t, period_);
    p += cos_.col(m) * std::cos(phase) + sin_.col(m) * std::sin(phase);
  }
  return p;
}

Vec FourierPath::velocity(double t) const { return evaluate(t).dp; }

FourierPath FourierPath::transformed(const Eigen::MatrixXd& linear, double shift) const {
  if (linear.cols() != dim()) throw ContractError("transform does not match path dimension");
  FourierPath out(static_cast<int>(linear.rows()), period_, order());
  const double w = frequency();
  out.cos_.col(0) = linear * cos_.col(0);
  for (int m = 1; m <= order(); ++m) {
    const double phi = w * m * shift;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    // a cos(x + phi) + b sin(x + phi) = (a c + b s) cos x + (b c - a s) sin x
    out.cos_.col(m) = linear * (cos_.col(m) * c + sin_.col(m) * s);
    out.sin_.col(m) = linear * (sin_.col(m) * c - cos_.col(m) * s);
  }
  return out;
}

FourierPath FourierPath::translated(const Vec& offset) const {
  FourierPath out = *this;
  out.cos_.col(0) += offset;
  return out;
}

FourierPath FourierPath::with_order(int new_order) const {
  FourierPath out(dim(), period_, new_order);
  const int keep = std::min(order(), new_order) + 1;
  out.cos_.leftCols(keep) = cos_.leftCols(keep);
  out.sin_.leftCols(keep) = sin_.leftCols(keep);
  return out;
}

bool FourierPath::operator==(const FourierPath& other) const {
  return period_ == other.period_ && cos_.rows() == other.cos_.rows() &&
         cos_.cols() == other.cos_.cols() && cos_ == other.cos_ && sin_ == other.sin_;
}

}  // namespace choreo
