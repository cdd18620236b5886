#pragma once

#include "choreo/core.hpp"

namespace choreo {

/// Truncated Fourier loop
///   p_d(t) = a_{d,0} + sum_{m=1}^{order} a_{d,m} cos(2 pi m t / P) + b_{d,m} sin(2 pi m t / P)
/// with exact period P. Derivatives are evaluated term by term.
class FourierPath {
 public:
  FourierPath(int dim, double period, int order);

  int dim() const { return static_cast<int>(cos_.rows()); }
  int order() const { return static_cast<int>(cos_.cols()) - 1; }
  double period() const { return period_; }
  double frequency() const;  // 2 pi / P

  /// a_{d,m}, m = 0..order.
  double& cos_coeff(int d, int m) { return cos_(d, m); }
  double cos_coeff(int d, int m) const { return cos_(d, m); }
  /// b_{d,m}, m = 1..order (m = 0 is pinned to zero).
  double& sin_coeff(int d, int m) { return sin_(d, m); }
  double sin_coeff(int d, int m) const { return sin_(d, m); }

  const Eigen::MatrixXd& cos_coeffs() const { return cos_; }
  const Eigen::MatrixXd& sin_coeffs() const { return sin_; }

  struct Sample {
    Vec p;
    Vec dp;
    Vec ddp;
  };

  Vec position(double t) const;
  Vec velocity(double t) const;
  Sample evaluate(double t) const;

  /// Returns p'(t) = R p(t + shift) where R is an arbitrary linear map.
  FourierPath transformed(const Eigen::MatrixXd& linear, double shift) const;
  /// p(t) + c.
  FourierPath translated(const Vec& offset) const;
  /// Same curve, order raised (new coefficients zero) or truncated.
  FourierPath with_order(int order) const;

  bool operator==(const FourierPath& other) const;

 private:
  double period_;
  Eigen::MatrixXd cos_;
  Eigen::MatrixXd sin_;
};

}  // namespace choreo
