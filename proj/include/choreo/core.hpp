#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace choreo {

using Vec = Eigen::VectorXd;
/// Column k holds body k. Rows are ambient coordinates.
using Positions = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (e.g. a non-positive separation).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two bodies (or a body and a fixed center) closer than the collision guard.
class CollisionError : public Error {
 public:
  CollisionError(const std::string& what, int first, int second, double time = 0.0)
      : Error(what), first_(first), second_(second), time_(time) {}

  int first() const { return first_; }
  /// -1 when the partner is a fixed center.
  int second() const { return second_; }
  double time() const { return time_; }

 private:
  int first_;
  int second_;
  double time_;
};

/// A precondition of an operation is not met by its input.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// No admissible parameter satisfies a balance condition.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Force law: f(x) = sum_i c_i x^(-e_i), x the squared separation
// ---------------------------------------------------------------------------

struct PowerTerm {
  double coefficient;
  double exponent;
};

struct ForceLawViolation {
  std::string message;
  std::optional<std::size_t> term;                          // offending term index
  std::optional<std::pair<double, double>> grid_pair;       // offending grid abscissae
};

class ForceLaw {
 public:
  /// Construction does not validate; call validate() or require_valid().
  explicit ForceLaw(std::vector<PowerTerm> terms);

  /// f(x) = x^(-3/2).
  static ForceLaw classical();

  /// Throws DomainError for x <= 0.
  double operator()(double x) const;
  double eval(double x) const { return (*this)(x); }

  /// d f / dx.
  double derivative(double x) const;

  /// Pair potential U(x) with dU/dx = f(x)/2, so that the force on body k from
  /// -grad_k [m_j m_k U(|q_j - q_k|^2)] is m_j m_k (q_j - q_k) f. For e_i = 1
  /// the term is (c_i/2) log x.
  double pair_potential(double x) const;

  std::span<const PowerTerm> terms() const { return terms_; }

  /// Positivity of every coefficient, each exponent >= 1/2 with at least one
  /// strictly above, then a 256-point log grid check of sqrt(x) f(x)
  /// decreasing on [1e-6, 1e6].
  std::optional<ForceLawViolation> validate() const;
  void require_valid() const;

  bool operator==(const ForceLaw& other) const;

 private:
  std::vector<PowerTerm> terms_;
};

// ---------------------------------------------------------------------------
// Masses with cyclic indexing
// ---------------------------------------------------------------------------

class MassVector {
 public:
  /// Throws DomainError unless non-empty with all entries > 0.
  explicit MassVector(std::vector<double> masses);
  static MassVector equal(std::size_t n, double value = 1.0);

  std::size_t size() const { return m_.size(); }
  /// Cyclic access: at(k + K n) == at(k) for any integer K.
  double at(long k) const;
  double operator[](std::size_t k) const { return m_[k]; }
  double total() const { return total_; }
  double mean() const { return total_ / static_cast<double>(m_.size()); }

  /// (m_0 - M/n, ..., m_{n-1} - M/n).
  Vec deviations() const;
  /// Entry k of the result is at(k + shift).
  MassVector shifted(long shift) const;
  MassVector scaled(double factor) const;

  const std::vector<double>& values() const { return m_; }
  bool operator==(const MassVector& other) const { return m_ == other.m_; }

 private:
  std::vector<double> m_;
  double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Space descriptor
// ---------------------------------------------------------------------------

struct FlatSpace {
  int dim = 2;
  bool operator==(const FlatSpace&) const = default;
};

/// The surface x1^2 + x2^2 + sigma x3^2 = sigma in R^3 (sphere for +1, upper
/// hyperboloid sheet for -1).
struct CurvedSpace {
  int sigma = 1;
  bool operator==(const CurvedSpace&) const = default;
};

class Space {
 public:
  Space(FlatSpace flat);  // NOLINT(google-explicit-constructor)
  Space(CurvedSpace curved);  // NOLINT(google-explicit-constructor)
  static Space flat(int dim) { return Space(FlatSpace{dim}); }
  static Space curved(int sigma) { return Space(CurvedSpace{sigma}); }

  bool is_curved() const { return std::holds_alternative<CurvedSpace>(variant_); }
  /// Ambient coordinate count: the flat dimension, or 3 for curved spaces.
  int ambient_dim() const;
  /// Throws ContractError for flat spaces.
  int sigma() const;

  /// Checks x.x (signed) = sigma within tol, and x3 > 0 on the hyperboloid.
  bool on_manifold(const Vec& x, double tol) const;

  bool operator==(const Space& other) const = default;

 private:
  std::variant<FlatSpace, CurvedSpace> variant_;
};

/// x1 y1 + x2 y2 + sigma x3 y3.
inline double odot(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y, int sigma) {
  return x(0) * y(0) + x(1) * y(1) + sigma * x(2) * y(2);
}

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

struct Tolerances {
  /// Singular values below rank_rel * sigma_max count as zero.
  double rank_rel = 1e-8;
  double residual_abs = 1e-6;
  double constraint_abs = 1e-8;

  /// Throws DomainError unless all positive and rank_rel < 1.
  void validate() const;
};

/// Squared separations below this abort dynamics evaluation.
inline constexpr double kCollisionGuard = 1e-10;

}  // namespace choreo
