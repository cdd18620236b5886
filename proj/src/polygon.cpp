#include "choreo/choreography.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace choreo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double flat_balance(int n, double radius, const ForceLaw& f, double central_mass) {
  double sum = 0.0;
  for (int j = 1; j < n; ++j) {
    const double one_minus_cos = 1.0 - std::cos(kTwoPi * j / n);
    sum += one_minus_cos * f(2.0 * radius * radius * one_minus_cos);
  }
  if (central_mass > 0.0) sum += central_mass * f(radius * radius);
  return sum;
}

// Solves g(x) = 0 for x in (lo, hi) with g(lo) > 0 > g(hi).
template <class F>
double bracketed_root(F g, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, iterations);
  return 0.5 * (a + b);
}

}  // namespace

PolygonResult polygon_flat(int n, double radius, const ForceLaw& f, double central_mass) {
  if (n < 2) throw DomainError("polygon needs n >= 2");
  if (!(radius > 0.0)) throw DomainError("polygon radius must be positive");
  if (central_mass < 0.0) throw DomainError("central mass must be non-negative");
  f.require_valid();

  const double omega2 = flat_balance(n, radius, f, central_mass);
  const double loop_rate = kTwoPi / n;
  const double scale = loop_rate * loop_rate / omega2;

  FourierPath path(2, static_cast<double>(n), 1);
  path.cos_coeff(0, 1) = radius;
  path.sin_coeff(1, 1) = radius;

  PolygonResult out{
      .config = ChoreographyConfig{.path = std::move(path),
                                   .offsets = PhaseOffsets::equally_spaced(static_cast<std::size_t>(n)),
                                   .masses = MassVector::equal(static_cast<std::size_t>(n), scale),
                                   .space = Space::flat(2),
                                   .force = f,
                                   .central_mass = central_mass * scale},
      .omega_squared_unit = omega2,
      .mass_scale = scale,
      .great_circle = false};
  return out;
}

double polygon_flat_radius_for_mass(int n, const ForceLaw& f, double body_mass,
                                    double central_mass) {
  if (n < 2) throw DomainError("polygon needs n >= 2");
  if (!(body_mass > 0.0)) throw DomainError("body mass must be positive");
  f.require_valid();
  const double target = std::pow(kTwoPi / n, 2) / body_mass;
  // The balance is strictly decreasing in the radius for admissible laws.
  auto g = [&](double log_r) { return flat_balance(n, std::exp(log_r), f, central_mass) - target; };
  double lo = 0.0;
  double hi = 0.0;
  while (g(lo) <= 0.0) lo -= 1.0;
  while (g(hi) >= 0.0) hi += 1.0;
  return std::exp(bracketed_root(g, lo, hi));
}

PolygonResult polygon_curved(int n, double z, int sigma, double central_mass) {
  if (n < 2) throw DomainError("polygon needs n >= 2");
  if (sigma == 1 && !(std::abs(z) < 1.0)) throw DomainError("spherical polygon needs |z| < 1");
  if (sigma == -1 && !(z > 1.0)) throw DomainError("hyperbolic polygon needs z > 1");
  if (sigma != 1 && sigma != -1) throw DomainError("sigma must be +1 or -1");
  if (central_mass < 0.0) throw DomainError("central mass must be non-negative");

  const double radius = std::sqrt(sigma * (1.0 - z * z));
  FourierPath path(3, static_cast<double>(n), 1);
  path.cos_coeff(0, 1) = radius;
  path.sin_coeff(1, 1) = radius;
  path.cos_coeff(2, 0) = z;

  ChoreographyConfig config{.path = std::move(path),
                            .offsets = PhaseOffsets::equally_spaced(static_cast<std::size_t>(n)),
                            .masses = MassVector::equal(static_cast<std::size_t>(n)),
                            .space = Space::curved(sigma),
                            .force = ForceLaw::classical(),
                            .central_mass = central_mass};

  // By the rotational symmetry every body sees the same balance; body 0 at t = 0.
  const auto sample = config.path.evaluate(0.0);
  const Vec lhs = sample.ddp + sigma * odot(sample.dp, sample.dp, sigma) * sample.p;
  const Positions q = config.positions(0.0);
  const Positions still = Positions::Zero(3, n);
  const Vec pull =
      accel_curved_fixed_center(q, still, config.masses, sigma, central_mass).col(0);

  const bool great_circle = sigma == 1 && std::abs(z) < 1e-14;
  double scale = 1.0;
  const double lhs_norm = lhs.norm();
  if (lhs_norm < 1e-12) {
    // The rotation needs no net pull; the pull must vanish on its own.
    if (pull.norm() > 1e-10) {
      std::ostringstream os;
      os << "no mass scale balances the polygon: required pull is zero, actual pull "
         << pull.norm();
      throw InfeasibleError(os.str());
    }
  } else {
    const Vec dir = lhs / lhs_norm;
    auto residual = [&](double c) { return dir.dot(lhs - c * pull); };
    double hi = 1.0;
    int expansions = 0;
    while (residual(hi) > 0.0 && expansions < 200) {
      hi *= 2.0;
      ++expansions;
    }
    if (residual(hi) > 0.0) {
      std::ostringstream os;
      os << "no mass scale balances the polygon: residual on [0, " << hi << "] runs from "
         << residual(0.0) << " to " << residual(hi);
      throw InfeasibleError(os.str());
    }
    scale = bracketed_root(residual, 0.0, hi);
    const double off_axis = (lhs - scale * pull).norm();
    if (off_axis > 1e-9 * lhs_norm) {
      std::ostringstream os;
      os << "pull is not aligned with the required centripetal direction (mismatch " << off_axis
         << ")";
      throw InfeasibleError(os.str());
    }
  }

  config.masses = config.masses.scaled(scale);
  config.central_mass = central_mass * scale;
  const double rate = kTwoPi / n;
  return PolygonResult{.config = std::move(config),
                       .omega_squared_unit = rate * rate / scale,
                       .mass_scale = scale,
                       .great_circle = great_circle};
}

}  // namespace choreo
