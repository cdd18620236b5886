#include "choreo/choreography.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace choreo {
namespace {

using cplx = std::complex<double>;

// Complex Fourier coefficients of z(t) = x(t) + i y(t), indexed m + order.
std::vector<cplx> complex_coefficients(const FourierPath& path) {
  const int order = path.order();
  std::vector<cplx> c(static_cast<std::size_t>(2 * order + 1));
  c[static_cast<std::size_t>(order)] = {path.cos_coeff(0, 0), path.cos_coeff(1, 0)};
  for (int m = 1; m <= order; ++m) {
    const double ax = path.cos_coeff(0, m), bx = path.sin_coeff(0, m);
    const double ay = path.cos_coeff(1, m), by = path.sin_coeff(1, m);
    c[static_cast<std::size_t>(order + m)] = {0.5 * (ax + by), 0.5 * (ay - bx)};
    c[static_cast<std::size_t>(order - m)] = {0.5 * (ax - by), 0.5 * (ay + bx)};
  }
  return c;
}

// Mean-square reflection mismatch of the rotated loop is 2 E - 2 Re(e^{-2 i theta} G(tau)),
// G(tau) = sum_m c_m^2 e^{i m w tau}.
struct ReflectionSpectrum {
  std::vector<cplx> squares;
  int order = 0;
  double w = 0.0;
  double energy = 0.0;

  cplx g(double tau) const {
    cplx sum = 0.0;
    for (int m = -order; m <= order; ++m) {
      sum += squares[static_cast<std::size_t>(m + order)] * std::polar(1.0, m * w * tau);
    }
    return sum;
  }
  double mismatch(double theta, double tau) const {
    return energy - std::real(std::polar(1.0, -2.0 * theta) * g(tau));
  }
};

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (period - r < 1e-12 * period) r = 0.0;
  return r;
}

// Local minima of a periodic sampled function, refined by Brent's method.
template <class F>
std::vector<double> periodic_minima(F fn, double period, int samples) {
  std::vector<double> values(static_cast<std::size_t>(samples));
  const double h = period / samples;
  for (int i = 0; i < samples; ++i) values[static_cast<std::size_t>(i)] = fn(h * i);
  std::vector<double> out;
  for (int i = 0; i < samples; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    const double prev = values[static_cast<std::size_t>((i + samples - 1) % samples)];
    const double next = values[static_cast<std::size_t>((i + 1) % samples)];
    if (v <= prev && v <= next && !(v == prev && v == next && i > 0)) {
      const auto [x, fx] = boost::math::tools::brent_find_minima(fn, h * (i - 1), h * (i + 1), 52);
      out.push_back(fx <= v ? x : h * i);
    }
  }
  return out;
}

double reflection_residual(const FourierPath& normal, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = normal.period() * i / samples;
    Vec mirrored = normal.position(t);
    mirrored(1) = -mirrored(1);
    worst = std::max(worst, (normal.position(-t) - mirrored).norm());
  }
  return worst;
}

}  // namespace

std::optional<SymmetryAxis> detect_symmetry_axis(const FourierPath& path,
                                                 const SymmetryOptions& options) {
  if (path.dim() != 2) throw ContractError("symmetry axis detection needs a planar path");
  const double period = path.period();

  ReflectionSpectrum spec;
  spec.order = path.order();
  spec.w = path.frequency();
  const auto coeffs = complex_coefficients(path);
  for (const auto& c : coeffs) {
    spec.squares.push_back(c * c);
    spec.energy += std::norm(c);
  }

  auto build = [&](double theta, double tau) {
    FourierPath normal = path.transformed(rotation(-theta), 0.5 * tau);
    const double residual = reflection_residual(normal, options.check_samples);
    return SymmetryAxis{.theta = theta, .tau = tau, .residual = residual, .normal_form = std::move(normal)};
  };

  if (spec.energy == 0.0) return build(0.0, 0.0);

  // theta = 0 first: it is the smallest admissible angle whenever it works.
  {
    std::optional<SymmetryAxis> best;
    auto at_zero = [&](double tau) { return spec.mismatch(0.0, tau); };
    for (double tau : periodic_minima(at_zero, period, options.shift_candidates)) {
      auto axis = build(0.0, wrap(tau, period));
      if (axis.residual < options.tol && (!best || axis.tau < best->tau)) best = std::move(axis);
    }
    if (best) return best;
  }

  // Otherwise the best angle for each shift is arg(G(tau)) / 2.
  std::optional<SymmetryAxis> best;
  auto optimal = [&](double tau) { return spec.energy - std::abs(spec.g(tau)); };
  for (double tau : periodic_minima(optimal, period, options.shift_candidates)) {
    const double theta = wrap(0.5 * std::arg(spec.g(tau)), std::numbers::pi);
    auto axis = build(theta, wrap(tau, period));
    if (axis.residual >= options.tol) continue;
    if (!best || axis.theta < best->theta - 1e-12 ||
        (std::abs(axis.theta - best->theta) <= 1e-12 && axis.tau < best->tau)) {
      best = std::move(axis);
    }
  }
  return best;
}

}  // namespace choreo
