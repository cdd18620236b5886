#include "choreo/choreography.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace choreo;

namespace {

FourierPath circle(double period) {
  FourierPath p(2, period, 1);
  p.cos_coeff(0, 1) = 1.0;
  p.sin_coeff(1, 1) = 1.0;
  return p;
}

FourierPath random_path(std::mt19937_64& gen, int dim, double period, int order, double decay = 0.5) {
  std::normal_distribution<double> g(0.0, 1.0);
  FourierPath p(dim, period, order);
  for (int d = 0; d < dim; ++d) {
    for (int m = 0; m <= order; ++m) {
      const double s = std::pow(decay, m);
      p.cos_coeff(d, m) = s * g(gen);
      if (m > 0) p.sin_coeff(d, m) = s * g(gen);
    }
  }
  return p;
}

// Loop with the single reflection axis theta = 0.
FourierPath one_axis_loop(double period) {
  FourierPath p(2, period, 2);
  p.cos_coeff(0, 1) = 1.0;
  p.sin_coeff(1, 1) = 1.0;
  p.cos_coeff(0, 2) = 0.3;
  p.sin_coeff(1, 2) = 0.3;
  return p;
}

ChoreographyConfig flat_config(FourierPath path, std::vector<double> masses) {
  const std::size_t n = masses.size();
  return ChoreographyConfig{.path = std::move(path),
                            .offsets = PhaseOffsets::equally_spaced(n),
                            .masses = MassVector(std::move(masses)),
                            .space = Space::flat(2)};
}

}  // namespace

TEST_SUITE("choreography") {
  TEST_CASE("fourier path evaluation") {
    const double period = 3.0;
    const FourierPath p = circle(period);
    const auto s = p.evaluate(0.0);
    const double w = 2 * M_PI / period;
    CHECK((s.p - Vec::Unit(2, 0)).norm() < 1e-15);
    CHECK(s.dp(0) == doctest::Approx(0.0));
    CHECK(s.dp(1) == doctest::Approx(w));
    CHECK(s.ddp(0) == doctest::Approx(-w * w));
    CHECK(p.frequency() == doctest::Approx(w));
  }

  TEST_CASE("fourier path periodicity and derivatives") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 20; ++trial) {
      const FourierPath p = random_path(gen, 3, 1.0 + trial % 5, 6);
      for (double t : {-1.3, 0.0, 0.77, 4.2}) {
        CHECK((p.position(t) - p.position(t + p.period())).norm() < 1e-12);
        const double h = 1e-4 * p.period();
        const Vec fd = (-p.position(t + 2 * h) + 8 * p.position(t + h) - 8 * p.position(t - h) +
                        p.position(t - 2 * h)) /
                       (12 * h);
        CHECK((fd - p.velocity(t)).norm() < 1e-8 * (1.0 + p.velocity(t).norm()));
        const auto s = p.evaluate(t);
        const Vec fd2 = (p.velocity(t + h) - p.velocity(t - h)) / (2 * h);
        CHECK((fd2 - s.ddp).norm() < 1e-4 * (1.0 + s.ddp.norm()));
      }
    }
  }

  TEST_CASE("fourier path transforms") {
    const FourierPath p = one_axis_loop(3.0);
    Vec c(2);
    c << 5.0, -3.0;
    CHECK((p.translated(c).position(0.4) - p.position(0.4) - c).norm() < 1e-14);
    const Eigen::Matrix2d r = rotation(0.7);
    CHECK((p.transformed(r, 0.5).position(0.2) - r * p.position(0.7)).norm() < 1e-14);
    CHECK(p.with_order(5).order() == 5);
    CHECK((p.with_order(5).position(1.1) - p.position(1.1)).norm() < 1e-15);
    CHECK(p.with_order(1).cos_coeff(0, 1) == 1.0);
  }

  TEST_CASE("phase offsets") {
    const PhaseOffsets h = PhaseOffsets::equally_spaced(4);
    CHECK(h.is_equally_spaced());
    CHECK(h[3] == 3.0);
    CHECK(h.at(5, 4.0) == doctest::Approx(5.0));
    CHECK(h.at(-1, 4.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(PhaseOffsets({0.0, 1.0, 2.5, 3.0}, true), ContractError);
    CHECK_NOTHROW(PhaseOffsets({0.0, 1.0, 2.5, 3.0}, false));
    ChoreographyConfig wrong_period = flat_config(circle(3.0), {1, 1, 1, 1});
    CHECK_THROWS_AS(wrong_period.check(), ContractError);
  }

  TEST_CASE("flat polygon examples") {
    const ForceLaw f = ForceLaw::classical();
    const PolygonResult two = polygon_flat(2, 0.5, f);
    CHECK(two.omega_squared_unit == doctest::Approx(2.0).epsilon(1e-14));
    const PolygonResult three = polygon_flat(3, 1.0 / std::sqrt(3.0), f);
    CHECK(three.omega_squared_unit == doctest::Approx(3.0).epsilon(1e-14));
    for (int n = 2; n <= 8; ++n) {
      const PolygonResult poly = polygon_flat(n, 1.0, f);
      CHECK(poly.config.path.period() == doctest::Approx(n));
      CHECK(verify_config(poly.config).max < 1e-8);
      CHECK(config_residual(poly.config) < 1e-12);
    }
    CHECK_THROWS_AS(polygon_flat(1, 1.0, f), DomainError);
    CHECK_THROWS_AS(polygon_flat(3, -1.0, f), DomainError);
  }

  TEST_CASE("flat polygon is a rigid rotation") {
    const PolygonResult poly = polygon_flat(5, 1.3, ForceLaw({{1.0, 1.5}, {0.5, 2.0}}));
    const auto& cfg = poly.config;
    for (int j = 1; j < 5; ++j) {
      const double ref = (cfg.path.position(j) - cfg.path.position(0)).norm();
      for (int i = 0; i < 64; ++i) {
        const double t = 5.0 * i / 64;
        CHECK(std::abs((cfg.path.position(t + j) - cfg.path.position(t)).norm() - ref) < 1e-12);
      }
    }
  }

  TEST_CASE("fixed-center flat polygon") {
    const PolygonResult poly = polygon_flat(4, 1.0, ForceLaw::classical(), 1.0);
    CHECK(poly.config.central_mass > 0.0);
    CHECK(poly.config.central_mass == doctest::Approx(poly.mass_scale));
    CHECK(verify_config(poly.config).max < 1e-8);
  }

  TEST_CASE("radius for a given body mass") {
    const ForceLaw f = ForceLaw::classical();
    for (int n : {2, 3, 6}) {
      const double r = polygon_flat_radius_for_mass(n, f, 1.7);
      CHECK(polygon_flat(n, r, f).mass_scale == doctest::Approx(1.7).epsilon(1e-10));
    }
  }

  TEST_CASE("curved polygon examples") {
    struct Case {
      int sigma;
      int n;
      double z;
      bool great;
    };
    for (const Case c : {Case{1, 3, 0.0, true}, Case{1, 3, 0.5, false}, Case{1, 4, 0.5, false},
                         Case{1, 5, 0.3, false}, Case{-1, 3, 1.2, false}, Case{-1, 5, 1.5, false}}) {
      CAPTURE(c.sigma);
      CAPTURE(c.n);
      const PolygonResult poly = polygon_curved(c.n, c.z, c.sigma);
      CHECK(poly.great_circle == c.great);
      CHECK(verify_config(poly.config).max < 1e-8);
      CHECK(config_constraint_drift(poly.config) < 1e-12);
    }
    CHECK_THROWS(polygon_curved(3, 1.0, 1));
    CHECK_THROWS(polygon_curved(3, 0.5, -1));
  }

  TEST_CASE("fixed-center curved polygon") {
    const PolygonResult poly = polygon_curved(3, 0.5, 1, 1.0);
    CHECK(verify_config(poly.config).max < 1e-8);
    CHECK_THROWS_AS(polygon_curved(3, 0.0, 1, 1.0), InfeasibleError);
  }

  TEST_CASE("recentre") {
    const PolygonResult poly = polygon_flat(4, 1.0, ForceLaw::classical());
    const ChoreographyConfig once = recentre(poly.config);
    CHECK(once.path == poly.config.path);

    Vec c(2);
    c << 5.0, -3.0;
    ChoreographyConfig moved = poly.config;
    moved.path = moved.path.translated(c);
    const ChoreographyConfig back = recentre(moved);
    for (double t : {0.0, 0.3, 1.7}) CHECK((back.path.position(t) - poly.config.path.position(t)).norm() < 1e-12);

    std::mt19937_64 gen(23);
    ChoreographyConfig loop = flat_config(random_path(gen, 2, 3.0, 5), {1.0, 2.0, 3.0});
    loop.path = loop.path.translated(c);
    const ChoreographyConfig centred = recentre(loop);
    for (int i = 0; i < 64; ++i) {
      const double t = 3.0 * i / 64;
      Vec sum = Vec::Zero(2);
      for (int k = 0; k < 3; ++k) sum += loop.masses[k] * centred.path.position(t + k);
      CHECK(sum.norm() < 1e-10);
    }
    CHECK(recentre(centred).path == centred.path);
  }

  TEST_CASE("symmetry axis of a circle") {
    const auto axis = detect_symmetry_axis(circle(3.0));
    REQUIRE(axis.has_value());
    CHECK(axis->theta == doctest::Approx(0.0));
    CHECK(axis->residual < 1e-10);
  }

  TEST_CASE("symmetry axis is rotation covariant") {
    const FourierPath base = one_axis_loop(3.0);
    const auto axis0 = detect_symmetry_axis(base);
    REQUIRE(axis0.has_value());
    CHECK(axis0->theta == doctest::Approx(0.0).epsilon(1e-9));
    for (double alpha : {0.4, 1.3, 2.9, -0.8}) {
      CAPTURE(alpha);
      const auto axis = detect_symmetry_axis(base.transformed(rotation(alpha), 0.37));
      REQUIRE(axis.has_value());
      const double expected = std::fmod(std::fmod(alpha, M_PI) + M_PI, M_PI);
      const double diff = std::remainder(axis->theta - expected, M_PI);
      CHECK(std::abs(diff) < 1e-8);
      // The normal form is reflection symmetric under time reversal.
      for (double t : {0.2, 0.9, 2.1}) {
        const Vec a = axis->normal_form.position(t);
        const Vec b = axis->normal_form.position(-t);
        CHECK(std::abs(a(0) - b(0)) < 1e-8);
        CHECK(std::abs(a(1) + b(1)) < 1e-8);
      }
    }
  }

  TEST_CASE("random dense loops have no symmetry axis") {
    std::mt19937_64 gen(29);
    for (int trial = 0; trial < 10; ++trial) {
      CHECK_FALSE(detect_symmetry_axis(random_path(gen, 2, 3.0, 6, 0.8)).has_value());
    }
  }
}
