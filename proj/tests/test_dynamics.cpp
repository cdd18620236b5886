#include "choreo/dynamics.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>

using namespace choreo;

namespace {

// Straight pairwise sum, written independently of the library kernels.
Positions pairwise_flat(const Positions& q, const std::vector<double>& m, const ForceLaw& f, double central) {
  Positions a = Positions::Zero(q.rows(), q.cols());
  for (int k = 0; k < q.cols(); ++k) {
    for (int j = 0; j < q.cols(); ++j) {
      if (j == k) continue;
      const Vec d = q.col(j) - q.col(k);
      a.col(k) += m[j] * d * f(d.squaredNorm());
    }
    if (central > 0.0) a.col(k) -= central * q.col(k) * f(q.col(k).squaredNorm());
  }
  return a;
}

Positions random_positions(std::mt19937_64& gen, int dim, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Positions q(dim, n);
  for (int i = 0; i < q.size(); ++i) q.data()[i] = g(gen);
  return q;
}

Vec on_surface(std::mt19937_64& gen, int sigma) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec x(3);
  if (sigma == 1) {
    for (int i = 0; i < 3; ++i) x(i) = g(gen);
    return x.normalized();
  }
  x(0) = g(gen);
  x(1) = g(gen);
  x(2) = std::sqrt(1.0 + x(0) * x(0) + x(1) * x(1));
  return x;
}

Vec tangent(std::mt19937_64& gen, const Vec& q, int sigma) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec w(3);
  for (int i = 0; i < 3; ++i) w(i) = g(gen);
  return w - (odot(q, w, sigma) / sigma) * q;
}

// Two unit masses on an ellipse of eccentricity 0.5, period 2 pi sqrt(a^3 / 2).
SystemState eccentric_pair() {
  Positions q(2, 2), v(2, 2);
  q << -0.5, 0.5, 0.0, 0.0;
  v << 0.0, 0.0, -0.5, 0.5;
  return SystemState{q, v, 0.0};
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("accel_flat examples") {
    const ForceLaw f = ForceLaw::classical();
    Positions q(2, 2);
    q << 0, 1, 0, 0;
    Positions a = accel_flat(q, MassVector::equal(2), f);
    CHECK(a(0, 0) == doctest::Approx(1.0));
    CHECK(a(1, 0) == doctest::Approx(0.0));
    CHECK(a(0, 1) == doctest::Approx(-1.0));

    Positions tri(2, 3);
    tri << 0, 1, 0.5, 0, 0, std::sqrt(3.0) / 2;
    a = accel_flat(tri, MassVector::equal(3), f);
    const Vec centroid = tri.rowwise().mean();
    for (int k = 0; k < 3; ++k) {
      CHECK(a.col(k).norm() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
      const Vec to_centre = (centroid - tri.col(k)).normalized();
      CHECK(a.col(k).normalized().dot(to_centre) == doctest::Approx(1.0).epsilon(1e-14));
    }

    Positions line(2, 3);
    line << 0, 1, 3, 0, 0, 0;
    const std::vector<double> m{1, 2, 3};
    a = accel_flat(line, MassVector(m), f);
    CHECK(a(0, 0) == doctest::Approx(2.0 + 9.0 / 27.0).epsilon(1e-14));
    CHECK((a - pairwise_flat(line, m, f, 0.0)).norm() < 1e-14);
  }

  TEST_CASE("accel_flat_fixed_center examples") {
    const ForceLaw f = ForceLaw::classical();
    Positions one(2, 1);
    one << 1, 0;
    Positions a = accel_flat_fixed_center(one, MassVector::equal(1), f, 1.0);
    CHECK(a(0, 0) == doctest::Approx(-1.0));
    CHECK(a(1, 0) == doctest::Approx(0.0));

    std::mt19937_64 gen(3);
    const Positions q = random_positions(gen, 2, 4);
    const MassVector m({1.0, 2.0, 0.5, 1.5});
    CHECK((accel_flat_fixed_center(q, m, f, 0.0) - accel_flat(q, m, f)).norm() == 0.0);

    Positions two(2, 2);
    two << 1, -1, 0, 0;
    a = accel_flat_fixed_center(two, MassVector::equal(2), f, 1.0);
    CHECK(a(0, 0) == doctest::Approx(-1.25).epsilon(1e-14));
    CHECK((a - pairwise_flat(two, {1, 1}, f, 1.0)).norm() < 1e-14);
  }

  TEST_CASE("accel_flat matches the pairwise oracle on random inputs") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    const ForceLaw f({{1.0, 1.5}, {0.3, 2.0}});
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + trial % 6;
      const int dim = 2 + trial % 2;
      std::vector<double> m(n);
      for (auto& x : m) x = u(gen);
      const Positions q = random_positions(gen, dim, n);
      const Positions a = accel_flat(q, MassVector(m), f);
      CHECK((a - pairwise_flat(q, m, f, 0.0)).norm() <= 1e-12 * (1.0 + a.norm()));
    }
  }

  TEST_CASE("flat momentum balance, translation invariance and rotation equivariance") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    const ForceLaw f = ForceLaw::classical();
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + trial % 7;
      std::vector<double> mv(n);
      for (auto& x : mv) x = u(gen);
      const MassVector m(mv);
      const Positions q = random_positions(gen, 2, n);
      const Positions a = accel_flat(q, m, f);

      Vec momentum = Vec::Zero(2);
      double scale = 0.0;
      for (int k = 0; k < n; ++k) {
        momentum += mv[k] * a.col(k);
        scale += mv[k] * a.col(k).norm();
      }
      CHECK(momentum.norm() <= 1e-12 * scale);

      Vec shift(2);
      shift << u(gen), -u(gen);
      const Positions moved = q.colwise() + shift;
      CHECK((accel_flat(moved, m, f) - a).norm() <= 1e-10 * a.norm());

      const Eigen::Matrix2d r = Eigen::Rotation2Dd(angle(gen)).toRotationMatrix();
      CHECK((accel_flat(r * q, m, f) - r * a).norm() <= 1e-10 * a.norm());
    }
  }

  TEST_CASE("accel_curved examples") {
    Positions q(3, 2), v = Positions::Zero(3, 2);
    q << 1, 0, 0, 1, 0, 0;
    Positions a = accel_curved(q, v, MassVector::equal(2), 1);
    CHECK((a.col(0) - Vec::Unit(3, 1)).norm() < 1e-15);

    q << 0, 1, 0, 0, 1, std::sqrt(2.0);
    a = accel_curved(q, v, MassVector::equal(2), -1);
    CHECK((a.col(0) - Vec::Unit(3, 0)).norm() < 1e-14);

    Positions one(3, 1), vel(3, 1);
    one << 1, 0, 0;
    vel << 0, 0.7, 0;
    a = accel_curved(one, vel, MassVector::equal(1), 1);
    CHECK((a.col(0) + 0.49 * one.col(0)).norm() < 1e-15);
  }

  TEST_CASE("accel_curved_fixed_center examples") {
    Positions one(3, 1);
    one << 1, 0, 0;
    const Positions zero = Positions::Zero(3, 1);
    Positions a = accel_curved_fixed_center(one, zero, MassVector::equal(1), 1, 1.0);
    CHECK((a.col(0) - Vec::Unit(3, 2)).norm() < 1e-15);

    std::mt19937_64 gen(9);
    Positions q(3, 3), v(3, 3);
    for (int k = 0; k < 3; ++k) {
      q.col(k) = on_surface(gen, 1);
      v.col(k) = tangent(gen, q.col(k), 1);
    }
    const MassVector m({1.0, 2.0, 3.0});
    CHECK((accel_curved_fixed_center(q, v, m, 1, 0.0) - accel_curved(q, v, m, 1)).norm() == 0.0);

    // Latitude z = 0.6: direct substitution into the center term.
    Positions lat(3, 1);
    lat << 0.8, 0.0, 0.6;
    a = accel_curved_fixed_center(lat, zero, MassVector::equal(1), 1, 2.0);
    const double c = 0.6;
    const Vec e = Vec::Unit(3, 2);
    const Vec expected = 2.0 * (e - c * lat.col(0)) / std::pow(1.0 - c * c, 1.5);
    CHECK((a.col(0) - expected).norm() < 1e-14);
  }

  TEST_CASE("curved differentiated constraint") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (int sigma : {1, -1}) {
      for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        Positions q(3, n), v(3, n);
        std::vector<double> mv(n);
        for (int k = 0; k < n; ++k) {
          q.col(k) = on_surface(gen, sigma);
          v.col(k) = tangent(gen, q.col(k), sigma);
          mv[k] = u(gen);
        }
        const Positions a = accel_curved(q, v, MassVector(mv), sigma);
        for (int k = 0; k < n; ++k) {
          const double lhs = odot(q.col(k), a.col(k), sigma) + odot(v.col(k), v.col(k), sigma);
          CHECK(std::abs(lhs) <= 1e-10 * (1.0 + a.col(k).norm()));
        }
      }
    }
  }

  TEST_CASE("integrate a force-free body") {
    const Model model{.masses = MassVector::equal(1)};
    const SystemState s{Positions::Constant(2, 1, 0.3), Positions::Zero(2, 1), 0.0};
    const Trajectory t = integrate(s, model, 0.1, 10, Scheme::kRk4);
    REQUIRE(t.states.size() == 11u);
    CHECK((t.states.back().q - s.q).norm() == 0.0);
    CHECK(t.states.back().time == doctest::Approx(1.0));
  }

  TEST_CASE("two-body circular orbit closes after one period") {
    // Unit masses, unit separation: relative motion has omega^2 = 2 f(1) = 2.
    const double omega = std::sqrt(2.0);
    const double period = 2 * M_PI / omega;
    Positions q(2, 2), v(2, 2);
    q << -0.5, 0.5, 0, 0;
    v << 0, 0, -0.5 * omega, 0.5 * omega;
    const Model model{.masses = MassVector::equal(2)};
    const std::size_t steps = 4000;
    const Trajectory t = integrate(SystemState{q, v, 0.0}, model, period / steps, steps, Scheme::kRk4);
    const auto& end = t.states.back();
    CHECK((end.q - q).norm() < 1e-6);
    CHECK((end.v - v).norm() < 1e-6);

    const ResidualStats stats = verify_solution(t);
    CHECK(stats.max < 1e-6);
    REQUIRE(stats.energy_drift.has_value());
    CHECK(*stats.energy_drift < 1e-10);
  }

  TEST_CASE("verlet tracks the circular orbit") {
    const double omega = std::sqrt(2.0);
    Positions q(2, 2), v(2, 2);
    q << -0.5, 0.5, 0, 0;
    v << 0, 0, -0.5 * omega, 0.5 * omega;
    const Model model{.masses = MassVector::equal(2)};
    const double period = 2 * M_PI / omega;
    const Trajectory t = integrate(SystemState{q, v, 0.0}, model, period / 4000, 4000, Scheme::kVerlet);
    CHECK((t.states.back().q - q).norm() < 1e-4);
  }

  TEST_CASE("rk4 energy drift converges at fourth order") {
    const Model model{.masses = MassVector::equal(2)};
    auto drift = [&](double dt) {
      const auto steps = static_cast<std::size_t>(std::llround(2.4 / dt));
      const Trajectory t = integrate(eccentric_pair(), model, dt, steps, Scheme::kRk4);
      const double e0 = energy(model, t.states.front());
      double worst = 0.0;
      for (const auto& s : t.states) worst = std::max(worst, std::abs(energy(model, s) - e0));
      return worst;
    };
    const double coarse = drift(0.01);
    const double fine = drift(0.005);
    CHECK(coarse > 1e-12);
    CHECK(coarse / fine >= 12.0);
  }

  TEST_CASE("scheme and collision contracts") {
    const Model curved{.masses = MassVector::equal(1), .space = Space::curved(1)};
    Positions q(3, 1);
    q << 1, 0, 0;
    const SystemState s{q, Positions::Zero(3, 1), 0.0};
    CHECK_THROWS_AS(integrate(s, curved, 0.1, 1, Scheme::kVerlet), ContractError);
    const Model flat{.masses = MassVector::equal(2)};
    Positions p(2, 2);
    p << 0, 1, 0, 0;
    CHECK_THROWS_AS(integrate(SystemState{p, Positions::Zero(2, 2), 0.0}, flat, 0.1, 1, Scheme::kRk4Projected),
                    ContractError);
    CHECK_THROWS_AS(integrate(SystemState{p, Positions::Zero(2, 2), 0.0}, flat, 0.0, 1, Scheme::kRk4),
                    DomainError);

    Positions close(2, 2);
    close << 0, 1e-6, 0, 0;
    CHECK_THROWS_AS(accel_flat(close, MassVector::equal(2), ForceLaw::classical()), CollisionError);
    try {
      integrate(SystemState{close, Positions::Zero(2, 2), 0.0}, flat, 1e-3, 10, Scheme::kRk4);
      FAIL("expected a collision");
    } catch (const CollisionError& e) {
      CHECK(e.first() == 0);
      CHECK(e.second() == 1);
    }
  }

  TEST_CASE("verify_solution flags perturbed and static trajectories") {
    const double omega = std::sqrt(2.0);
    Positions q(2, 2), v(2, 2);
    q << -0.5, 0.5, 0, 0;
    v << 0, 0, -0.5 * omega, 0.5 * omega;
    const Model model{.masses = MassVector::equal(2)};
    Trajectory t = integrate(SystemState{q, v, 0.0}, model, 1e-3, 400, Scheme::kRk4);
    CHECK(verify_solution(t).max < 1e-6);
    t.states[200].q(0, 0) += 1e-2;
    CHECK(verify_solution(t).max > Tolerances{}.residual_abs);

    Trajectory still{.states = {}, .step = 0.1, .model = model};
    for (int i = 0; i < 6; ++i) still.states.push_back(SystemState{q, Positions::Zero(2, 2), 0.1 * i});
    const double force = accel_flat(q, model.masses, model.force).norm();
    CHECK(verify_solution(still).max == doctest::Approx(force).epsilon(1e-12));

    still.states.resize(4);
    CHECK_THROWS_AS(verify_solution(still), ContractError);
  }

  TEST_CASE("projection keeps curved states on the surface") {
    std::mt19937_64 gen(17);
    for (int sigma : {1, -1}) {
      Positions q(3, 2), v(3, 2);
      for (int k = 0; k < 2; ++k) {
        q.col(k) = on_surface(gen, sigma) * 1.01;
        v.col(k) = Vec::Constant(3, 0.2);
      }
      project_to_manifold(q, v, sigma);
      for (int k = 0; k < 2; ++k) {
        CHECK(std::abs(odot(q.col(k), q.col(k), sigma) - sigma) < 1e-14);
        CHECK(std::abs(odot(q.col(k), v.col(k), sigma)) < 1e-14);
      }
    }
  }
}
