#include <doctest.h>

#include <Eigen/LU>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "wander/errors.hpp"
#include "wander/flow.hpp"

using namespace wander;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// time to fall from rest at r0 to r under V = -1/r: integral of dr / sqrt(2 (1/r - 1/r0)),
// written with r0 - s taken from the quadrature's endpoint complement to avoid cancellation
double fall_time(double r0, double r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double mid = 0.5 * (r + r0);
  return ts.integrate(
      [r0, mid](double s, double sc) {
        const double gap = s > mid ? sc : r0 - s;
        return std::sqrt(s * r0 / (2.0 * gap));
      },
      r, r0);
}

const HamiltonianSystem kepler(2, PotentialSpec::radial(1.0, 1.0));
const HamiltonianSystem free2(2, PotentialSpec::free_particle());

// bounded, well-separated Kepler state: perihelion kept away from the pole
PhasePoint random_bound_state(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = 0.6 + 0.6 * u(gen), a = 2 * M_PI * u(gen);
  const double speed = std::sqrt(1.0 / r) * (0.7 + 0.5 * u(gen));
  const double tilt = 0.4 * (u(gen) - 0.5);
  const Vector q = vec({r * std::cos(a), r * std::sin(a)});
  const Vector t = vec({-std::sin(a + tilt), std::cos(a + tilt)});
  return PhasePoint{q, speed * t};
}

}  // namespace

TEST_CASE("free particle moves on a straight line") {
  const auto traj = integrate(free2, PhasePoint{vec({0, 0}), vec({1, 0})}, 2.0, FlowOptions{});
  CHECK(traj.termination == Termination::time_limit);
  CHECK((traj.final_point.q - vec({2, 0})).norm() <= 1e-12);
  CHECK((traj.state_at(0.5).q - vec({0.5, 0})).norm() <= 1e-12);
}

TEST_CASE("radial fall ends in a collision at the closed-form time") {
  const double oracle = fall_time(1.0, 0.0);
  CHECK(oracle == doctest::Approx(M_PI / (2 * std::sqrt(2.0))).epsilon(1e-12));
  const auto traj = integrate(kepler, PhasePoint{vec({1, 0}), vec({0, 0})}, 3.0, FlowOptions{});
  CHECK(traj.termination == Termination::collision);
  const auto hit = detect_collision(traj);
  REQUIRE(hit.has_value());
  CHECK(std::abs(hit->time - oracle) <= 1e-6);
  CHECK_THROWS_AS(flow_map(kepler, PhasePoint{vec({1, 0}), vec({0, 0})}, 2.0, FlowOptions{}), Error);
}

TEST_CASE("circular orbit conserves energy and never collides") {
  const auto traj = integrate(kepler, PhasePoint{vec({1, 0}), vec({0, 1})}, 100.0, FlowOptions{});
  CHECK(traj.termination == Termination::time_limit);
  CHECK(traj.energy_drift <= 1e-8 * 1.5);
  CHECK_FALSE(detect_collision(traj).has_value());
  CHECK(traj.final_point.q.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hyperbolic radial escape") {
  const auto traj = integrate(kepler, PhasePoint{vec({1, 0}), vec({2, 0})}, 1e4, FlowOptions{});
  CHECK(traj.termination == Termination::escape_radius);
  CHECK_FALSE(detect_collision(traj).has_value());
}

TEST_CASE("hitting times") {
  const auto hit = hit_surface(free2, PhasePoint{vec({2, 0}), vec({-1, 0})}, 0.5, 1, 10.0, FlowOptions{});
  CHECK(hit.time == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((hit.point.q - vec({1, 0})).norm() <= 1e-10);
  CHECK(hit.margin == doctest::Approx(-1.0));

  const auto fall = hit_surface(kepler, PhasePoint{vec({1, 0}), vec({0, 0})}, -1.0, 2, 10.0, FlowOptions{});
  CHECK(std::abs(fall.time - fall_time(1.0, 0.5)) <= 1e-6);
  CHECK(std::abs(fall.point.q.norm() - 0.5) <= 1e-10);

  try {
    hit_surface(free2, PhasePoint{vec({2, 0}), vec({1, 0})}, 0.5, 1, 10.0, FlowOptions{});
    FAIL("expected no_hit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_hit);
  }
}

TEST_CASE("recorded hits lie on their spheres") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int events = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = 2 * M_PI * u(gen);
    const PhasePoint x{vec({std::cos(a), std::sin(a)}), vec({0.05 * u(gen), -0.1 * u(gen)})};
    const auto traj = integrate(kepler, x, 5.0, FlowOptions{}, {2, 3, 5});
    for (const auto& e : traj.events) {
      CHECK(std::abs(e.point.q.norm() - 1.0 / e.m) <= 1e-10);
      CHECK(e.margin <= 0.0);
      ++events;
    }
  }
  CHECK(events > 0);
}

TEST_CASE("energy drift and time reversal") {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const PhasePoint x = random_bound_state(gen);
    const double E = kepler.energy(x);
    const auto traj = integrate(kepler, x, 20.0, FlowOptions{});
    REQUIRE(traj.termination == Termination::time_limit);
    CHECK(traj.energy_drift <= 1e-8 * (1 + std::abs(E)));
    const PhasePoint back = flow_map(kepler, traj.final_point, -20.0, FlowOptions{});
    CHECK((back.state() - x.state()).norm() <= 1e-7 * (1 + x.state().norm()));
  }
}

TEST_CASE("time-t map preserves phase volume") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_bound_state(gen);
    const double t = 1.5;
    const double h = 1e-5;
    Matrix D(4, 4);
    for (int j = 0; j < 4; ++j) {
      Vector plus = x.state(), minus = x.state();
      plus(j) += h;
      minus(j) -= h;
      D.col(j) = (flow_map(kepler, PhasePoint::from_state(plus), t, FlowOptions{}).state() -
                  flow_map(kepler, PhasePoint::from_state(minus), t, FlowOptions{}).state()) /
                 (2 * h);
    }
    CHECK(D.determinant() == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("option validation") {
  FlowOptions bad;
  bad.tol_rel = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = FlowOptions{};
  bad.r_min = 2.0;
  bad.r_max = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
