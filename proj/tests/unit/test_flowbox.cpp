#include <doctest.h>

#include <cmath>

#include "wander/errors.hpp"
#include "wander/flowbox.hpp"

using namespace wander;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const auto one = [](const Vector&) { return 1.0; };

}  // namespace

TEST_CASE("free particle flow box is a sheared box") {
  // tube volume = 2t * integral over K of |p_1| = 2 * 0.2 * 1.5
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  const CoordinatePlanePatch patch(free, 0, 0.0, vec({0, 1, 0}), vec({1, 2, 1}));
  FlowboxOptions opts;
  opts.lhs_method = FlowboxLhs::tube_quadrature;
  const auto r = flowbox_volume_check(patch, one, 0.2, opts);
  CHECK(std::abs(r.lhs.value - 0.6) <= 1e-10);
  CHECK(std::abs(r.rhs.value - 0.6) <= 1e-10);

  opts.lhs_method = FlowboxLhs::monte_carlo;
  opts.samples = 100'000;
  const auto mc = flowbox_volume_check(patch, one, 0.2, opts);
  CHECK(mc.lhs.std_error > 0.0);
  CHECK(std::abs(mc.lhs.value - 0.6) <= 4 * mc.lhs.std_error);

  const auto zero = flowbox_volume_check(patch, [](const Vector&) { return 0.0; }, 0.2, opts);
  CHECK(zero.lhs.value == 0.0);
  CHECK(zero.rhs.value == 0.0);
}

TEST_CASE("weighted free-particle box") {
  // f(u) = 1 + sum u on K = {q2 in [0,1], p1 in [1,2], p2 in [0,1]}: integral of (1 + q2 + p1 + p2) p1
  // = 1.5 + 0.75 + 7/3 + 0.75
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  const CoordinatePlanePatch patch(free, 0, 0.0, vec({0, 1, 0}), vec({1, 2, 1}));
  FlowboxOptions opts;
  opts.lhs_method = FlowboxLhs::tube_quadrature;
  const auto r = flowbox_volume_check(patch, [](const Vector& u) { return 1.0 + u.sum(); }, 0.1, opts);
  const double expected = 0.2 * (1.5 + 0.75 + 7.0 / 3.0 + 0.75);
  CHECK(r.rhs.value == doctest::Approx(expected).epsilon(1e-10));
  CHECK(r.lhs.value == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("kepler flow box on a section") {
  const HamiltonianSystem kepler(2, PotentialSpec::radial(1.0, 1.0));
  const SpherePatch patch(kepler, -1.0, 4, vec({0.2, 0.3}), vec({0.3, 0.5}));
  FlowboxOptions opts;
  opts.flow.tol_rel = opts.flow.tol_abs = 1e-10;
  opts.lhs_method = FlowboxLhs::tube_quadrature;
  const auto r = flowbox_volume_check(patch, one, 1e-2, opts);
  // chart density is 1/m, so rhs = 2t * area(K) / m
  CHECK(r.rhs.value == doctest::Approx(2e-2 * 0.1 * 0.2 / 4).epsilon(1e-8));
  CHECK(r.lhs.value == doctest::Approx(r.rhs.value).epsilon(1e-6));

  opts.lhs_method = FlowboxLhs::monte_carlo;
  opts.samples = 50'000;
  const auto mc = flowbox_volume_check(patch, one, 1e-2, opts);
  CHECK(std::abs(mc.lhs.value - mc.rhs.value) <= 4 * mc.lhs.std_error);
}

TEST_CASE("flow box preconditions") {
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  CHECK_THROWS_AS(CoordinatePlanePatch(free, 0, 0.0, vec({0, 1, 0}), vec({1, 0.5, 1})), Error);
  const CoordinatePlanePatch patch(free, 0, 0.0, vec({0, 1, 0}), vec({1, 2, 1}));
  CHECK_THROWS_AS(flowbox_volume_check(patch, one, -0.1, FlowboxOptions{}), Error);
  // p_1 = 0 inside K: the flow is tangent to the plane
  try {
    const CoordinatePlanePatch tangent(free, 0, 0.0, vec({0, -1, 0}), vec({1, 1, 1}));
    FlowboxOptions opts;
    opts.lhs_method = FlowboxLhs::tube_quadrature;
    flowbox_volume_check(tangent, one, 0.1, opts);
    FAIL("expected tangential_hit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::tangential_hit);
  }
}
