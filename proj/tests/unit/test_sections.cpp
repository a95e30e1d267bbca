#include <doctest.h>

#include <cmath>

#include "wander/errors.hpp"
#include "wander/rng.hpp"
#include "wander/sections.hpp"

using namespace wander;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const HamiltonianSystem kepler(2, PotentialSpec::radial(1.0, 1.0));

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::precondition;
}

}  // namespace

TEST_CASE("transversality margin") {
  CHECK(transversality_margin(PhasePoint{vec({0.25, 0}), vec({-1, 0})}, 4) == doctest::Approx(-1.0));
  CHECK(transversality_margin(PhasePoint{vec({0.25, 0}), vec({0, 1})}, 4) == doctest::Approx(0.0));
}

TEST_CASE("surface family emptiness follows the Hill region") {
  const SurfaceFamily fam(kepler, -2.0, 1, 8);
  CHECK_FALSE(fam.nonempty(1));  // 2(E + m) = -2
  CHECK(fam.nonempty(2));
  CHECK(fam.max_kinetic(8) == doctest::Approx(12.0));
}

TEST_CASE("chart points lie on the surface with inward momentum") {
  const double E = -1.0;
  const int m = 8;
  const SurfaceChart chart(kepler, E, m);
  const double pmax = std::sqrt(2 * (E + m));
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(5, i);
    const Vector u = chart.sample(rng);
    const PhasePoint x = chart.embed_checked(u);
    CHECK(std::abs(x.q.norm() - 1.0 / m) <= 1e-12);
    CHECK(kepler.energy(x) == doctest::Approx(E).epsilon(1e-12));
    const double margin = transversality_margin(x, m);
    CHECK(margin <= 0.0);
    CHECK(margin >= -pmax - 1e-12);
    CHECK(chart_difference(chart.coordinates(x), u, 2).norm() <= 1e-9);
  }
}

TEST_CASE("chart density is the symplectic density 1/m in the plane") {
  // omega(d/dphi, d/dw) = <dq/dphi, dp/dw> = (1/m) for q = (cos, sin)/m, p = w t + p_r r
  for (int m : {4, 8}) {
    const SurfaceChart chart(kepler, -1.0, m);
    for (std::uint64_t i = 0; i < 50; ++i) {
      CounterRng rng(6, i);
      CHECK(chart.density(chart.sample(rng)) == doctest::Approx(1.0 / m).epsilon(1e-6));
    }
  }
}

TEST_CASE("free-particle return map") {
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  const HitEvent start{4, 0.0, PhasePoint{vec({0.25, 0}), vec({-1, 0})}, -1.0};
  const auto r = poincare_map(free, 0.5, start, 5, 10.0, FlowOptions{}, false);
  CHECK((r.hit.point.q - vec({0.2, 0})).norm() <= 1e-10);
  CHECK(r.hit.time == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("return maps preserve the section volume") {
  struct Case {
    int n, k, m;
  };
  for (const Case c : {Case{2, 4, 8}, Case{2, 3, 6}, Case{3, 4, 8}}) {
    const HamiltonianSystem sys(c.n, PotentialSpec::radial(1.0, 1.0));
    const SurfaceChart chart(sys, -1.0, c.k);
    int used = 0;
    for (std::uint64_t i = 0; used < 25 && i < 500; ++i) {
      CounterRng rng(7, i);
      try {
        const auto r = poincare_map(sys, -1.0, HitEvent{c.k, 0.0, chart.embed_checked(chart.sample(rng)), 0.0}, c.m,
                                    10.0, FlowOptions{});
        CHECK(std::abs(r.residual) <= 1e-6);
        CHECK(std::abs(r.hit.point.q.norm() - 1.0 / c.m) <= 1e-10);
        ++used;
      } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::no_hit || e.kind() == ErrorKind::collision_before_hit ||
               e.kind() == ErrorKind::tangential_hit));
      }
    }
    CHECK(used == 25);
  }
}

TEST_CASE("return maps compose and are injective on samples") {
  const SurfaceChart chart(kepler, -1.0, 4);
  std::vector<Vector> hits;
  for (std::uint64_t i = 0; hits.size() < 20 && i < 200; ++i) {
    CounterRng rng(8, i);
    const HitEvent start{4, 0.0, chart.embed_checked(chart.sample(rng)), 0.0};
    try {
      const auto direct = poincare_map(kepler, -1.0, start, 8, 10.0, FlowOptions{}, false);
      const auto first = poincare_map(kepler, -1.0, start, 6, 10.0, FlowOptions{}, false);
      const auto second = poincare_map(kepler, -1.0, first.hit, 8, 10.0, FlowOptions{}, false);
      CHECK((second.hit.point.state() - direct.hit.point.state()).norm() <= 1e-8);
      CHECK(first.hit.time + second.hit.time == doctest::Approx(direct.hit.time).epsilon(1e-9));
      hits.push_back(direct.hit.point.state());
    } catch (const Error&) {
    }
  }
  REQUIRE(hits.size() == 20);
  for (std::size_t a = 0; a < hits.size(); ++a)
    for (std::size_t b = a + 1; b < hits.size(); ++b) CHECK((hits[a] - hits[b]).norm() > 1e-8);
}

TEST_CASE("section errors") {
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  CHECK(kind_of([&] {
          poincare_map(free, 0.5, HitEvent{4, 0.0, PhasePoint{vec({0.25, 0}), vec({0, 1})}, 0.0}, 5, 10.0,
                       FlowOptions{});
        }) == ErrorKind::tangential_hit);
  // passes by H_5 at impact parameter 0.24 > 1/5
  CHECK(kind_of([&] {
          const double w = 0.96;
          poincare_map(free, 0.5, HitEvent{4, 0.0, PhasePoint{vec({0.25, 0}), vec({-std::sqrt(1 - w * w), w})}, 0.0},
                       5, 10.0, FlowOptions{});
        }) == ErrorKind::no_hit);
  const HamiltonianSystem line(1, PotentialSpec::radial(1.0, 1.0));
  CHECK(kind_of([&] { SurfaceChart(line, -1.0, 4); }) == ErrorKind::degenerate);
}
