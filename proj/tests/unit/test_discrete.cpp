#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "wander/discrete.hpp"
#include "wander/errors.hpp"

using namespace wander;
using namespace wander::discrete;
using R = Rational;

namespace {

DiscreteSystem<R> translation(SurfaceMap<R> surfaces = {}) {
  return DiscreteSystem<R>(Domain::half_line, {Piece<R>{R(0), std::nullopt, R(1), R(1)}}, std::move(surfaces));
}

DiscreteSystem<R> rotation(R by) {
  return DiscreteSystem<R>(Domain::circle,
                           {Piece<R>{R(0), R(1) - by, R(1), by}, Piece<R>{R(1) - by, R(1), R(1), by - R(1)}});
}

// Oracle for x -> x + 1 on a grid of [0, 1): x_i meets every [m, m + len_m) for m <= M
// iff i h < len_m for all m, i.e. iff i < ceil(min len / h).
long translation_oracle(double min_len, long points) {
  return static_cast<long>(std::ceil(min_len * points - 1e-9));
}

}  // namespace

TEST_CASE("forward orbits") {
  const auto t = forward_orbit(translation(), R(1, 4), 3);
  CHECK(t == std::vector<R>{R(1, 4), R(5, 4), R(9, 4)});
  const auto c = forward_orbit(rotation(R(1, 3)), R(0), 3);
  CHECK(c == std::vector<R>{R(0), R(1, 3), R(2, 3)});
  const DiscreteSystem<double> td(Domain::half_line, {Piece<double>{0.0, std::nullopt, 1.0, 1.0}});
  const auto d = forward_orbit(td, 0.25, 3);
  CHECK(d[2] == doctest::Approx(2.25));
  CHECK(forward_orbit(translation(), R(0), 0).empty());
}

TEST_CASE("orbits of a map with a reflected piece stay injective") {
  // [0, 1) -> (1, 2] reflected, [1, inf) -> [3, inf) shifted
  const DiscreteSystem<R> sys(Domain::half_line,
                              {Piece<R>{R(0), R(1), R(-1), R(2)}, Piece<R>{R(1), std::nullopt, R(1), R(2)}});
  CHECK(sys.measure_preserving());
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  const long points = 500;
  const long steps = 8;
  for (long i = 0; i < points; ++i) {
    for (const R& y : forward_orbit(sys, R(2 * i + 1, 2 * points), steps)) seen.insert({y.num(), y.den()});
  }
  CHECK(seen.size() == static_cast<std::size_t>(points * steps));
}

TEST_CASE("non-injective maps are rejected") {
  CHECK_THROWS_AS(DiscreteSystem<R>(Domain::half_line, {Piece<R>{R(0), R(1), R(1), R(0)},
                                                        Piece<R>{R(1), std::nullopt, R(1), R(-1)}}),
                  Error);
  CHECK_THROWS_AS(DiscreteSystem<R>(Domain::circle, {Piece<R>{R(0), R(1), R(2), R(0)}}), Error);
  CHECK_THROWS_AS(DiscreteSystem<R>(Domain::half_line, {Piece<R>{R(0), std::nullopt, R(-1), R(0)}}), Error);
  CHECK_THROWS_AS(DiscreteSystem<R>(Domain::half_line, {Piece<R>{R(0), R(1), R(1), R(5)},
                                                        Piece<R>{R(2), std::nullopt, R(1), R(0)}}),
                  Error);
  CHECK_THROWS_AS(translation().apply(R(-1)), Error);
}

TEST_CASE("measure preservation bookkeeping") {
  CHECK(check_measure_preservation(translation(), R(0), R(5), 50).max_distortion == 0.0);
  const auto iet = random_wandering_system(3, 6, 100);
  const auto r = check_measure_preservation(iet, R(0), R(6), 600);
  CHECK(r.preserving);
  CHECK(r.max_distortion <= 1.0 / 100);
  const DiscreteSystem<R> doubling(Domain::half_line, {Piece<R>{R(0), std::nullopt, R(2), R(0)}});
  const auto d = check_measure_preservation(doubling, R(0), R(1), 10);
  CHECK_FALSE(d.preserving);
  CHECK(d.max_distortion == doctest::Approx(0.1));
}

TEST_CASE("shrinking surfaces leave a null transition set") {
  const auto sys = translation(geometric_family<R>(20, R(1, 2), R(1, 2)));
  CHECK(sys.surface_measure(20) == doctest::Approx(std::ldexp(1.0, -20)));
  const long points = 1'000'000;
  const auto p = estimate_transition_measure_discrete(sys, 1, 20, Grid<R>{R(0), R(1), points});
  REQUIRE(p.depths.size() == 20);
  for (const auto& d : p.depths) {
    const long expected = translation_oracle(std::ldexp(1.0, -d.M), points);
    CHECK(d.transition == expected);
    CHECK(d.censored == 0);
  }
  CHECK(p.depths.back().estimate.value <= std::ldexp(1.0, -20) + 2 * p.resolution);
}

TEST_CASE("constant-width surfaces keep half the line") {
  const auto sys = translation(geometric_family<R>(20, R(1, 2), R(1)));
  const auto p = estimate_transition_measure_discrete(sys, 1, 20, Grid<R>{R(0), R(1), 100'000});
  CHECK(p.depths.back().estimate.value == doctest::Approx(0.5).epsilon(1e-12));

  const DiscreteSystem<double> dsys(Domain::half_line, {Piece<double>{0.0, std::nullopt, 1.0, 1.0}},
                                    geometric_family<double>(20, 0.5, 1.0));
  const auto q = estimate_transition_measure_discrete(dsys, 1, 20, Grid<double>{0.0, 1.0, 100'000});
  CHECK(std::abs(q.depths.back().estimate.value - 0.5) <= 0.01);
}

TEST_CASE("empty surfaces admit no transitions") {
  const auto p = estimate_transition_measure_discrete(translation(), 1, 5, Grid<R>{R(0), R(1), 1000});
  for (const auto& d : p.depths) CHECK(d.estimate.value == 0.0);
}

TEST_CASE("circle rotation: periodic orbits are decided, aperiodic budgets are censored") {
  SurfaceMap<R> surfaces;
  surfaces[1] = {Interval<R>{R(0), R(1, 2)}};
  surfaces[2] = {Interval<R>{R(1, 2), R(1)}};
  const DiscreteSystem<R> rot(Domain::circle,
                              {Piece<R>{R(0), R(2, 3), R(1), R(1, 3)}, Piece<R>{R(2, 3), R(1), R(1), R(-2, 3)}},
                              surfaces);
  // every orbit {x, x + 1/3, x + 2/3} meets both halves
  const auto p = estimate_transition_measure_discrete(rot, 1, 2, Grid<R>{R(0), R(1), 999});
  CHECK(p.depths.back().transition == 999);
  CHECK(p.depths.back().censored == 0);

  SurfaceMap<R> tiny;
  tiny[1] = {Interval<R>{R(0), R(1, 1000)}};
  tiny[2] = {Interval<R>{R(0), R(1, 1000)}};
  const DiscreteSystem<R> slow(Domain::circle,
                               {Piece<R>{R(0), R(1) - R(1, 7919), R(1), R(1, 7919)},
                                Piece<R>{R(1) - R(1, 7919), R(1), R(1), R(1, 7919) - R(1)}},
                               tiny);
  const auto c = estimate_transition_measure_discrete(slow, 1, 2, Grid<R>{R(0), R(1), 100}, 50);
  CHECK(c.depths.back().censored > 0);
}

TEST_CASE("injection bound and monotonicity on generated systems") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto sys = random_wandering_system(seed, 10, 500);
    CHECK(sys.measure_preserving());
    const auto p = estimate_transition_measure_discrete(sys, 1, 9, Grid<R>{R(0), R(1), 10'000});
    for (std::size_t j = 0; j < p.depths.size(); ++j) {
      const auto& d = p.depths[j];
      CHECK(d.censored == 0);
      CHECK(d.estimate.value <= d.min_surface + p.resolution);
      if (j > 0) CHECK(d.estimate.value <= p.depths[j - 1].estimate.value);
    }
  }
}

TEST_CASE("rational and floating arithmetic agree") {
  const auto rs = translation(geometric_family<R>(10, R(3, 4), R(3, 4)));
  const DiscreteSystem<double> ds(Domain::half_line, {Piece<double>{0.0, std::nullopt, 1.0, 1.0}},
                                  geometric_family<double>(10, 0.75, 0.75));
  const auto a = estimate_transition_measure_discrete(rs, 1, 10, Grid<R>{R(0), R(1), 4096});
  const auto b = estimate_transition_measure_discrete(ds, 1, 10, Grid<double>{0.0, 1.0, 4096});
  for (std::size_t j = 0; j < a.depths.size(); ++j) CHECK(a.depths[j].transition == b.depths[j].transition);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(estimate_transition_measure_discrete(translation(), 0, 5, Grid<R>{R(0), R(1), 10}), Error);
  CHECK_THROWS_AS(estimate_transition_measure_discrete(translation(), 3, 2, Grid<R>{R(0), R(1), 10}), Error);
  CHECK_THROWS_AS(estimate_transition_measure_discrete(translation(), 1, 2, Grid<R>{R(1), R(0), 10}), Error);
}
