#include <doctest.h>

#include <cmath>
#include <random>

#include "wander/errors.hpp"
#include "wander/hamiltonian.hpp"
#include "wander/kaehler.hpp"

using namespace wander;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vector randn(int d, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(gen);
  return v;
}

// five-point stencil, independent of the library's finite differences
Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-4) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto at = [&](double s) {
      Vector y = x;
      y(i) += s * h;
      return f(y);
    };
    g(i) = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
  }
  return g;
}

const HamiltonianSystem kepler2(2, PotentialSpec::radial(1.0, 1.0));

}  // namespace

TEST_CASE("potential values") {
  CHECK(kepler2.potential(vec({1, 0})) == doctest::Approx(-1.0));
  CHECK((kepler2.potential_gradient(vec({1, 0})) - vec({1, 0})).norm() <= 1e-15);
  const HamiltonianSystem s(2, PotentialSpec::radial(2.0, 3.0));
  CHECK(s.potential(vec({0, 2})) == doctest::Approx(-0.75));
  CHECK_THROWS_AS(kepler2.potential(vec({0, 0})), Error);
  try {
    kepler2.potential(vec({0, 0}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singularity);
  }
}

TEST_CASE("energy") {
  CHECK(kepler2.energy(PhasePoint{vec({1, 0}), vec({0, 1})}) == doctest::Approx(-0.5));
  CHECK(kepler2.energy(PhasePoint{vec({1, 0}), vec({0, 0})}) == doctest::Approx(kepler2.potential(vec({1, 0}))));
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  CHECK(free.energy(PhasePoint{vec({0, 0}), vec({1, 0})}) == doctest::Approx(0.5));
}

TEST_CASE("hamiltonian vector field") {
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  CHECK((free.vector_field(PhasePoint{vec({0, 0}), vec({1, 0})}) - vec({1, 0, 0, 0})).norm() == 0.0);
  CHECK((kepler2.vector_field(PhasePoint{vec({1, 0}), vec({0, 1})}) - vec({0, 1, -1, 0})).norm() <= 1e-15);
}

TEST_CASE("iota_{X_H} omega equals dH") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const PhasePoint x{randn(2, gen), randn(2, gen)};
    const Vector X = kepler2.vector_field(x);
    const forms::KForm lhs = forms::interior_product(X, forms::symplectic_form(2));
    const Vector dH = fd_gradient([&](const Vector& y) { return kepler2.energy(PhasePoint::from_state(y)); }, x.state());
    for (int i = 0; i < 4; ++i) CHECK(lhs[i] == doctest::Approx(dH(i)).epsilon(1e-8));
  }
}

TEST_CASE("tangential force") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) CHECK(kepler2.tangential_gradient(randn(2, gen)).norm() <= 1e-14);
  const HamiltonianSystem pert(2, PotentialSpec{1.0, 1.0, make_perturbation("product", 1.0, 2)});
  CHECK((pert.tangential_gradient(vec({1, 0})) - vec({0, 1})).norm() <= 1e-12);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector q = randn(3, gen), v = randn(3, gen);
    const Vector Qv = project_tangential(q, v);
    CHECK(Qv.norm() <= v.norm() + 1e-15);
    CHECK(std::abs(Qv.dot(q)) <= 1e-12 * (1 + q.norm() * v.norm()));
  }
}

TEST_CASE("gradient matches finite differences and homogeneity holds") {
  std::mt19937_64 gen(5);
  for (double alpha : {0.5, 1.0, 2.5}) {
    const HamiltonianSystem s(3, PotentialSpec::radial(alpha, 1.7));
    for (int trial = 0; trial < 20; ++trial) {
      Vector q = randn(3, gen);
      q *= (0.3 + q.norm()) / q.norm();
      const Vector fd = fd_gradient([&](const Vector& y) { return s.potential(y); }, q, 1e-5);
      CHECK((s.potential_gradient(q) - fd).norm() <= 1e-6 * fd.norm());
      const double lambda = 0.2 + 3.0 * std::abs(randn(1, gen)(0));
      CHECK(s.potential(lambda * q) == doctest::Approx(std::pow(lambda, -alpha) * s.potential(q)).epsilon(1e-12));
    }
  }
  const HamiltonianSystem bump(2, PotentialSpec{1.0, 1.0, make_perturbation("bump", 0.3, 2)});
  for (int trial = 0; trial < 20; ++trial) {
    const Vector q = vec({1.5, 0}) + 0.5 * randn(2, gen);
    const Vector fd = fd_gradient([&](const Vector& y) { return bump.potential(y); }, q, 1e-5);
    CHECK((bump.potential_gradient(q) - fd).norm() <= 1e-6 * (1 + fd.norm()));
  }
  CHECK(bump.potential(vec({4, 0})) == doctest::Approx(kepler2.potential(vec({4, 0}))));
}

TEST_CASE("sigma relation") {
  CHECK(check_sigma_relation(PhasePoint{vec({1, 0}), vec({0, 1})}, kepler2) < 1e-10);
  const HamiltonianSystem free3(3, PotentialSpec::free_particle());
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const PhasePoint x{randn(3, gen), randn(3, gen)};
    CHECK(check_sigma_relation(x, free3) < 1e-10);
  }
  const HamiltonianSystem pert(3, PotentialSpec{1.0, 1.0, make_perturbation("product", 0.5, 3)});
  for (int trial = 0; trial < 20; ++trial) {
    const PhasePoint x{randn(3, gen), randn(3, gen)};
    CHECK(check_sigma_relation(x, pert) < 1e-10);
  }
  try {
    check_sigma_relation(PhasePoint{vec({1, 0}), vec({0, 0})}, HamiltonianSystem(2, PotentialSpec::free_particle()));
    FAIL("expected rest_point");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::rest_point);
  }
}

TEST_CASE("liouville form satisfies dH ^ sigma = Omega") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const PhasePoint x{randn(2, gen), randn(2, gen)};
    const forms::KForm dH = forms::KForm::one_form(kepler2.energy_gradient(x));
    const forms::KForm lhs = forms::wedge(dH, liouville_form(x, kepler2));
    CHECK((lhs - phase_volume(2)).max_abs() <= 1e-12);
  }
}

TEST_CASE("wirtinger gap") {
  const auto g = forms::MetricTensor::euclidean(4);
  const auto J = forms::ComplexStructureOp::standard(2);
  Vector e1 = Vector::Zero(4), e2 = Vector::Zero(4);
  e1(0) = 1;
  e2(1) = 1;
  CHECK(J.apply(e1)(2) == 1.0);
  CHECK(wirtinger_gap(e1, e2, g, J) == doctest::Approx(1.0));
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = trial % 2 ? 6 : 4;
    const auto gd = forms::MetricTensor::euclidean(d);
    const auto Jd = forms::ComplexStructureOp::standard(d / 2);
    const Vector X = randn(d, gen), Y = randn(d, gen);
    CHECK(wirtinger_gap(X, Y, gd, Jd) >= -1e-12);
    const Vector Z = 0.7 * X - 1.3 * Jd.apply(X);
    CHECK(std::abs(wirtinger_gap(X, Z, gd, Jd)) <= 1e-12 * (1 + std::pow(X.squaredNorm(), 2) * 4));
  }
}

TEST_CASE("eta density") {
  const HamiltonianSystem free(2, PotentialSpec::free_particle());
  const ScalarField q1{[](const PhasePoint& x) { return x.q(0); }, {}};
  CHECK(eta_density(PhasePoint{vec({0.3, 0.2}), vec({1, 0})}, free, q1) == doctest::Approx(-1.0).epsilon(1e-6));
  // grad F orthogonal to grad H and J grad H: here grad H = (0,0,1,0), J grad H = (-1,0,0,0)
  const ScalarField q2{[](const PhasePoint& x) { return x.q(1); }, {}};
  CHECK(std::abs(eta_density(PhasePoint{vec({0.3, 0.2}), vec({1, 0})}, free, q2)) <= 1e-9);

  std::mt19937_64 gen(9);
  const int m = 4;
  const ScalarField radial{[m](const PhasePoint& x) { return x.q.norm() - 1.0 / m; },
                           [](const PhasePoint& x) {
                             Vector g = Vector::Zero(2 * x.n());
                             g.head(x.n()) = x.q / x.q.norm();
                             return g;
                           }};
  const double E = -1.0;
  const double k = std::sqrt(2 * (E + m));
  for (int trial = 0; trial < 10000; ++trial) {
    std::uniform_real_distribution<double> u(0, 2 * M_PI);
    const double a = u(gen), b = u(gen);
    const PhasePoint x{vec({std::cos(a) / m, std::sin(a) / m}), vec({k * std::cos(b), k * std::sin(b)})};
    try {
      CHECK(std::abs(eta_density(x, kepler2, radial)) <= 1.0 + 1e-12);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::degenerate);
    }
  }
}
