#include "wander/kaehler.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "wander/errors.hpp"
#include "wander/rng.hpp"

namespace wander {

Vector ScalarField::gradient_at(const PhasePoint& x) const {
  if (gradient) return gradient(x);
  const auto n = x.q.size();
  return central_difference_gradient(
      [&](const Vector& y) { return value(PhasePoint{y.head(n), y.tail(n)}); }, x.state());
}

forms::KForm phase_volume(int n) { return forms::KForm::volume(2 * n); }

namespace {

Vector checked_energy_gradient(const PhasePoint& x, const HamiltonianSystem& sys) {
  const Vector grad = sys.energy_gradient(x);
  require(grad.norm() > 1e-12, ErrorKind::rest_point, "grad H vanishes: rest point");
  return grad;
}

}  // namespace

forms::KForm liouville_form(const PhasePoint& x, const HamiltonianSystem& sys) {
  const Vector grad = checked_energy_gradient(x, sys);
  const Vector y = grad / grad.squaredNorm();
  return forms::interior_product(y, phase_volume(sys.n()));
}

double check_sigma_relation(const PhasePoint& x, const HamiltonianSystem& sys) {
  const int n = sys.n();
  const int d = 2 * n;
  const Vector grad = checked_energy_gradient(x, sys);
  const forms::KForm sigma = liouville_form(x, sys);
  forms::KForm residual = forms::interior_product(sys.vector_field(x), sigma);
  residual += forms::orientation_sign(n) * forms::symplectic_power(n, n - 1);

  // Orthonormal frame of ker dH: the trailing d-1 columns of a Householder Q.
  Eigen::HouseholderQR<Matrix> qr(grad);
  const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  std::vector<Vector> frame;
  for (int j = 1; j < d; ++j) frame.emplace_back(q.col(j));

  double worst = 0.0;
  std::vector<Vector> args;
  for (int skip = 0; skip < d - 1; ++skip) {
    args.clear();
    for (int j = 0; j < d - 1; ++j) {
      if (j != skip) args.push_back(frame[j]);
    }
    worst = std::max(worst, std::abs(residual.evaluate(args)));
  }
  return worst;
}

double wirtinger_gap(const Vector& X, const Vector& Y, const forms::MetricTensor& g,
                     const forms::ComplexStructureOp& J) {
  forms::require_compatible(g, J);
  require(X.size() == g.dim() && Y.size() == g.dim(), ErrorKind::dimension_mismatch, "vector length != dim");
  const double xy = g.inner(X, Y);
  const double w = g.inner(J.apply(X), Y);
  return g.norm2(X) * g.norm2(Y) - xy * xy - w * w;
}

double eta_density(const PhasePoint& x, const HamiltonianSystem& sys, const ScalarField& F) {
  const Vector gh = sys.energy_gradient(x);
  const Vector gf = F.gradient_at(x);
  require(gf.size() == gh.size(), ErrorKind::dimension_mismatch, "field gradient has wrong length");
  const double hh = gh.squaredNorm();
  const double ff = gf.squaredNorm();
  const double hf = gh.dot(gf);
  const double den2 = hh * ff - hf * hf;
  require(den2 > 1e-24 * hh * ff && den2 > 0.0, ErrorKind::degenerate, "grad H and grad F are parallel");
  const auto J = forms::ComplexStructureOp::standard(sys.n());
  return J.apply(gh).dot(gf) / std::sqrt(den2);
}

}  // namespace wander

namespace wander {

namespace {

// A = I + 0.3 N with det A > 0; g = A^T A and J = A^{-1} J_0 A are compatible, and the
// Kaehler form is A^* omega_0, so omega^n/n! stays positive for the symplectic orientation.
struct RandomStructure {
  forms::MetricTensor g;
  forms::ComplexStructureOp J;
};

RandomStructure random_structure(int d, CounterRng& rng) {
  Matrix A(d, d);
  for (;;) {  // keep the structure well conditioned so tolerances stay meaningful
    A = Matrix::Identity(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) += 0.3 * rng.normal();
    const Eigen::JacobiSVD<Matrix> svd(A);
    const Vector sv = svd.singularValues();
    if (sv(0) <= 4.0 * sv(d - 1)) break;
  }
  if (A.determinant() < 0) A.col(0) *= -1.0;
  const Matrix J0 = forms::ComplexStructureOp::standard(d / 2).matrix();
  const Matrix g = A.transpose() * A;
  const Matrix J = A.inverse() * J0 * A;
  return {forms::MetricTensor(0.5 * (g + g.transpose())), forms::ComplexStructureOp(J)};
}

Vector random_vector(int d, CounterRng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.normal();
  return v;
}

PhasePoint random_phase_point(int n, CounterRng& rng) {
  PhasePoint x{random_vector(n, rng), random_vector(n, rng)};
  if (x.q.norm() < 0.1) x.q *= 0.1 / std::max(x.q.norm(), 1e-300) + 1.0;
  return x;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

std::vector<IdentityCheck> kaehler_identity_suite(const std::vector<int>& dims, long samples, std::uint64_t seed,
                                                  const PotentialSpec& potential) {
  require(!dims.empty() && samples > 0, ErrorKind::precondition, "need dimensions and a positive sample count");
  for (int d : dims) require(d >= 2 && d % 2 == 0, ErrorKind::precondition, "phase dimensions must be even and >= 2");

  std::vector<IdentityCheck> out{{"wirtinger", 0, 0, 0.0, 1e-12, false},
                                 {"eta_density", 0, 0, 0.0, 1e-12, false},
                                 {"hodge", 0, 0, 0.0, 1e-12, false},
                                 {"sigma_relation", 0, 0, 0.0, 1e-10, false}};
  for (long i = 0; i < samples; ++i) {
    const int d = dims[static_cast<std::size_t>(i) % dims.size()];
    const int n = d / 2;
    const HamiltonianSystem sys(n, potential);

    CounterRng rng(seed, 4 * static_cast<std::uint64_t>(i));
    {
      const auto s = random_structure(d, rng);
      const double gap = wirtinger_gap(random_vector(d, rng), random_vector(d, rng), s.g, s.J);
      out[0].max_violation = std::max(out[0].max_violation, -gap);
      ++out[0].samples;
    }
    {
      CounterRng r(seed, 4 * static_cast<std::uint64_t>(i) + 1);
      const PhasePoint x = random_phase_point(n, r);
      const Vector a = random_vector(d, r);
      const ScalarField F{[a](const PhasePoint& y) { return a.dot(y.state()); },
                          [a](const PhasePoint&) { return a; }};
      try {
        const double eta = eta_density(x, sys, F);
        out[1].max_violation = std::max(out[1].max_violation, std::abs(eta) - 1.0);
        ++out[1].samples;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate) throw;
        ++out[1].skipped;
      }
    }
    {
      CounterRng r(seed, 4 * static_cast<std::uint64_t>(i) + 2);
      const auto s = random_structure(d, r);
      const forms::KForm omega = forms::kaehler_form(s.g, s.J);
      for (int k = 0; k <= n; ++k) {
        forms::KForm lhs = forms::wedge_power(omega, n - k);
        lhs *= 1.0 / factorial(n - k);
        forms::KForm rhs = forms::wedge_power(omega, k);
        rhs *= 1.0 / factorial(k);
        forms::KForm diff = forms::hodge_star(lhs, s.g, forms::Orientation::symplectic);
        diff -= rhs;
        out[2].max_violation = std::max(out[2].max_violation, diff.max_abs());
      }
      ++out[2].samples;
    }
    {
      CounterRng r(seed, 4 * static_cast<std::uint64_t>(i) + 3);
      const PhasePoint x = random_phase_point(n, r);
      out[3].max_violation = std::max(out[3].max_violation, check_sigma_relation(x, sys));
      ++out[3].samples;
    }
  }
  for (auto& c : out) c.ok = c.max_violation <= c.bound;
  return out;
}

}  // namespace wander
