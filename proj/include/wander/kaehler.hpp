#pragma once

// Pointwise volume-form identities on the flat Kaehler phase space R^{2n}
// (Euclidean g, J(Q,P) = (-P,Q), omega = sum dq_i ^ dp_i).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wander/forms.hpp"
#include "wander/hamiltonian.hpp"

namespace wander {

/// A phase-space function with an optional analytic gradient.
struct ScalarField {
  std::function<double(const PhasePoint&)> value;
  std::function<Vector(const PhasePoint&)> gradient;  // may be empty

  Vector gradient_at(const PhasePoint& x) const;
};

/// The coordinate-oriented volume form Omega = dq_1..dq_n dp_1..dp_n, which equals
/// s omega^n / n! with s = (-1)^{floor(n/2)}.
forms::KForm phase_volume(int n);

/// sigma = iota_Y Omega with Y = grad H / |grad H|^2; satisfies dH ^ sigma = Omega.
forms::KForm liouville_form(const PhasePoint& x, const HamiltonianSystem& sys);

/// Largest coefficient, in an orthonormal frame of the energy surface's tangent
/// space ker dH, of iota_{X_H} sigma + s omega^{n-1}/(n-1)!. Throws rest_point when grad H = 0.
double check_sigma_relation(const PhasePoint& x, const HamiltonianSystem& sys);

/// |X|^2 |Y|^2 - <X,Y>^2 - omega(X,Y)^2 with omega(X,Y) = g(JX, Y). Nonnegative up to rounding.
double wirtinger_gap(const Vector& X, const Vector& Y, const forms::MetricTensor& g,
                     const forms::ComplexStructureOp& J);

/// Normalized Poisson bracket density
///   eta = omega(grad H, grad F) / sqrt(|grad H|^2 |grad F|^2 - <grad H, grad F>^2).
/// Throws degenerate when the gradients are (numerically) parallel.
double eta_density(const PhasePoint& x, const HamiltonianSystem& sys, const ScalarField& F);

struct IdentityCheck {
  std::string name;
  long samples = 0;
  long skipped = 0;        // inputs rejected as degenerate
  double max_violation = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// Randomized checks in each dimension d = 2n of dims, split evenly:
///   wirtinger      -gap for random X, Y and random compatible (g, J)
///   eta_density    |eta| - 1 at random phase points, random linear F
///   hodge          max coefficient of *(omega^{n-k}/(n-k)!) - omega^k/k!, all k, random Kaehler (g, J)
///   sigma_relation check_sigma_relation at random phase points
std::vector<IdentityCheck> kaehler_identity_suite(const std::vector<int>& dims, long samples, std::uint64_t seed,
                                                  const PotentialSpec& potential = PotentialSpec::radial(1.0, 1.0));

}  // namespace wander
