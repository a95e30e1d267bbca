#pragma once

// Central-force Hamiltonians H(q, p) = |p|^2 / 2 + V(q) on T*(R^n \ {0}),
// with V(q) = -c |q|^{-alpha} + W(q).

#include <functional>
#include <optional>
#include <string>

#include "wander/forms.hpp"

namespace wander {

struct PhasePoint {
  Vector q;
  Vector p;

  int n() const { return static_cast<int>(q.size()); }
  /// (q_1..q_n, p_1..p_n)
  Vector state() const;
  static PhasePoint from_state(const Vector& y);
};

/// Smooth additive perturbation W(q). A missing gradient falls back to central differences.
struct Perturbation {
  std::string id;
  double strength = 0.0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// Named perturbations usable from configuration files:
///   "product": W = strength * q_1 q_2
///   "bump":    W = strength * exp(1 - 1/(1 - |q - q_c|^2)) for |q - q_c| < 1,
///              q_c = (1.5, 0, ..., 0); zero outside, so it is compactly supported
Perturbation make_perturbation(const std::string& id, double strength, int n);

struct PotentialSpec {
  double alpha = 1.0;  // homogeneity exponent of the radial term
  double c = 1.0;      // strength; 0 switches the radial term off
  std::optional<Perturbation> perturbation;

  static PotentialSpec free_particle() { return PotentialSpec{1.0, 0.0, std::nullopt}; }
  static PotentialSpec radial(double alpha, double c) { return PotentialSpec{alpha, c, std::nullopt}; }

  bool is_radial() const { return !perturbation.has_value(); }
};

class HamiltonianSystem {
 public:
  HamiltonianSystem(int n, PotentialSpec potential);

  int n() const { return n_; }
  int phase_dim() const { return 2 * n_; }
  const PotentialSpec& potential_spec() const { return potential_; }

  double potential(const Vector& q) const;
  Vector potential_gradient(const Vector& q) const;
  /// Allocation-free variant for the integrator; `out` must have length n.
  void potential_gradient(const Vector& q, Vector& out) const;

  double energy(const PhasePoint& x) const;
  double energy_of_state(const Vector& y) const;

  /// X_H = (p, -grad V)
  Vector vector_field(const PhasePoint& x) const;
  void vector_field_of_state(const Vector& y, Vector& dy) const;

  /// grad H = (grad V, p) with respect to the Euclidean metric.
  Vector energy_gradient(const PhasePoint& x) const;

  /// Q(q) grad V(q): the component of the force orthogonal to q.
  Vector tangential_gradient(const Vector& q) const;

 private:
  void check_position(const Vector& q) const;

  int n_;
  PotentialSpec potential_;
};

/// Central differences with step h = 1e-6 (1 + |x|).
Vector central_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x);

/// Q(q) v = v - <v, q^> q^
Vector project_tangential(const Vector& q, const Vector& v);

}  // namespace wander
