#include "wander/hamiltonian.hpp"

#include <cmath>

#include "wander/errors.hpp"

namespace wander {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::rest_point: return "rest-point";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::incompatible_structure: return "incompatible-structure";
    case ErrorKind::off_surface: return "off-surface";
    case ErrorKind::no_hit: return "no-hit";
    case ErrorKind::tangential_hit: return "tangential-hit";
    case ErrorKind::collision_before_hit: return "collision-before-hit";
    case ErrorKind::empty_surface: return "empty-surface";
    case ErrorKind::chart_escape: return "chart-escape";
    case ErrorKind::escape_time: return "escape-time";
    case ErrorKind::budget_exhausted: return "budget-exhausted";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

Vector PhasePoint::state() const {
  Vector y(2 * q.size());
  y << q, p;
  return y;
}

PhasePoint PhasePoint::from_state(const Vector& y) {
  const auto n = y.size() / 2;
  return PhasePoint{y.head(n), y.tail(n)};
}

Perturbation make_perturbation(const std::string& id, double strength, int n) {
  if (id == "product") {
    require(n >= 2, ErrorKind::precondition, "product perturbation needs n >= 2");
    return Perturbation{
        id, strength, [strength](const Vector& q) { return strength * q[0] * q[1]; },
        [strength](const Vector& q) {
          Vector g = Vector::Zero(q.size());
          g[0] = strength * q[1];
          g[1] = strength * q[0];
          return g;
        }};
  }
  if (id == "bump") {
    auto center = [n] {
      Vector c = Vector::Zero(n);
      c[0] = 1.5;
      return c;
    };
    return Perturbation{id, strength,
                        [strength, center](const Vector& q) {
                          const double s = (q - center()).squaredNorm();
                          return s < 1.0 ? strength * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
                        },
                        [strength, center](const Vector& q) {
                          const Vector d = q - center();
                          const double s = d.squaredNorm();
                          if (s >= 1.0) return Vector(Vector::Zero(q.size()));
                          const double u = 1.0 - s;
                          return Vector(strength * std::exp(1.0 - 1.0 / u) * (-2.0 / (u * u)) * d);
                        }};
  }
  fail(ErrorKind::precondition, "unknown perturbation id '" + id + "'");
}

HamiltonianSystem::HamiltonianSystem(int n, PotentialSpec potential) : n_(n), potential_(std::move(potential)) {
  require(n >= 1, ErrorKind::precondition, "spatial dimension must be >= 1");
  require(2 * n <= forms::max_dim, ErrorKind::precondition, "phase-space dimension is limited to 8 (n <= 4)");
  require(potential_.alpha > 0.0, ErrorKind::precondition, "alpha must be positive");
  require(potential_.c >= 0.0, ErrorKind::precondition, "c must be nonnegative");
  if (potential_.perturbation) {
    require(static_cast<bool>(potential_.perturbation->value), ErrorKind::precondition,
            "perturbation without value evaluator");
  }
}

void HamiltonianSystem::check_position(const Vector& q) const {
  require(q.size() == n_, ErrorKind::dimension_mismatch, "position has wrong dimension");
  if (potential_.c > 0.0) require(q.squaredNorm() > 0.0, ErrorKind::singularity, "potential is singular at q = 0");
}

double HamiltonianSystem::potential(const Vector& q) const {
  check_position(q);
  double v = 0.0;
  if (potential_.c > 0.0) v -= potential_.c * std::pow(q.norm(), -potential_.alpha);
  if (potential_.perturbation) v += potential_.perturbation->value(q);
  return v;
}

void HamiltonianSystem::potential_gradient(const Vector& q, Vector& out) const {
  check_position(q);
  if (potential_.c > 0.0) {
    const double r2 = q.squaredNorm();
    // grad(-c r^-alpha) = alpha c r^{-alpha-2} q
    out = (potential_.alpha * potential_.c * std::pow(r2, -0.5 * potential_.alpha - 1.0)) * q;
  } else {
    out.setZero(n_);
  }
  if (potential_.perturbation) {
    const auto& w = *potential_.perturbation;
    out += w.gradient ? w.gradient(q) : central_difference_gradient(w.value, q);
  }
}

Vector HamiltonianSystem::potential_gradient(const Vector& q) const {
  Vector g(n_);
  potential_gradient(q, g);
  return g;
}

double HamiltonianSystem::energy(const PhasePoint& x) const { return 0.5 * x.p.squaredNorm() + potential(x.q); }

double HamiltonianSystem::energy_of_state(const Vector& y) const {
  return 0.5 * y.tail(n_).squaredNorm() + potential(y.head(n_));
}

Vector HamiltonianSystem::vector_field(const PhasePoint& x) const {
  Vector dy(2 * n_);
  vector_field_of_state(x.state(), dy);
  return dy;
}

void HamiltonianSystem::vector_field_of_state(const Vector& y, Vector& dy) const {
  thread_local Vector grad;
  grad.resize(n_);
  potential_gradient(y.head(n_), grad);
  dy.resize(2 * n_);
  dy.head(n_) = y.tail(n_);
  dy.tail(n_) = -grad;
}

Vector HamiltonianSystem::energy_gradient(const PhasePoint& x) const {
  Vector g(2 * n_);
  g << potential_gradient(x.q), x.p;
  return g;
}

Vector HamiltonianSystem::tangential_gradient(const Vector& q) const {
  return project_tangential(q, potential_gradient(q));
}

Vector central_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Vector project_tangential(const Vector& q, const Vector& v) {
  const double r2 = q.squaredNorm();
  require(r2 > 0.0, ErrorKind::singularity, "radial projector undefined at q = 0");
  return v - (v.dot(q) / r2) * q;
}

}  // namespace wander
