#pragma once

// Dormand-Prince 8(5,3) embedded Runge-Kutta pair with the 7th-order
// continuous extension (Hairer, Norsett & Wanner, DOP853).

#include "wander/hamiltonian.hpp"

namespace wander {

/// Interpolant over one accepted step [t0, t0 + h] (h may be negative).
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  Vector y0;  // state at t0
  Vector f0;  // X_H(y0)
  Vector rc[8];

  double t1() const { return t0 + h; }
  bool contains(double t) const;
  Vector state(double t) const;
  void state(double t, Vector& out) const;
};

class Dop853 {
 public:
  explicit Dop853(const HamiltonianSystem& sys);

  const HamiltonianSystem& system() const { return *sys_; }

  /// One trial step of size h from (t, y) with f0 = X_H(y). Returns the scaled
  /// error norm (<= 1 means acceptable) using per-component absolute tolerances
  /// `atol` and relative tolerance `rtol`. The 8th-order result is in proposal().
  double attempt(const Vector& y, const Vector& f0, double h, const Vector& atol, double rtol);

  /// Same stage evaluation without the error estimate.
  void plain_step(const Vector& y, const Vector& f0, double h, Vector& out);

  const Vector& proposal() const { return y_new_; }

  /// After an accepted attempt: X_H at the proposal (written to f_new) and the interpolant.
  void finish_step(double t0, const Vector& y, double h, Vector& f_new, DenseSegment& segment);

 private:
  void stages(const Vector& y, const Vector& f0, double h);

  const HamiltonianSystem* sys_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, k8_, k9_, k10_, tmp_, y_new_;
};

}  // namespace wander
