#pragma once

// The shrinking family of half-spheres H_m = {H = E, |q| = 1/m, <p,q> <= 0},
// charts on them, and Poincare maps between members of the family.

#include <optional>

#include "wander/flow.hpp"
#include "wander/rng.hpp"

namespace wander {

class SurfaceFamily {
 public:
  SurfaceFamily(const HamiltonianSystem& sys, double E, int m0, int M);

  const HamiltonianSystem& system() const { return *sys_; }
  double energy() const { return E_; }
  int m0() const { return m0_; }
  int M() const { return M_; }
  static double radius(int m) { return 1.0 / m; }

  /// Whether 2(E - V) >= 0 somewhere on |q| = 1/m. Exact for radial potentials,
  /// otherwise checked on sphere quadrature nodes.
  bool nonempty(int m) const;
  /// max over the sphere |q| = 1/m of 2(E - V), same evaluation rule as nonempty().
  double max_kinetic(int m) const;

  bool contains(const PhasePoint& x, int m, double tol = 1e-10) const;

 private:
  const HamiltonianSystem* sys_;
  double E_;
  int m0_, M_;
};

/// Signed radial crossing speed <p, q/|q|> at a point of |q| = 1/m.
/// Throws off_surface when the point is farther than tol from the sphere.
double transversality_margin(const PhasePoint& x, int m, double tol = 1e-10);

/// Chart on H_m (n >= 2): u = (angles of q/|q|, w) with w the tangential momentum in the
/// orthonormal frame of the angle coordinates; the radial momentum is the inward root
/// p_r = -sqrt(2(E - V) - |w|^2).
class SurfaceChart {
 public:
  SurfaceChart(const HamiltonianSystem& sys, double E, int m);

  int dim() const { return 2 * n_ - 2; }
  int m() const { return m_; }
  double energy() const { return E_; }
  const HamiltonianSystem& system() const { return *sys_; }

  /// nullopt outside the admissible set |w|^2 <= 2(E - V(q)).
  std::optional<PhasePoint> embed(const Vector& u) const;
  PhasePoint embed_checked(const Vector& u) const;
  Vector coordinates(const PhasePoint& x, double tol = 1e-9) const;

  /// Columns d(embed)/du_i by central differences.
  Matrix tangent_vectors(const Vector& u) const;

  /// Density of the invariant surface form iota_X sigma per chart volume du:
  /// |Omega(Y, X, d embed/du_1, ...)| with Y = grad H / |grad H|^2.
  double density(const Vector& u) const;

  /// Random chart point with polar angles kept 0.05 away from the poles and
  /// |w| <= w_fraction * sqrt(2(E - V)).
  Vector sample(CounterRng& rng, double w_fraction = 0.9) const;

 private:
  const HamiltonianSystem* sys_;
  double E_;
  int m_;
  int n_;
};

/// Coordinate difference with the azimuth component wrapped to (-pi, pi].
Vector chart_difference(const Vector& a, const Vector& b, int n);

struct PoincareResult {
  HitEvent hit;
  Vector start_coords;
  Vector hit_coords;
  Matrix jacobian;          // d(hit_coords)/d(start_coords)
  double det = 0.0;
  double density_start = 0.0;
  double density_target = 0.0;
  double residual = 0.0;    // det * density_target / density_start - 1
};

/// Next hit of H_m along the forward orbit of a point of H_k (k = start.m).
/// Errors: no_hit, tangential_hit (start or hit), collision_before_hit.
HitEvent next_hit(const HamiltonianSystem& sys, const HitEvent& start, int m, double t_max, const FlowOptions& opts);

/// Poincare map H_k -> H_m at energy E with its central-difference Jacobian in chart coordinates.
PoincareResult poincare_map(const HamiltonianSystem& sys, double E, const HitEvent& start, int m, double t_max,
                            const FlowOptions& opts, bool with_jacobian = true);

}  // namespace wander
