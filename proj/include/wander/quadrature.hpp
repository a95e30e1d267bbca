#pragma once

// Gauss-Legendre rules and product quadrature over round spheres in R^n,
// plus the hyperspherical angle map used by the surface charts.

#include <functional>
#include <vector>

#include "wander/forms.hpp"

namespace wander {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], increasing
  std::vector<double> weights;
};

/// k-point Gauss-Legendre rule (Newton iteration on the three-term recurrence).
GaussRule gauss_legendre(int k);

/// k-point rule applied to f on [a, b].
double integrate_gauss(const std::function<double(double)>& f, double a, double b, int k);

/// Composite Gauss rule on a box: `points` nodes per axis.
double integrate_box(const std::function<double(const Vector&)>& f, const Vector& lo, const Vector& hi, int points);

// Hyperspherical coordinates on S^{n-1}, n >= 2:
//   x_1 = cos a_1, x_2 = sin a_1 cos a_2, ..., x_n = sin a_1 ... sin a_{n-1}
// with a_1..a_{n-2} in [0, pi] and the azimuth a_{n-1} in (-pi, pi].
Vector unit_from_angles(const Vector& angles);
Vector angles_from_unit(const Vector& unit);
/// |d x / d a_i| = prod_{j<i} sin a_j; the coordinate vectors are mutually orthogonal.
Vector angle_scales(const Vector& angles);
/// Orthonormal tangent frame e_i = (d x / d a_i) / |d x / d a_i|, as columns (n x (n-1)).
Matrix tangent_frame(const Vector& angles);
/// Surface element of the unit sphere in these coordinates, prod_i sin^{n-1-i} a_i.
double angular_jacobian(const Vector& angles);

/// Total surface measure of the unit sphere S^{n-1}.
double unit_sphere_volume(int n);
/// Volume of the unit ball in R^k.
double unit_ball_volume(int k);

struct SphereQuadrature {
  double value = 0.0;
  long nodes = 0;
  bool converged = false;
};

/// Integral of f over the sphere of the given radius in R^n (surface measure),
/// with Gauss-Legendre on the polar angles and the trapezoid rule on the azimuth.
/// Node counts double until successive values agree to rel_tol (relative to
/// max(|value|, abs_floor)) or the node budget runs out.
SphereQuadrature integrate_sphere(int n, double radius, const std::function<double(const Vector&)>& f,
                                  double rel_tol = 1e-8, double abs_floor = 1e-300, long max_nodes = 4'000'000);

/// Wraps an angle difference to (-pi, pi].
double wrap_angle(double a);

}  // namespace wander
