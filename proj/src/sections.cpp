#include "wander/sections.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wander/errors.hpp"
#include "wander/kaehler.hpp"
#include "wander/quadrature.hpp"

namespace wander {

using std::numbers::pi;

SurfaceFamily::SurfaceFamily(const HamiltonianSystem& sys, double E, int m0, int M)
    : sys_(&sys), E_(E), m0_(m0), M_(M) {
  require(m0 >= 1 && M >= m0, ErrorKind::precondition, "surface range must satisfy 1 <= m0 <= M");
  require(std::isfinite(E), ErrorKind::precondition, "energy must be finite");
}

double SurfaceFamily::max_kinetic(int m) const {
  const int n = sys_->n();
  const double r = radius(m);
  if (sys_->potential_spec().is_radial() || n == 1) {
    double best = -std::numeric_limits<double>::infinity();
    Vector q = Vector::Zero(n);
    q[0] = r;
    best = std::max(best, 2.0 * (E_ - sys_->potential(q)));
    if (n == 1) {
      q[0] = -r;
      best = std::max(best, 2.0 * (E_ - sys_->potential(q)));
    }
    return best;
  }
  double best = -std::numeric_limits<double>::infinity();
  integrate_sphere(n, r, [&](const Vector& q) {
    best = std::max(best, 2.0 * (E_ - sys_->potential(q)));
    return 0.0;
  }, 1.0, 1.0, 100'000);
  return best;
}

bool SurfaceFamily::nonempty(int m) const { return max_kinetic(m) >= 0.0; }

bool SurfaceFamily::contains(const PhasePoint& x, int m, double tol) const {
  if (std::abs(x.q.norm() - radius(m)) > tol) return false;
  if (x.p.dot(x.q) > 0.0) return false;
  return std::abs(sys_->energy(x) - E_) <= tol * (1.0 + std::abs(E_)) * 1e2;
}

double transversality_margin(const PhasePoint& x, int m, double tol) {
  require(m >= 1, ErrorKind::precondition, "surface index must be >= 1");
  const double r = x.q.norm();
  require(std::abs(r - 1.0 / m) <= tol, ErrorKind::off_surface,
          "point is not on |q| = 1/" + std::to_string(m));
  return x.p.dot(x.q) / r;
}

SurfaceChart::SurfaceChart(const HamiltonianSystem& sys, double E, int m) : sys_(&sys), E_(E), m_(m), n_(sys.n()) {
  require(n_ >= 2, ErrorKind::degenerate, "H_m consists of two points for n = 1; no chart");
  require(m >= 1, ErrorKind::precondition, "surface index must be >= 1");
}

std::optional<PhasePoint> SurfaceChart::embed(const Vector& u) const {
  require(u.size() == dim(), ErrorKind::dimension_mismatch, "chart point has wrong dimension");
  const Vector angles = u.head(n_ - 1);
  const Vector w = u.tail(n_ - 1);
  const Vector qhat = unit_from_angles(angles);
  PhasePoint x;
  x.q = qhat / m_;
  const double pr2 = 2.0 * (E_ - sys_->potential(x.q)) - w.squaredNorm();
  if (!(pr2 >= 0.0)) return std::nullopt;
  x.p = tangent_frame(angles) * w - std::sqrt(pr2) * qhat;
  return x;
}

PhasePoint SurfaceChart::embed_checked(const Vector& u) const {
  auto x = embed(u);
  if (!x) fail(ErrorKind::chart_escape, "chart point outside the admissible momentum ball");
  return *x;
}

Vector SurfaceChart::coordinates(const PhasePoint& x, double tol) const {
  require(x.n() == n_, ErrorKind::dimension_mismatch, "point has wrong dimension");
  const double r = x.q.norm();
  require(std::abs(r - 1.0 / m_) <= tol, ErrorKind::off_surface, "point is not on |q| = 1/" + std::to_string(m_));
  Vector u(dim());
  const Vector angles = angles_from_unit(x.q / r);
  u.head(n_ - 1) = angles;
  u.tail(n_ - 1) = tangent_frame(angles).transpose() * x.p;
  return u;
}

Matrix SurfaceChart::tangent_vectors(const Vector& u) const {
  Matrix t(2 * n_, dim());
  for (int i = 0; i < dim(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
    Vector up = u, um = u;
    up[i] += h;
    um[i] -= h;
    t.col(i) = (embed_checked(up).state() - embed_checked(um).state()) / (2.0 * h);
  }
  return t;
}

double SurfaceChart::density(const Vector& u) const {
  const PhasePoint x = embed_checked(u);
  const Vector grad = sys_->energy_gradient(x);
  require(grad.norm() > 1e-12, ErrorKind::rest_point, "grad H vanishes on the surface");
  std::vector<Vector> args;
  args.push_back(grad / grad.squaredNorm());
  args.push_back(sys_->vector_field(x));
  const Matrix t = tangent_vectors(u);
  for (int i = 0; i < dim(); ++i) args.emplace_back(t.col(i));
  return std::abs(phase_volume(n_).evaluate(args));
}

Vector SurfaceChart::sample(CounterRng& rng, double w_fraction) const {
  Vector u(dim());
  for (int i = 0; i + 2 < n_; ++i) u[i] = rng.uniform(0.05, pi - 0.05);
  u[n_ - 2] = rng.uniform(-pi, pi);
  const double rho = std::sqrt(std::max(0.0, 2.0 * (E_ - sys_->potential(unit_from_angles(u.head(n_ - 1)) / m_))));
  require(rho > 0.0, ErrorKind::empty_surface, "no admissible momenta at the sampled position");
  // uniform in the ball |w| <= w_fraction * rho
  Vector w(n_ - 1);
  for (int i = 0; i < n_ - 1; ++i) w[i] = rng.normal();
  const double radius = w_fraction * rho * std::pow(rng.uniform(), 1.0 / (n_ - 1));
  u.tail(n_ - 1) = radius * w.normalized();
  return u;
}

Vector chart_difference(const Vector& a, const Vector& b, int n) {
  Vector d = a - b;
  d[n - 2] = wrap_angle(d[n - 2]);
  return d;
}

namespace {

bool tangential(const HitEvent& e, const FlowOptions& opts) {
  return std::abs(e.margin) / (1.0 + e.point.p.norm()) < opts.tangency_threshold;
}

}  // namespace

HitEvent next_hit(const HamiltonianSystem& sys, const HitEvent& start, int m, double t_max, const FlowOptions& opts) {
  require(m >= 1, ErrorKind::precondition, "surface index must be >= 1");
  require(t_max > 0.0, ErrorKind::precondition, "t_max must be positive");
  HitEvent s = start;
  s.margin = transversality_margin(start.point, start.m);
  if (tangential(s, opts)) fail(ErrorKind::tangential_hit, "start point lies on the tangency locus");
  require(s.margin < 0.0, ErrorKind::precondition, "start point is not on the inward half <p,q> <= 0");

  const CrossingSearch found =
      find_crossing(sys, start.point, t_max, sphere_level(sys.n(), 1.0 / m), opts, m == start.m);
  if (!found.time) {
    if (found.stop == Termination::collision) {
      fail(ErrorKind::collision_before_hit, "orbit collides before reaching |q| = 1/" + std::to_string(m));
    }
    fail(ErrorKind::no_hit, "orbit ended (" + std::string(to_string(*found.stop)) + ") before reaching |q| = 1/" +
                                std::to_string(m));
  }
  HitEvent hit;
  hit.m = m;
  hit.time = *found.time;
  hit.point = PhasePoint::from_state(found.state);
  hit.margin = hit.point.p.dot(hit.point.q.normalized());
  if (tangential(hit, opts)) fail(ErrorKind::tangential_hit, "orbit meets |q| = 1/" + std::to_string(m) + " tangentially");
  return hit;
}

PoincareResult poincare_map(const HamiltonianSystem& sys, double E, const HitEvent& start, int m, double t_max,
                            const FlowOptions& opts, bool with_jacobian) {
  const int n = sys.n();
  const SurfaceChart from(sys, E, start.m);
  const SurfaceChart to(sys, E, m);

  PoincareResult out;
  out.hit = next_hit(sys, start, m, t_max, opts);
  out.start_coords = from.coordinates(start.point);
  out.hit_coords = to.coordinates(out.hit.point);
  out.density_start = from.density(out.start_coords);
  out.density_target = to.density(out.hit_coords);
  if (!with_jacobian) return out;

  const int k = from.dim();
  out.jacobian.resize(k, k);
  for (int i = 0; i < k; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(out.start_coords[i]));
    Vector up = out.start_coords, um = out.start_coords;
    up[i] += h;
    um[i] -= h;
    HitEvent sp{start.m, 0.0, from.embed_checked(up), 0.0};
    HitEvent sm{start.m, 0.0, from.embed_checked(um), 0.0};
    const Vector cp = to.coordinates(next_hit(sys, sp, m, t_max, opts).point);
    const Vector cm = to.coordinates(next_hit(sys, sm, m, t_max, opts).point);
    out.jacobian.col(i) = chart_difference(cp, cm, n) / (2.0 * h);
  }
  out.det = out.jacobian.determinant();
  out.residual = out.det * out.density_target / out.density_start - 1.0;
  return out;
}

}  // namespace wander
