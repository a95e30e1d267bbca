#include "wander/flowbox.hpp"

#include <cmath>
#include <numbers>

#include "wander/errors.hpp"
#include "wander/kaehler.hpp"
#include "wander/quadrature.hpp"
#include "wander/rng.hpp"

namespace wander {

using std::numbers::pi;

TransversalPatch::TransversalPatch(const HamiltonianSystem& sys, Vector lo, Vector hi)
    : sys_(&sys), lo_(std::move(lo)), hi_(std::move(hi)) {
  require(lo_.size() == hi_.size(), ErrorKind::dimension_mismatch, "patch corners differ in dimension");
  require((hi_.array() >= lo_.array()).all(), ErrorKind::precondition, "patch box has negative extent");
}

bool TransversalPatch::contains(const Vector& u) const {
  return (u.array() >= lo_.array()).all() && (u.array() <= hi_.array()).all();
}

double TransversalPatch::volume_density(const PhasePoint& x, const std::vector<Vector>& vectors) const {
  std::vector<Vector> args;
  if (on_energy_surface()) {
    const Vector grad = sys_->energy_gradient(x);
    require(grad.norm() > 1e-12, ErrorKind::rest_point, "grad H vanishes in the tube");
    args.push_back(grad / grad.squaredNorm());
  }
  args.push_back(sys_->vector_field(x));
  args.insert(args.end(), vectors.begin(), vectors.end());
  return std::abs(phase_volume(sys_->n()).evaluate(args));
}

double TransversalPatch::density(const Vector& u) const {
  const auto x = embed(u);
  if (!x) fail(ErrorKind::chart_escape, "patch point outside its chart");
  std::vector<Vector> vectors;
  for (int i = 0; i < dim(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
    Vector up = u, um = u;
    up[i] += h;
    um[i] -= h;
    const auto xp = embed(up), xm = embed(um);
    if (!xp || !xm) fail(ErrorKind::chart_escape, "patch touches the chart boundary");
    vectors.push_back((xp->state() - xm->state()) / (2.0 * h));
  }
  return volume_density(*x, vectors);
}

CoordinatePlanePatch::CoordinatePlanePatch(const HamiltonianSystem& sys, int axis, double value, Vector lo, Vector hi)
    : TransversalPatch(sys, std::move(lo), std::move(hi)), axis_(axis), value_(value) {
  require(axis >= 0 && axis < sys.phase_dim(), ErrorKind::precondition, "plane axis out of range");
  require(dim() == sys.phase_dim() - 1, ErrorKind::dimension_mismatch, "plane patch needs 2n - 1 chart coordinates");
  const auto c = embed(center());
  const double speed = sys.vector_field(*c)[axis];
  require(speed != 0.0, ErrorKind::tangential_hit, "flow is tangent to the plane at the patch center");
  side_ = speed > 0.0 ? 1.0 : -1.0;
}

std::optional<PhasePoint> CoordinatePlanePatch::embed(const Vector& u) const {
  Vector y(sys_->phase_dim());
  y.head(axis_) = u.head(axis_);
  y[axis_] = value_;
  y.tail(y.size() - axis_ - 1) = u.tail(u.size() - axis_);
  return PhasePoint::from_state(y);
}

std::optional<Vector> CoordinatePlanePatch::chart(const PhasePoint& x) const {
  const Vector y = x.state();
  if (std::abs(y[axis_] - value_) > 1e-9 * (1.0 + std::abs(value_))) return std::nullopt;
  Vector u(dim());
  u.head(axis_) = y.head(axis_);
  u.tail(u.size() - axis_) = y.tail(y.size() - axis_ - 1);
  return u;
}

Level CoordinatePlanePatch::level() const {
  const int axis = axis_;
  const double value = value_, side = side_;
  return Level{[=](const Vector& y) { return side * (value - y[axis]); },
               [=](const Vector&, const Vector& f) { return -side * f[axis]; }};
}

SpherePatch::SpherePatch(const HamiltonianSystem& sys, double E, int m, Vector lo, Vector hi)
    : TransversalPatch(sys, std::move(lo), std::move(hi)), chart_(sys, E, m), E_(E), m_(m) {
  require(dim() == chart_.dim(), ErrorKind::dimension_mismatch, "sphere patch needs 2n - 2 chart coordinates");
  const auto c = chart_.embed(center());
  if (!c) fail(ErrorKind::chart_escape, "patch center outside the admissible momentum ball");
  const int n = sys.n();
  tube_ref_ = Vector::Zero(2 * n - 1);
  tube_ref_.segment(1, n - 1) = angles_from_unit(c->q.normalized());
  tube_ref_.tail(n - 1) = angles_from_unit(c->p.normalized());
}

double SpherePatch::kinetic(const Vector& q) const { return 2.0 * (E_ - sys_->potential(q)); }

std::optional<Vector> SpherePatch::chart(const PhasePoint& x) const {
  if (std::abs(x.q.norm() - 1.0 / m_) > 1e-9) return std::nullopt;
  Vector u = chart_.coordinates(x);
  const int n = sys_->n();
  const double c = center()[n - 2];
  u[n - 2] = c + wrap_angle(u[n - 2] - c);
  return u;
}

Vector SpherePatch::to_tube(const PhasePoint& x) const {
  const int n = sys_->n();
  Vector z(2 * n - 1);
  z[0] = x.q.norm();
  z.segment(1, n - 1) = angles_from_unit(x.q / z[0]);
  z.tail(n - 1) = angles_from_unit(x.p.normalized());
  for (int az : {n - 1, 2 * n - 2}) z[az] = tube_ref_[az] + wrap_angle(z[az] - tube_ref_[az]);
  return z;
}

std::optional<PhasePoint> SpherePatch::from_tube(const Vector& z) const {
  const int n = sys_->n();
  if (z[0] <= 0.0) return std::nullopt;
  PhasePoint x;
  x.q = z[0] * unit_from_angles(z.segment(1, n - 1));
  const double k = kinetic(x.q);
  if (!(k > 0.0)) return std::nullopt;
  x.p = std::sqrt(k) * unit_from_angles(z.tail(n - 1));
  return x;
}

double SpherePatch::tube_weight(const Vector& z) const {
  const int n = sys_->n();
  const Vector aq = z.segment(1, n - 1);
  const double k = kinetic(z[0] * unit_from_angles(aq));
  if (!(k > 0.0)) return 0.0;
  // sigma_E = rho^{n-2} dq d(p/|p|) with rho = sqrt(2(E - V))
  return std::pow(z[0], n - 1) * std::abs(angular_jacobian(aq)) * std::pow(k, 0.5 * (n - 2)) *
         std::abs(angular_jacobian(z.tail(n - 1)));
}

namespace {

// Grid over [lo, hi] with `points` equispaced nodes per axis (endpoints included).
template <class F>
void for_grid(const Vector& lo, const Vector& hi, int points, F visit) {
  const int dim = static_cast<int>(lo.size());
  std::vector<int> idx(dim, 0);
  Vector u(dim);
  while (true) {
    for (int j = 0; j < dim; ++j) u[j] = lo[j] + (hi[j] - lo[j]) * idx[j] / (points - 1);
    visit(u);
    int j = 0;
    while (j < dim && ++idx[j] == points) idx[j++] = 0;
    if (j == dim) break;
  }
}

MeasureEstimate flux_integral(const TransversalPatch& patch, const std::function<double(const Vector&)>& f, double t) {
  auto integrand = [&](const Vector& u) {
    const double fu = f(u);
    return fu == 0.0 ? 0.0 : fu * patch.density(u);
  };
  MeasureEstimate rhs;
  rhs.method = EstimateMethod::quadrature;
  int k = 4;
  double prev = integrate_box(integrand, patch.lo(), patch.hi(), k);
  while (k < 32) {
    k *= 2;
    const double cur = integrate_box(integrand, patch.lo(), patch.hi(), k);
    const bool done = std::abs(cur - prev) <= 1e-12 * std::max(std::abs(cur), 1e-300);
    prev = cur;
    if (done) break;
  }
  rhs.value = 2.0 * t * prev;
  rhs.count = static_cast<long>(std::pow(k, patch.dim()));
  return rhs;
}

MeasureEstimate tube_quadrature(const TransversalPatch& patch, const std::function<double(const Vector&)>& f, double t,
                                const FlowboxOptions& opts) {
  const HamiltonianSystem& sys = patch.system();
  const int dim = patch.dim();
  Vector lo(dim + 1), hi(dim + 1);
  lo << -t, patch.lo();
  hi << t, patch.hi();
  auto image = [&](double s, const Vector& u) {
    const auto x = patch.embed(u);
    if (!x) fail(ErrorKind::chart_escape, "tube quadrature node outside the chart");
    return flow_map(sys, *x, s, opts.flow);
  };
  auto integrand = [&](const Vector& su) {
    const Vector u = su.tail(dim);
    const double fu = f(u);
    if (fu == 0.0) return 0.0;
    const double s = su[0];
    std::vector<Vector> vectors;
    for (int i = 0; i < dim; ++i) {
      const double h = 1e-4 * std::max(1.0, std::abs(u[i]));
      Vector up = u, um = u;
      up[i] += h;
      um[i] -= h;
      vectors.push_back((image(s, up).state() - image(s, um).state()) / (2.0 * h));
    }
    return fu * patch.volume_density(image(s, u), vectors);
  };
  MeasureEstimate lhs;
  lhs.method = EstimateMethod::quadrature;
  lhs.value = integrate_box(integrand, lo, hi, opts.quad_points);
  lhs.count = static_cast<long>(std::pow(opts.quad_points, dim + 1));
  return lhs;
}

// Tube membership: the time-|s| < t crossing of the hypersurface, mapped to chart coordinates.
std::optional<Vector> tube_preimage(const TransversalPatch& patch, const Level& level, const PhasePoint& x, double t,
                                    const FlowOptions& flow) {
  const double v = level.value(x.state());
  CrossingSearch found;
  if (v > 0.0) {
    found = find_crossing(patch.system(), x, t, level, flow);
  } else {
    const Level reversed{[&](const Vector& y) { return -level.value(y); },
                         [&](const Vector& y, const Vector& f) { return -level.rate(y, f); }};
    found = find_crossing(patch.system(), x, -t, reversed, flow);
  }
  if (!found.time) return std::nullopt;
  const auto u = patch.chart(PhasePoint::from_state(found.state));
  if (!u || !patch.contains(*u)) return std::nullopt;
  return u;
}

}  // namespace

FlowboxResult flowbox_volume_check(const TransversalPatch& patch, const std::function<double(const Vector&)>& f,
                                   double t, const FlowboxOptions& opts) {
  require(t > 0.0 && std::isfinite(t), ErrorKind::precondition, "flow-box time must be positive");
  require(opts.samples > 0, ErrorKind::precondition, "sample count must be positive");
  const HamiltonianSystem& sys = patch.system();

  // The flow must exist on (-t, t) x K; the sampled image also bounds the tube.
  const int tube_dim = patch.dim() + 1;
  Vector zlo = Vector::Constant(tube_dim, std::numeric_limits<double>::infinity());
  Vector zhi = -zlo;
  constexpr int grid = 5;
  for_grid(patch.lo(), patch.hi(), grid, [&](const Vector& u) {
    const auto x = patch.embed(u);
    if (!x) fail(ErrorKind::chart_escape, "patch box leaves the chart");
    if (patch.density(u) <= 0.0) fail(ErrorKind::tangential_hit, "flow is tangent to the patch");
    for (int j = 0; j < grid; ++j) {
      const double s = -t + 2.0 * t * j / (grid - 1);
      const Vector z = patch.to_tube(flow_map(sys, *x, s, opts.flow));
      zlo = zlo.cwiseMin(z);
      zhi = zhi.cwiseMax(z);
    }
  });

  FlowboxResult out;
  out.rhs = flux_integral(patch, f, t);

  if (opts.lhs_method == FlowboxLhs::tube_quadrature) {
    out.lhs = tube_quadrature(patch, f, t, opts);
    return out;
  }

  const Vector pad = 0.15 * (zhi - zlo) + Vector::Constant(tube_dim, 1e-9);
  zlo -= pad;
  zhi += pad;
  if (patch.on_energy_surface()) zlo[0] = std::max(zlo[0], 0.0);
  out.box_volume = (zhi - zlo).prod();

  const Level level = patch.level();
  double sum = 0.0, sum2 = 0.0;
  long inside = 0;
  Vector z(tube_dim);
  for (long i = 0; i < opts.samples; ++i) {
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(i));
    for (int j = 0; j < tube_dim; ++j) z[j] = rng.uniform(zlo[j], zhi[j]);
    double value = 0.0;
    if (const auto x = patch.from_tube(z)) {
      if (const auto u = tube_preimage(patch, level, *x, t, opts.flow)) {
        value = patch.tube_weight(z) * f(*u);
        ++inside;
      }
    }
    sum += value;
    sum2 += value * value;
  }
  const double n = static_cast<double>(opts.samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  out.lhs.method = EstimateMethod::monte_carlo;
  out.lhs.value = out.box_volume * mean;
  out.lhs.std_error = out.box_volume * std::sqrt(var / std::max(1.0, n - 1.0));
  out.lhs.count = opts.samples;
  out.lhs.seed = opts.seed;
  out.hit_fraction = inside / n;
  return out;
}

}  // namespace wander
