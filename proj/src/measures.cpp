#include "wander/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wander/errors.hpp"
#include "wander/quadrature.hpp"
#include "wander/rng.hpp"

namespace wander {

namespace {

MeasureEstimate sphere_area(const HamiltonianSystem& sys, double E, int m,
                            const std::function<double(const Vector& q, double kinetic)>& integrand, double prefactor) {
  const int n = sys.n();
  MeasureEstimate out;
  if (n == 1) {
    // H_m is a pair of points for every m
    out.value = 2.0;
    out.degenerate = true;
    out.method = EstimateMethod::closed_form;
    return out;
  }
  require(m >= 1, ErrorKind::precondition, "surface index must be >= 1");
  const SurfaceFamily family(sys, E, m, m);
  require(family.nonempty(m), ErrorKind::empty_surface, "H_" + std::to_string(m) + " is empty at this energy");
  const auto quad = integrate_sphere(n, 1.0 / m, [&](const Vector& q) {
    const double V = sys.potential(q);
    const double k = 2.0 * (E - V);
    // kinetic energy at rounding level is a turning point, not a sliver of surface
    return k <= 1e-12 * (std::abs(E) + std::abs(V)) ? 0.0 : integrand(q, k);
  });
  require(quad.converged, ErrorKind::budget_exhausted, "sphere quadrature did not reach 1e-8 relative agreement");
  out.value = prefactor * quad.value;
  out.count = quad.nodes;
  out.method = EstimateMethod::quadrature;
  return out;
}

}  // namespace

MeasureEstimate riemannian_area(const HamiltonianSystem& sys, double E, int m) {
  const int n = sys.n();
  return sphere_area(
      sys, E, m,
      [&](const Vector& q, double k) {
        const double qv = sys.tangential_gradient(q).squaredNorm();
        return std::pow(k, 0.5 * (n - 2)) * std::sqrt(k + qv);
      },
      n >= 2 ? 0.5 * unit_sphere_volume(n) : 1.0);
}

MeasureEstimate symplectic_area(const HamiltonianSystem& sys, double E, int m) {
  const int n = sys.n();
  return sphere_area(
      sys, E, m, [&](const Vector&, double k) { return std::pow(k, 0.5 * (n - 1)); },
      n >= 2 ? unit_ball_volume(n - 1) : 1.0);
}

double ScalingFit::c3() const { return std::exp(intercept); }

ScalingFit fit_scaling_exponent(const std::vector<std::pair<int, double>>& areas) {
  std::set<int> distinct;
  for (const auto& [m, v] : areas) {
    require(v > 0.0, ErrorKind::precondition, "areas must be positive for a log-log fit");
    require(m >= 1, ErrorKind::precondition, "surface index must be >= 1");
    distinct.insert(m);
  }
  require(distinct.size() >= 4, ErrorKind::precondition, "scaling fit needs at least 4 distinct m");
  const auto k = static_cast<Eigen::Index>(areas.size());
  Matrix A(k, 2);
  Vector b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    A(i, 0) = std::log(static_cast<double>(areas[i].first));
    A(i, 1) = 1.0;
    b[i] = std::log(areas[i].second);
  }
  const Vector x = A.colPivHouseholderQr().solve(b);
  ScalingFit fit;
  fit.slope = x[0];
  fit.intercept = x[1];
  fit.residual = std::sqrt((A * x - b).squaredNorm() / static_cast<double>(k));
  return fit;
}

namespace {

void check_region(const Region& region) {
  require(region.r_lo >= 0.0 && region.r_hi > region.r_lo && std::isfinite(region.r_hi), ErrorKind::precondition,
          "region must satisfy 0 <= r_lo < r_hi < inf");
}

Vector random_direction(CounterRng& rng, int n) {
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
  } while (v.squaredNorm() == 0.0);
  return v.normalized();
}

// Uniform in the annulus r_lo <= |q| <= r_hi.
Vector random_annulus_point(CounterRng& rng, int n, const Region& region) {
  const double a = std::pow(region.r_lo, n), b = std::pow(region.r_hi, n);
  const double r = std::pow(a + (b - a) * rng.uniform(), 1.0 / n);
  return r * random_direction(rng, n);
}

// Largest and smallest 2(E - V) over the region: radial systems by monotonicity
// on a radial grid, otherwise from random probes with a safety margin.
std::pair<double, double> kinetic_range(const HamiltonianSystem& sys, double E, const Region& region) {
  const int n = sys.n();
  double kmax = -std::numeric_limits<double>::infinity();
  double kmin = std::numeric_limits<double>::infinity();
  auto visit = [&](const Vector& q) {
    if (q.norm() == 0.0 && sys.potential_spec().c > 0.0) return;
    const double k = 2.0 * (E - sys.potential(q));
    kmax = std::max(kmax, k);
    kmin = std::min(kmin, k);
  };
  if (sys.potential_spec().is_radial()) {
    for (int i = 0; i <= 256; ++i) {
      Vector q = Vector::Zero(n);
      q[0] = region.r_lo + (region.r_hi - region.r_lo) * i / 256.0;
      visit(q);
    }
    return {kmin, kmax};
  }
  CounterRng rng(0x5eedULL, 0);
  for (int i = 0; i < 20000; ++i) visit(random_annulus_point(rng, n, region));
  return {kmin, kmax + 0.1 * std::abs(kmax) + 1e-12};
}

PhasePoint sample_direct(const HamiltonianSystem& sys, double E, const Region& region, double kmax, CounterRng& rng) {
  const int n = sys.n();
  for (long attempt = 0; attempt < 10'000'000; ++attempt) {
    const Vector q = random_annulus_point(rng, n, region);
    if (q.norm() == 0.0) continue;
    const double k = 2.0 * (E - sys.potential(q));
    if (!(k > 0.0)) continue;
    if (n > 2 && rng.uniform() * std::pow(kmax, 0.5 * (n - 2)) > std::pow(k, 0.5 * (n - 2))) continue;
    return PhasePoint{q, std::sqrt(k) * random_direction(rng, n)};
  }
  fail(ErrorKind::empty_surface, "rejection sampler found no admissible point in the region");
}

void project_to_energy(const HamiltonianSystem& sys, double E, PhasePoint& x) {
  for (int it = 0; it < 8; ++it) {
    const double g = sys.energy(x) - E;
    if (std::abs(g) <= 1e-13 * (1.0 + std::abs(E))) return;
    const Vector grad = sys.energy_gradient(x);
    const Vector step = (g / grad.squaredNorm()) * grad;
    x.q -= step.head(sys.n());
    x.p -= step.tail(sys.n());
  }
}

PhasePoint sample_shell(const HamiltonianSystem& sys, double E, const Region& region, double kmax, double delta,
                        CounterRng& rng) {
  const int n = sys.n();
  const double pmax = std::sqrt(kmax + 2.0 * delta);
  for (long attempt = 0; attempt < 100'000'000; ++attempt) {
    const Vector q = random_annulus_point(rng, n, region);
    if (q.norm() == 0.0) continue;
    const Vector p = pmax * std::pow(rng.uniform(), 1.0 / n) * random_direction(rng, n);
    PhasePoint x{q, p};
    if (std::abs(sys.energy(x) - E) >= delta) continue;
    project_to_energy(sys, E, x);
    return x;
  }
  fail(ErrorKind::empty_surface, "shell sampler found no point in the energy shell");
}

}  // namespace

std::vector<PhasePoint> sample_energy_surface(const HamiltonianSystem& sys, double E, const Region& region, long count,
                                              std::uint64_t seed, SamplingMethod method) {
  check_region(region);
  require(count >= 0, ErrorKind::precondition, "sample count must be nonnegative");
  const auto [kmin, kmax] = kinetic_range(sys, E, region);
  require(kmax > 0.0, ErrorKind::empty_surface, "E - V < 0 throughout the region: empty energy surface");
  (void)kmin;
  if (method == SamplingMethod::automatic) {
    method = sys.potential_spec().is_radial() || sys.n() == 2 ? SamplingMethod::direct : SamplingMethod::shell;
  }
  const double delta = 1e-4 * (1.0 + std::abs(E));
  if (method == SamplingMethod::shell) {
    require(2.0 * delta < 0.01 * kmax, ErrorKind::precondition, "energy shell too thick to resolve the surface");
  }
  std::vector<PhasePoint> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    out.push_back(method == SamplingMethod::direct ? sample_direct(sys, E, region, kmax, rng)
                                                   : sample_shell(sys, E, region, kmax, delta, rng));
  }
  return out;
}

MeasureEstimate sigma_mass(const HamiltonianSystem& sys, double E, const Region& region, std::uint64_t seed) {
  check_region(region);
  const int n = sys.n();
  const double sphere = unit_sphere_volume(n);
  MeasureEstimate out;
  if (sys.potential_spec().is_radial()) {
    auto kinetic = [&](double r) {
      Vector q = Vector::Zero(n);
      q[0] = r;
      return 2.0 * (E - sys.potential(q));
    };
    double r_hi = region.r_hi;
    // clip to the Hill region, which is the ball r <= r_H for attractive radial potentials
    if (kinetic(r_hi) < 0.0) {
      double a = std::max(region.r_lo, 1e-300), b = r_hi;
      require(kinetic(a) > 0.0, ErrorKind::empty_surface, "region lies outside the Hill region");
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        (kinetic(mid) >= 0.0 ? a : b) = mid;
      }
      r_hi = a;
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double radial = integrator.integrate(
        [&](double r) {
          const double k = std::max(0.0, kinetic(r));
          return std::pow(r, n - 1) * std::pow(k, 0.5 * (n - 2));
        },
        region.r_lo, r_hi);
    out.value = sphere * sphere * radial;
    out.method = EstimateMethod::quadrature;
    return out;
  }
  const long count = 1'000'000;
  const double a = std::pow(region.r_lo, n), b = std::pow(region.r_hi, n);
  const double annulus = unit_ball_volume(n) * (b - a);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const Vector q = random_annulus_point(rng, n, region);
    const double k = 2.0 * (E - sys.potential(q));
    const double w = k > 0.0 ? std::pow(k, 0.5 * (n - 2)) : 0.0;
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / count;
  out.value = annulus * sphere * mean;
  out.std_error = annulus * sphere * std::sqrt(std::max(0.0, sum2 / count - mean * mean) / (count - 1));
  out.method = EstimateMethod::monte_carlo;
  out.count = count;
  out.seed = seed;
  return out;
}

int default_first_surface(const HamiltonianSystem& sys, double E, const Region& region, int m_cap) {
  check_region(region);
  require(region.r_lo > 0.0, ErrorKind::precondition, "default m0 needs r_lo > 0");
  const SurfaceFamily family(sys, E, 1, m_cap);
  for (int m = static_cast<int>(std::floor(1.0 / region.r_lo)) + 1; m <= m_cap; ++m) {
    if (family.nonempty(m)) return m;
  }
  fail(ErrorKind::empty_surface, "no nonempty surface inside the region's inner radius");
}

}  // namespace wander
