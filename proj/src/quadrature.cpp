#include "wander/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "wander/errors.hpp"
#include "wander/estimate.hpp"

namespace wander {

using std::numbers::pi;

std::string_view to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::quadrature: return "quadrature";
    case EstimateMethod::monte_carlo: return "monte-carlo";
    case EstimateMethod::closed_form: return "closed-form";
  }
  return "unknown";
}

GaussRule gauss_legendre(int k) {
  require(k >= 1, ErrorKind::precondition, "Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  for (int i = 0; i < (k + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (k + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[k - 1 - i] = x;
    rule.weights[i] = rule.weights[k - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int k) {
  const GaussRule rule = gauss_legendre(k);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double integrate_box(const std::function<double(const Vector&)>& f, const Vector& lo, const Vector& hi, int points) {
  require(lo.size() == hi.size(), ErrorKind::dimension_mismatch, "box corners differ in dimension");
  const int dim = static_cast<int>(lo.size());
  const GaussRule rule = gauss_legendre(points);
  std::vector<int> idx(dim, 0);
  Vector x(dim);
  const Vector half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  const double jac = half.prod();
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
      x[j] = mid[j] + half[j] * rule.nodes[idx[j]];
      w *= rule.weights[idx[j]];
    }
    sum += w * f(x);
    int j = 0;
    while (j < dim && ++idx[j] == points) idx[j++] = 0;
    if (j == dim) break;
  }
  return jac * sum;
}

Vector unit_from_angles(const Vector& a) {
  const auto n = a.size() + 1;
  Vector x(n);
  double s = 1.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    x[i] = s * std::cos(a[i]);
    s *= std::sin(a[i]);
  }
  x[n - 1] = s;
  return x;
}

Vector angles_from_unit(const Vector& x) {
  const auto n = x.size();
  require(n >= 2, ErrorKind::degenerate, "angle chart needs n >= 2");
  Vector a(n - 1);
  for (Eigen::Index i = 0; i + 2 < n; ++i) a[i] = std::atan2(x.tail(n - i - 1).norm(), x[i]);
  a[n - 2] = std::atan2(x[n - 1], x[n - 2]);
  return a;
}

Vector angle_scales(const Vector& a) {
  Vector s(a.size());
  double prod = 1.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    s[i] = prod;
    prod *= std::sin(a[i]);
  }
  return s;
}

Matrix tangent_frame(const Vector& a) {
  const auto k = a.size();
  const auto n = k + 1;
  Matrix e = Matrix::Zero(n, k);
  // d x / d a_i, divided by prod_{j<i} sin a_j
  for (Eigen::Index i = 0; i < k; ++i) {
    e(i, i) = -std::sin(a[i]);
    double s = std::cos(a[i]);
    for (Eigen::Index l = i + 1; l < n; ++l) {
      if (l + 1 < n) {
        e(l, i) = s * std::cos(a[l]);
        s *= std::sin(a[l]);
      } else {
        e(l, i) = s;
      }
    }
  }
  return e;
}

double angular_jacobian(const Vector& a) {
  const auto k = a.size();
  double j = 1.0;
  for (Eigen::Index i = 0; i + 1 < k; ++i) j *= std::pow(std::sin(a[i]), static_cast<double>(k - 1 - i));
  return j;
}

double unit_sphere_volume(int n) { return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n); }

double unit_ball_volume(int k) { return std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0); }

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * pi);
  return a <= -pi ? a + 2.0 * pi : a;
}

namespace {

double sphere_rule(int n, double radius, const std::function<double(const Vector&)>& f, int k, long& nodes) {
  const int polar = n - 2;
  const int az = 2 * k;
  const GaussRule rule = gauss_legendre(k);
  std::vector<int> idx(polar, 0);
  Vector a(n - 1);
  double total = 0.0;
  nodes = 0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < polar; ++j) {
      a[j] = 0.5 * pi * (1.0 + rule.nodes[idx[j]]);
      w *= 0.5 * pi * rule.weights[idx[j]] * std::pow(std::sin(a[j]), n - 2 - j);
    }
    double ring = 0.0;
    for (int l = 0; l < az; ++l) {
      a[n - 2] = -pi + 2.0 * pi * (l + 0.5) / az;
      ring += f(radius * unit_from_angles(a));
    }
    nodes += az;
    total += w * ring * (2.0 * pi / az);
    int j = 0;
    while (j < polar && ++idx[j] == k) idx[j++] = 0;
    if (j == polar) break;
  }
  return total * std::pow(radius, n - 1);
}

}  // namespace

SphereQuadrature integrate_sphere(int n, double radius, const std::function<double(const Vector&)>& f,
                                  double rel_tol, double abs_floor, long max_nodes) {
  require(n >= 2, ErrorKind::degenerate, "sphere quadrature needs n >= 2");
  require(radius > 0.0, ErrorKind::precondition, "sphere radius must be positive");
  SphereQuadrature out;
  long used = 0;
  int k = 8;
  double prev = sphere_rule(n, radius, f, k, used);
  long total = used;
  while (true) {
    k *= 2;
    const long next_cost = 2L * k * static_cast<long>(std::pow(k, n - 2));
    if (next_cost > max_nodes) break;
    const double cur = sphere_rule(n, radius, f, k, used);
    total += used;
    const bool done = std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), abs_floor);
    prev = cur;
    out.nodes = used;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.value = prev;
  if (out.nodes == 0) out.nodes = total;
  return out;
}

}  // namespace wander
