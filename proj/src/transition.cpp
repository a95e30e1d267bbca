#include <algorithm>
#include <cmath>

#include <boost/math/tools/toms748_solve.hpp>

#include "wander/errors.hpp"
#include "wander/measures.hpp"

namespace wander {

namespace {

double radial_speed(const Vector& y, int n) { return y.head(n).dot(y.tail(n)); }

// Time in [a, b] where <p, q> vanishes on the interpolant.
double turning_time(const DenseSegment& seg, int n, double a, double b, double fa, double fb) {
  Vector y;
  auto g = [&](double t) {
    seg.state(t, y);
    return radial_speed(y, n);
  };
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  std::uintmax_t it = 100;
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(g, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (lo + hi);
}

class HitTracker {
 public:
  HitTracker(int m0, int M, double r0) : m0_(m0), M_(M), running_max_(r0), hit_(M - m0 + 1, false) {}

  // r(t) = r at time t, following all earlier observations.
  void observe(double r, double t) {
    // level m is crossed inward once r has been above 1/m and now is at or below it
    const long lo = std::max<long>(m0_, static_cast<long>(std::floor(1.0 / running_max_)) + 1);
    const long hi = std::min<long>(M_, static_cast<long>(std::floor(1.0 / r)));
    for (long m = lo; m <= hi; ++m) {
      if (1.0 / m >= running_max_ || 1.0 / m < r) continue;
      if (!hit_[m - m0_]) {
        hit_[m - m0_] = true;
        --missing_;
        if (m == M_) deep_time_ = t;
      }
    }
    running_max_ = std::max(running_max_, r);
  }

  bool all_hit() const { return missing_ == 0; }
  std::vector<bool> hits() const { return hit_; }
  double deep_time() const { return deep_time_; }

 private:
  int m0_, M_;
  double running_max_;
  std::vector<bool> hit_;
  long missing_ = static_cast<long>(hit_.size());
  double deep_time_ = -1.0;
};

}  // namespace

OrbitRecord trace_orbit(const HamiltonianSystem& sys, const PhasePoint& x, int m0, int M, double t_max,
                        const FlowOptions& opts) {
  require(m0 >= 1 && M >= m0, ErrorKind::precondition, "depth range must satisfy 1 <= m0 <= M");
  require(t_max > 0.0, ErrorKind::precondition, "t_max must be positive");
  const int n = sys.n();
  const auto& spec = sys.potential_spec();
  const bool radial = spec.is_radial();
  // Unbound radial motion has at most one turning point, a pericenter; with no inner
  // barrier (c = 0 or alpha <= 2) outward motion is therefore final as well.
  const bool unbound = radial && sys.energy(x) >= 0.0;
  const bool outward_final = unbound && (spec.c == 0.0 || spec.alpha <= 2.0);
  Propagator prop(sys, x, opts, +1);
  HitTracker tracker(m0, M, x.q.norm());
  OrbitRecord record;
  bool seen_apocenter = false;
  bool settled = outward_final && radial_speed(x.state(), n) >= 0.0;

  constexpr int samples = 8;
  Vector y;
  while (!settled && prop.step(t_max)) {
    const DenseSegment& seg = prop.segment();
    const double t_end = prop.time();
    double t_prev = seg.t0;
    double v_prev = radial_speed(seg.y0, n);
    for (int j = 1; j <= samples && !settled; ++j) {
      const double t = seg.t0 + (t_end - seg.t0) * j / samples;
      if (j == samples) {
        y = prop.state();
      } else {
        seg.state(t, y);
      }
      const double v = radial_speed(y, n);
      if ((v_prev < 0.0 && v >= 0.0) || (v_prev > 0.0 && v <= 0.0)) {
        const bool pericenter = v_prev < 0.0;
        const double tt = turning_time(seg, n, t_prev, t, v_prev, v);
        Vector yt;
        seg.state(tt, yt);
        tracker.observe(yt.head(n).norm(), tt);
        if (pericenter && (seen_apocenter || unbound) && radial) settled = true;  // radial motion repeats from here
        if (!pericenter) seen_apocenter = true;
      }
      tracker.observe(y.head(n).norm(), t);
      if (tracker.all_hit() || (outward_final && v >= 0.0)) settled = true;
      t_prev = t;
      v_prev = v;
    }
    if (prop.termination()) break;
  }
  record.hit = tracker.hits();
  record.first_deep_hit = tracker.deep_time();
  record.termination = prop.termination().value_or(Termination::time_limit);
  record.censored = !settled && record.termination == Termination::time_limit;
  return record;
}

std::pair<double, double> wilson_interval(long k, long n, double z) {
  require(n > 0 && k >= 0 && k <= n, ErrorKind::precondition, "Wilson interval needs 0 <= k <= n, n > 0");
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

TransitionProfile estimate_transition_measure(const HamiltonianSystem& sys, double E,
                                              const std::vector<PhasePoint>& samples, const TransitionOptions& opts,
                                              std::uint64_t seed) {
  require(!samples.empty(), ErrorKind::precondition, "no samples");
  require(opts.m0 >= 1, ErrorKind::precondition, "m0 must be >= 1 (resolve the default before calling)");
  require(opts.M >= opts.m0, ErrorKind::precondition, "depth M must be >= m0");
  for (const auto& x : samples) {
    require(std::abs(sys.energy(x) - E) <= 1e-9 * (1.0 + std::abs(E)), ErrorKind::off_surface,
            "sample is not on the energy surface");
  }
  const int depths = opts.M - opts.m0 + 1;
  std::vector<long> transition(depths, 0), censored(depths, 0);
  TransitionProfile profile;
  profile.m0 = opts.m0;
  profile.samples = static_cast<long>(samples.size());

  for (const auto& x : samples) {
    const OrbitRecord rec = trace_orbit(sys, x, opts.m0, opts.M, opts.t_max, opts.flow);
    bool all = true;
    for (int j = 0; j < depths; ++j) {
      all = all && rec.hit[j];
      if (all) {
        ++transition[j];
      } else if (rec.censored) {
        ++censored[j];
      }
    }
    if (all) profile.max_deep_hit_time = std::max(profile.max_deep_hit_time, rec.first_deep_hit);
  }

  const long N = profile.samples;
  for (int j = 0; j < depths; ++j) {
    DepthEstimate d;
    d.M = opts.m0 + j;
    const double f = static_cast<double>(transition[j]) / N;
    d.fraction.value = f;
    d.fraction.std_error = std::sqrt(f * (1.0 - f) / N);
    d.fraction.count = N;
    d.fraction.seed = seed;
    d.fraction.method = EstimateMethod::monte_carlo;
    std::tie(d.ci_lo, d.ci_hi) = wilson_interval(transition[j], N);
    d.censored = static_cast<double>(censored[j]) / N;
    profile.depths.push_back(d);
  }
  return profile;
}

UpperBoundCheck check_upper_bound(const TransitionProfile& profile, double mass, double area_M) {
  require(!profile.depths.empty(), ErrorKind::precondition, "empty transition profile");
  const DepthEstimate& deepest = profile.depths.back();
  UpperBoundCheck out;
  out.lhs = deepest.fraction.value * mass;
  out.bound = profile.max_deep_hit_time * area_M + 3.0 * deepest.fraction.std_error * mass;
  out.holds = out.lhs <= out.bound;
  return out;
}

}  // namespace wander
