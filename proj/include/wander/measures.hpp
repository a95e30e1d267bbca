#pragma once

// Areas of the surface family, the decay-law fit, sampling of the Liouville
// measure sigma_E, and Monte Carlo estimates of the transition measure.

#include <optional>
#include <vector>

#include "wander/estimate.hpp"
#include "wander/sections.hpp"

namespace wander {

/// Riemannian area of H_m: (1/2) vol(S^{n-1}) * integral over |q| = 1/m of
/// (2(E-V))^{(n-2)/2} sqrt(2(E-V) + |Q grad V|^2). For n = 1 returns the point count 2, flagged degenerate.
MeasureEstimate riemannian_area(const HamiltonianSystem& sys, double E, int m);

/// Symplectic area of H_m: v_{n-1} * integral over |q| = 1/m of (2(E-V))^{(n-1)/2}.
MeasureEstimate symplectic_area(const HamiltonianSystem& sys, double E, int m);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;  // log c_3
  double residual = 0.0;   // root-mean-square of the log residuals
  double c3() const;
};

/// Least-squares line through (log m, log value). Needs >= 4 distinct m and positive values.
ScalingFit fit_scaling_exponent(const std::vector<std::pair<int, double>>& areas);

struct Region {
  double r_lo = 0.0;
  double r_hi = 1.0;
};

enum class SamplingMethod { automatic, direct, shell };

/// Points distributed per sigma_E (dH ^ sigma = Omega) restricted to r_lo <= |q| <= r_hi.
/// `direct` uses sigma_E = rho^{n-2} dq d(p/|p|), rho = sqrt(2(E - V)), by rejection on rho^{n-2};
/// `shell` samples Omega uniformly in a thin energy shell of a phase box and projects onto H = E.
/// `automatic` picks direct for radial potentials. Sample i depends only on (seed, i).
std::vector<PhasePoint> sample_energy_surface(const HamiltonianSystem& sys, double E, const Region& region, long count,
                                              std::uint64_t seed, SamplingMethod method = SamplingMethod::automatic);

/// sigma_E mass of the region.
MeasureEstimate sigma_mass(const HamiltonianSystem& sys, double E, const Region& region, std::uint64_t seed = 1);

/// Smallest m with 1/m < r_lo whose surface is nonempty, searching up to m_cap.
int default_first_surface(const HamiltonianSystem& sys, double E, const Region& region, int m_cap = 1 << 20);

struct TransitionOptions {
  int m0 = 0;              // 0: default_first_surface
  int M = 32;
  double t_max = 200.0;
  FlowOptions flow;
};

/// What one orbit did up to the depth considered.
struct OrbitRecord {
  std::vector<bool> hit;   // hit[j] for m = m0 + j
  bool censored = false;   // t_max reached before the outcome was settled
  Termination termination = Termination::time_limit;
  double first_deep_hit = -1.0;  // time of the first inward crossing of |q| = 1/M, if any
};

/// Inward crossings of |q| = 1/m for m in [m0, M] along the forward orbit of x.
/// For radial potentials the radial motion is periodic once a full oscillation has
/// been seen, so the orbit is settled at the first pericenter after an apocenter.
OrbitRecord trace_orbit(const HamiltonianSystem& sys, const PhasePoint& x, int m0, int M, double t_max,
                        const FlowOptions& opts);

struct DepthEstimate {
  int M = 0;
  MeasureEstimate fraction;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double censored = 0.0;   // censored fraction
};

struct TransitionProfile {
  int m0 = 0;
  std::vector<DepthEstimate> depths;  // M' = m0 .. M
  long samples = 0;
  double max_deep_hit_time = 0.0;     // largest first-hit time of H_M among transition samples
};

/// Fraction of samples whose forward orbit hits H_m for every m in [m0, M'], for each M' <= M.
/// Censored orbits count as non-transition in the fraction and are reported separately.
TransitionProfile estimate_transition_measure(const HamiltonianSystem& sys, double E,
                                              const std::vector<PhasePoint>& samples, const TransitionOptions& opts,
                                              std::uint64_t seed = 0);

/// Wilson score interval for k successes in n trials at normal quantile z.
std::pair<double, double> wilson_interval(long k, long n, double z = 1.959963984540054);

/// The flux bound for orbits that reach H_M within time tau of their start:
/// fraction * sigma_mass <= tau * symplectic_area(M) + 3 std_error(fraction * sigma_mass).
struct UpperBoundCheck {
  double lhs = 0.0;
  double bound = 0.0;
  bool holds = false;
};
UpperBoundCheck check_upper_bound(const TransitionProfile& profile, double mass, double area_M);

}  // namespace wander
