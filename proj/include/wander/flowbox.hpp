#pragma once

// Flow-box identity: the measure of the tube swept by a transversal patch K
// under the flow for times in (-t, t) equals 2t times the flux of K.

#include <functional>
#include <memory>
#include <optional>

#include "wander/estimate.hpp"
#include "wander/sections.hpp"

namespace wander {

/// A box K in the chart of a hypersurface transversal to the flow.
class TransversalPatch {
 public:
  TransversalPatch(const HamiltonianSystem& sys, Vector lo, Vector hi);
  virtual ~TransversalPatch() = default;

  const HamiltonianSystem& system() const { return *sys_; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  Vector center() const { return 0.5 * (lo_ + hi_); }
  int dim() const { return static_cast<int>(lo_.size()); }
  bool contains(const Vector& u) const;

  /// True when the tube lives in an energy surface and is measured with sigma_E;
  /// otherwise it lives in phase space and is measured with Omega.
  virtual bool on_energy_surface() const = 0;
  virtual std::optional<PhasePoint> embed(const Vector& u) const = 0;
  /// Chart coordinates of a point on the hypersurface, angles unwrapped near the box.
  virtual std::optional<Vector> chart(const PhasePoint& x) const = 0;
  /// Positive before the hypersurface along the flow, nonpositive after it.
  virtual Level level() const = 0;

  /// Coordinates on the space the tube lives in, with the density of the tube measure.
  virtual Vector to_tube(const PhasePoint& x) const = 0;
  virtual std::optional<PhasePoint> from_tube(const Vector& z) const = 0;
  virtual double tube_weight(const Vector& z) const = 0;

  /// Flux density of K per chart volume du.
  double density(const Vector& u) const;
  /// Measure density of vectors spanning the tube at x: |Omega(X, v_1, ...)|,
  /// or |Omega(Y, X, v_1, ...)| on an energy surface.
  double volume_density(const PhasePoint& x, const std::vector<Vector>& vectors) const;

 protected:
  const HamiltonianSystem* sys_;
  Vector lo_, hi_;
};

/// K inside the hyperplane {x_axis = value} of phase space; chart = the other 2n - 1 coordinates.
class CoordinatePlanePatch : public TransversalPatch {
 public:
  CoordinatePlanePatch(const HamiltonianSystem& sys, int axis, double value, Vector lo, Vector hi);

  bool on_energy_surface() const override { return false; }
  std::optional<PhasePoint> embed(const Vector& u) const override;
  std::optional<Vector> chart(const PhasePoint& x) const override;
  Level level() const override;
  Vector to_tube(const PhasePoint& x) const override { return x.state(); }
  std::optional<PhasePoint> from_tube(const Vector& z) const override { return PhasePoint::from_state(z); }
  double tube_weight(const Vector&) const override { return 1.0; }

 private:
  int axis_;
  double value_;
  double side_;  // orientation of the crossing: +1 when the flow increases x_axis
};

/// K inside H_m at energy E, in SurfaceChart coordinates. The tube lives in the
/// energy surface, parameterized by (r, angles of q, angles of p/|p|).
class SpherePatch : public TransversalPatch {
 public:
  SpherePatch(const HamiltonianSystem& sys, double E, int m, Vector lo, Vector hi);

  bool on_energy_surface() const override { return true; }
  std::optional<PhasePoint> embed(const Vector& u) const override { return chart_.embed(u); }
  std::optional<Vector> chart(const PhasePoint& x) const override;
  Level level() const override { return sphere_level(sys_->n(), 1.0 / m_); }
  Vector to_tube(const PhasePoint& x) const override;
  std::optional<PhasePoint> from_tube(const Vector& z) const override;
  double tube_weight(const Vector& z) const override;

 private:
  double kinetic(const Vector& q) const;  // 2(E - V(q))
  SurfaceChart chart_;
  double E_;
  int m_;
  Vector tube_ref_;  // unwrapping reference for tube angles
};

enum class FlowboxLhs { tube_quadrature, monte_carlo };

struct FlowboxOptions {
  FlowboxLhs lhs_method = FlowboxLhs::monte_carlo;
  long samples = 1'000'000;     // Monte Carlo samples
  std::uint64_t seed = 1;
  int quad_points = 6;          // Gauss points per axis for the tube quadrature
  FlowOptions flow;
};

struct FlowboxResult {
  MeasureEstimate lhs;
  MeasureEstimate rhs;
  double box_volume = 0.0;      // Monte Carlo bounding box in tube coordinates
  double hit_fraction = 0.0;    // share of Monte Carlo samples inside the tube
};

/// lhs: measure of F over the tube Phi((-t, t) x K) with F(Phi(s, x)) = f(x);
/// rhs: 2t times the integral of f against the flux density over K.
FlowboxResult flowbox_volume_check(const TransversalPatch& patch, const std::function<double(const Vector&)>& f,
                                   double t, const FlowboxOptions& opts);

}  // namespace wander
