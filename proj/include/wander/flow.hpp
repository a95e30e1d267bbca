#pragma once

// Adaptive integration of the (possibly incomplete) Hamiltonian flow with
// dense output, event location, and collision / escape bookkeeping.

#include <functional>
#include <optional>
#include <vector>

#include "wander/dop853.hpp"

namespace wander {

struct FlowOptions {
  double tol_rel = 1e-12;
  double tol_abs = 1e-12;
  double r_min = 1e-6;   // collision radius
  double r_max = 1e3;    // escape radius
  double tangency_threshold = 1e-8;
  std::size_t max_steps = 5'000'000;

  void validate() const;
};

enum class Termination { time_limit, collision, escape_radius, step_underflow };

std::string_view to_string(Termination t);

/// An accepted intersection of a forward orbit with the surface |q| = 1/m, <p,q> <= 0.
struct HitEvent {
  int m = 0;
  double time = 0.0;
  PhasePoint point;
  double margin = 0.0;  // <p, q/|q|>, the signed radial crossing speed
};

/// Steps the flow one accepted step at a time. Integration runs forward
/// (direction +1) or backward (direction -1) in time.
class Propagator {
 public:
  Propagator(const HamiltonianSystem& sys, const PhasePoint& x0, const FlowOptions& opts, int direction = +1);

  /// Advances by one accepted step without passing t_stop (a signed time in the
  /// integration direction). Returns false once t_stop is reached or the flow terminated.
  bool step(double t_stop);

  double time() const { return t_; }
  const Vector& state() const { return y_; }
  int direction() const { return direction_; }
  /// The interpolant of the last accepted step.
  const DenseSegment& segment() const { return segment_; }
  std::optional<Termination> termination() const { return termination_; }
  double initial_energy() const { return energy0_; }
  double max_energy_drift() const { return max_drift_; }
  std::size_t steps() const { return steps_; }

  /// Re-integrates from the start of the last accepted step directly to t
  /// (t inside that step), bypassing the interpolant.
  Vector exact_state(double t);

  const HamiltonianSystem& system() const { return *sys_; }

 private:
  double initial_step(double t_span);
  void refresh_atol();
  void check_termination(double t_stop);
  void truncate_at_radius(double radius);

  const HamiltonianSystem* sys_;
  FlowOptions opts_;
  int direction_;
  Dop853 stepper_;
  double t_ = 0.0;
  double h_ = 0.0;
  Vector y_, f_, f_new_, atol_;
  DenseSegment segment_;
  std::optional<Termination> termination_;
  double energy0_;
  double max_drift_ = 0.0;
  std::size_t steps_ = 0;
  int inbound_streak_ = 0;
  bool rejected_last_ = false;
  bool singular_ = true;
};

struct CollisionEvent {
  double time;
  PhasePoint point;
};

class Trajectory {
 public:
  PhasePoint initial;
  std::vector<DenseSegment> segments;
  std::vector<HitEvent> events;
  Termination termination = Termination::time_limit;
  double final_time = 0.0;
  PhasePoint final_point;
  double energy_drift = 0.0;  // sup over accepted steps of |H(x(t)) - H(x(0))|

  PhasePoint state_at(double t) const;
};

/// Integrates from x0 over [0, t_end] (t_end > 0), or [t_end, 0] when t_end < 0.
/// Inward crossings of the spheres |q| = 1/m for m in `record_surfaces` are recorded as events.
Trajectory integrate(const HamiltonianSystem& sys, const PhasePoint& x0, double t_end, const FlowOptions& opts,
                     const std::vector<int>& record_surfaces = {});

std::optional<CollisionEvent> detect_collision(const Trajectory& trajectory);

/// Phi(t, x0) for signed t; throws escape_time when the orbit terminates before |t|.
PhasePoint flow_map(const HamiltonianSystem& sys, const PhasePoint& x0, double t, const FlowOptions& opts);

/// A scalar function of the state. A crossing is a transition of value from > 0 to <= 0
/// in integration time. `rate` is d(value)/dt along the forward flow, given state and X_H(state).
struct Level {
  std::function<double(const Vector&)> value;
  std::function<double(const Vector&, const Vector&)> rate;
};

/// Level |q| - radius with its forward-time rate <p, q^>.
Level sphere_level(int n, double radius);

struct CrossingSearch {
  std::optional<double> time;      // crossing time, if found
  Vector state;                    // state at the crossing, else at the stop
  double stop_time = 0.0;
  std::optional<Termination> stop; // why the search ended without a crossing
};

/// First crossing of `level` along the orbit of x0 within integration time up to t_end (signed).
/// The crossing state comes from a direct Runge-Kutta step to the refined time.
/// With start_on_level, a start value that is positive only by rounding does not count
/// as the far side of the level.
CrossingSearch find_crossing(const HamiltonianSystem& sys, const PhasePoint& x0, double t_end, const Level& level,
                             const FlowOptions& opts, bool start_on_level = false);

/// Locates the first crossing inside the propagator's last step, if any.
std::optional<double> crossing_in_segment(Propagator& prop, const Level& level, double previous_value);

/// First time tau > 0 at which the orbit meets |q| = 1/m with <p,q> <= 0.
/// Throws no_hit (orbit terminates or t_max passes first) or tangential_hit.
HitEvent hit_surface(const HamiltonianSystem& sys, const PhasePoint& x0, double E, int m, double t_max,
                     const FlowOptions& opts);

}  // namespace wander
