#include "wander/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "wander/errors.hpp"

namespace wander {
namespace {

constexpr double uround = 2.3e-16;
constexpr double safety = 0.9;
constexpr double grow_limit = 3.0;     // |h_new| <= 3 |h|
constexpr double shrink_limit = 1.0 / 6.0;
constexpr int samples_per_step = 8;

double radial_rate(const Vector& y, int n) { return y.head(n).dot(y.tail(n)); }

// Root of f on [a, b] (either order) with f(a), f(b) of opposite sign or zero.
template <class F>
double bracketed_root(F f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  std::uintmax_t iterations = 200;
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (lo + hi);
}

}  // namespace

void FlowOptions::validate() const {
  require(tol_rel > 0.0 && tol_rel < 1.0, ErrorKind::precondition, "tol_rel must lie in (0, 1)");
  require(tol_abs > 0.0, ErrorKind::precondition, "tol_abs must be positive");
  require(r_min > 0.0, ErrorKind::precondition, "r_min must be positive");
  require(r_max > r_min, ErrorKind::precondition, "R_max must exceed r_min");
  require(tangency_threshold >= 0.0, ErrorKind::precondition, "tangency threshold must be nonnegative");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::time_limit: return "time-limit";
    case Termination::collision: return "collision";
    case Termination::escape_radius: return "escape-radius";
    case Termination::step_underflow: return "step-underflow";
  }
  return "unknown";
}

Propagator::Propagator(const HamiltonianSystem& sys, const PhasePoint& x0, const FlowOptions& opts, int direction)
    : sys_(&sys), opts_(opts), direction_(direction >= 0 ? 1 : -1), stepper_(sys) {
  opts_.validate();
  require(x0.n() == sys.n() && x0.p.size() == sys.n(), ErrorKind::dimension_mismatch,
          "initial point has wrong dimension");
  // without the radial term there is no singularity to guard
  singular_ = sys.potential_spec().c > 0.0;
  require(!singular_ || x0.q.norm() > opts_.r_min, ErrorKind::singularity,
          "initial point lies inside the collision radius r_min");
  y_ = x0.state();
  f_.resize(y_.size());
  f_new_.resize(y_.size());
  atol_.resize(y_.size());
  sys.vector_field_of_state(y_, f_);
  energy0_ = sys.energy_of_state(y_);
}

void Propagator::refresh_atol() {
  const int n = sys_->n();
  // tighter absolute control on positions as the orbit approaches the singularity
  const double q_scale = std::clamp(y_.head(n).norm(), opts_.r_min, 1.0);
  atol_.head(n).setConstant(opts_.tol_abs * q_scale);
  atol_.tail(n).setConstant(opts_.tol_abs);
}

double Propagator::initial_step(double t_span) {
  refresh_atol();
  double dnf = 0.0, dny = 0.0;
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    const double sk = atol_[i] + opts_.tol_rel * std::abs(y_[i]);
    dnf += (f_[i] / sk) * (f_[i] / sk);
    dny += (y_[i] / sk) * (y_[i] / sk);
  }
  const double hmax = std::abs(t_span);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax) * direction_;
  Vector probe = y_ + h * f_;
  Vector f1(y_.size());
  sys_->vector_field_of_state(probe, f1);
  double der2 = 0.0;
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    const double sq = (f1[i] - f_[i]) / (atol_[i] + opts_.tol_rel * std::abs(y_[i]));
    der2 += sq * sq;
  }
  der2 = std::sqrt(der2) / std::abs(h);
  const double der12 = std::max(der2, std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
  return std::min({100.0 * std::abs(h), h1, hmax}) * direction_;
}

bool Propagator::step(double t_stop) {
  if (termination_) return false;
  if ((t_stop - t_) * direction_ <= 0.0) {
    termination_ = Termination::time_limit;
    return false;
  }
  if (h_ == 0.0) h_ = initial_step(t_stop - t_);

  while (true) {
    if (steps_ >= opts_.max_steps) {
      fail(ErrorKind::budget_exhausted, "integrator exceeded " + std::to_string(opts_.max_steps) + " steps");
    }
    double h = h_;
    bool last = false;
    if ((t_ + 1.01 * h - t_stop) * direction_ > 0.0) {
      h = t_stop - t_;
      last = true;
    }
    if (!(0.1 * std::abs(h) > std::abs(t_) * uround && std::abs(h) >= std::numeric_limits<double>::min())) {
      termination_ = singular_ && inbound_streak_ >= 3 ? Termination::collision : Termination::step_underflow;
      return false;
    }
    refresh_atol();
    const double err = stepper_.attempt(y_, f_, h, atol_, opts_.tol_rel);
    if (!std::isfinite(err)) {
      h_ = h * shrink_limit;
      rejected_last_ = true;
      continue;
    }
    const double fac11 = std::pow(err, 1.0 / 8.0);
    if (err <= 1.0) {
      stepper_.finish_step(t_, y_, h, f_new_, segment_);
      t_ = last ? t_stop : t_ + h;
      y_ = stepper_.proposal();
      std::swap(f_, f_new_);
      ++steps_;
      max_drift_ = std::max(max_drift_, std::abs(sys_->energy_of_state(y_) - energy0_));
      double fac = std::clamp(fac11 / safety, 1.0 / grow_limit, 1.0 / shrink_limit);
      double h_new = h / fac;
      if (rejected_last_) h_new = direction_ * std::min(std::abs(h_new), std::abs(h));
      rejected_last_ = false;
      h_ = h_new;
      check_termination(t_stop);
      return true;
    }
    h_ = h / std::min(1.0 / shrink_limit, fac11 / safety);
    rejected_last_ = true;
  }
}

void Propagator::truncate_at_radius(double radius) {
  const int n = sys_->n();
  const DenseSegment& seg = segment_;
  Vector tmp;
  auto g = [&](double t) {
    seg.state(t, tmp);
    return tmp.head(n).norm() - radius;
  };
  const double ga = seg.y0.head(n).norm() - radius;
  const double gb = y_.head(n).norm() - radius;
  if (ga * gb > 0.0) return;  // crossing not bracketed within this step; keep the endpoint
  const double t_hit = bracketed_root(g, seg.t0, t_, ga, gb);
  t_ = t_hit;
  y_ = exact_state(t_hit);
}

void Propagator::check_termination(double t_stop) {
  const int n = sys_->n();
  const double r = y_.head(n).norm();
  const double inward = direction_ * radial_rate(y_, n);
  inbound_streak_ = inward < 0.0 ? inbound_streak_ + 1 : 0;
  if (singular_ && r < opts_.r_min && inward < 0.0) {
    truncate_at_radius(opts_.r_min);
    termination_ = Termination::collision;
  } else if (r > opts_.r_max && inward > 0.0) {
    truncate_at_radius(opts_.r_max);
    termination_ = Termination::escape_radius;
  } else if ((t_stop - t_) * direction_ <= 0.0) {
    termination_ = Termination::time_limit;
  }
}

Vector Propagator::exact_state(double t) {
  Vector out;
  if (t == segment_.t0) return segment_.y0;
  stepper_.plain_step(segment_.y0, segment_.f0, t - segment_.t0, out);
  return out;
}

PhasePoint Trajectory::state_at(double t) const {
  require(!segments.empty(), ErrorKind::precondition, "empty trajectory");
  const bool forward = segments.front().h > 0.0;
  const double lo = forward ? 0.0 : final_time;
  const double hi = forward ? final_time : 0.0;
  require(t >= lo - 1e-15 && t <= hi + 1e-15, ErrorKind::precondition, "time outside the trajectory");
  auto it = std::lower_bound(segments.begin(), segments.end(), t, [forward](const DenseSegment& s, double value) {
    return forward ? s.t1() < value : s.t1() > value;
  });
  if (it == segments.end()) it = std::prev(segments.end());
  return PhasePoint::from_state(it->state(t));
}

Level sphere_level(int n, double radius) {
  return Level{[n, radius](const Vector& y) { return y.head(n).norm() - radius; },
               [n](const Vector& y, const Vector&) {
                 const double r = y.head(n).norm();
                 return y.head(n).dot(y.tail(n)) / r;
               }};
}

std::optional<double> crossing_in_segment(Propagator& prop, const Level& level, double previous_value) {
  const DenseSegment& seg = prop.segment();
  const HamiltonianSystem& sys = prop.system();
  const double t_end = prop.time();  // may be truncated inside the step
  const int dir = prop.direction();

  std::array<double, samples_per_step + 1> ts{}, vs{}, rs{};
  std::array<bool, samples_per_step + 1> have_rate{};
  Vector y, f(sys.phase_dim());
  for (int j = 0; j <= samples_per_step; ++j) {
    ts[j] = seg.t0 + (t_end - seg.t0) * j / samples_per_step;
    if (j == 0) {
      vs[j] = previous_value;
    } else if (j == samples_per_step) {
      vs[j] = level.value(prop.state());
    } else {
      seg.state(ts[j], y);
      vs[j] = level.value(y);
    }
  }
  // rate in integration time
  auto rate_at = [&](int j) {
    if (!have_rate[j]) {
      if (j == samples_per_step) {
        y = prop.state();
      } else {
        seg.state(ts[j], y);
      }
      sys.vector_field_of_state(y, f);
      rs[j] = dir * level.rate(y, f);
      have_rate[j] = true;
    }
    return rs[j];
  };
  auto value_at = [&](double t) {
    seg.state(t, y);
    return level.value(y);
  };
  auto rate_value = [&](double t) {
    seg.state(t, y);
    sys.vector_field_of_state(y, f);
    return dir * level.rate(y, f);
  };

  for (int j = 1; j <= samples_per_step; ++j) {
    double a = ts[j - 1], b = ts[j], fa = vs[j - 1], fb = vs[j];
    if (!(fa > 0.0)) continue;
    if (!(fb <= 0.0)) {
      // a dip below zero between two positive samples shows up as a rate sign change
      if (!(rate_at(j - 1) < 0.0 && rate_at(j) > 0.0)) continue;
      const double t_min = bracketed_root(rate_value, a, b, rs[j - 1], rs[j]);
      const double v_min = value_at(t_min);
      if (v_min > 0.0) continue;
      b = t_min;
      fb = v_min;
    }
    double t_root = bracketed_root(value_at, a, b, fa, fb);
    // Newton polish on the directly integrated state
    const double lo = std::min(seg.t0, t_end), hi = std::max(seg.t0, t_end);
    for (int it = 0; it < 3; ++it) {
      const Vector exact = prop.exact_state(t_root);
      sys.vector_field_of_state(exact, f);
      const double v = level.value(exact);
      const double r = level.rate(exact, f);
      if (r == 0.0 || v == 0.0) break;
      const double next = std::clamp(t_root - v / r, lo, hi);
      if (next == t_root) break;
      t_root = next;
    }
    return t_root;
  }
  return std::nullopt;
}

CrossingSearch find_crossing(const HamiltonianSystem& sys, const PhasePoint& x0, double t_end, const Level& level,
                             const FlowOptions& opts, bool start_on_level) {
  require(t_end != 0.0, ErrorKind::precondition, "zero integration span");
  Propagator prop(sys, x0, opts, t_end > 0.0 ? 1 : -1);
  double previous = level.value(prop.state());
  if (start_on_level) previous = std::min(previous, 0.0);
  while (prop.step(t_end)) {
    if (auto t = crossing_in_segment(prop, level, previous)) {
      return CrossingSearch{*t, prop.exact_state(*t), *t, std::nullopt};
    }
    previous = level.value(prop.state());
    if (prop.termination()) break;
  }
  return CrossingSearch{std::nullopt, prop.state(), prop.time(),
                        prop.termination().value_or(Termination::time_limit)};
}

Trajectory integrate(const HamiltonianSystem& sys, const PhasePoint& x0, double t_end, const FlowOptions& opts,
                     const std::vector<int>& record_surfaces) {
  require(t_end != 0.0 && std::isfinite(t_end), ErrorKind::precondition, "integration span must be finite and nonzero");
  Propagator prop(sys, x0, opts, t_end > 0.0 ? 1 : -1);
  Trajectory traj;
  traj.initial = x0;

  std::vector<Level> levels;
  std::vector<double> previous;
  for (int m : record_surfaces) {
    require(m >= 1, ErrorKind::precondition, "surface index must be >= 1");
    levels.push_back(sphere_level(sys.n(), 1.0 / m));
    previous.push_back(levels.back().value(prop.state()));
  }

  while (prop.step(t_end)) {
    traj.segments.push_back(prop.segment());
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (auto t = crossing_in_segment(prop, levels[i], previous[i])) {
        HitEvent hit;
        hit.m = record_surfaces[i];
        hit.time = *t;
        hit.point = PhasePoint::from_state(prop.exact_state(*t));
        hit.margin = hit.point.p.dot(hit.point.q.normalized());
        traj.events.push_back(std::move(hit));
      }
      previous[i] = levels[i].value(prop.state());
    }
    if (prop.termination()) break;
  }
  std::sort(traj.events.begin(), traj.events.end(),
            [](const HitEvent& a, const HitEvent& b) { return std::abs(a.time) < std::abs(b.time); });
  traj.termination = prop.termination().value_or(Termination::time_limit);
  traj.final_time = prop.time();
  traj.final_point = PhasePoint::from_state(prop.state());
  traj.energy_drift = prop.max_energy_drift();
  return traj;
}

std::optional<CollisionEvent> detect_collision(const Trajectory& trajectory) {
  if (trajectory.termination != Termination::collision) return std::nullopt;
  return CollisionEvent{trajectory.final_time, trajectory.final_point};
}

PhasePoint flow_map(const HamiltonianSystem& sys, const PhasePoint& x0, double t, const FlowOptions& opts) {
  if (t == 0.0) return x0;
  Propagator prop(sys, x0, opts, t > 0.0 ? 1 : -1);
  while (prop.step(t)) {
    if (prop.termination()) break;
  }
  if (prop.termination() != Termination::time_limit) {
    fail(ErrorKind::escape_time, "flow undefined up to t = " + std::to_string(t) + " (" +
                                     std::string(to_string(*prop.termination())) + ")");
  }
  return PhasePoint::from_state(prop.state());
}

HitEvent hit_surface(const HamiltonianSystem& sys, const PhasePoint& x0, double E, int m, double t_max,
                     const FlowOptions& opts) {
  require(m >= 1, ErrorKind::precondition, "surface index must be >= 1");
  require(t_max > 0.0, ErrorKind::precondition, "t_max must be positive");
  require(std::abs(sys.energy(x0) - E) <= 1e-8 * (1.0 + std::abs(E)), ErrorKind::precondition,
          "initial point is not on the energy surface");
  const double radius = 1.0 / m;
  require(x0.q.norm() >= radius * (1.0 - 1e-12), ErrorKind::precondition,
          "initial point already lies inside the target sphere");
  const CrossingSearch found = find_crossing(sys, x0, t_max, sphere_level(sys.n(), radius), opts);
  if (!found.time) {
    fail(ErrorKind::no_hit, "orbit ended (" + std::string(to_string(*found.stop)) + ") at t = " +
                                std::to_string(found.stop_time) + " without reaching |q| = 1/" + std::to_string(m));
  }
  HitEvent hit;
  hit.m = m;
  hit.time = *found.time;
  hit.point = PhasePoint::from_state(found.state);
  hit.margin = hit.point.p.dot(hit.point.q.normalized());
  if (std::abs(hit.margin) / (1.0 + hit.point.p.norm()) < opts.tangency_threshold) {
    fail(ErrorKind::tangential_hit, "orbit meets |q| = 1/" + std::to_string(m) + " tangentially");
  }
  return hit;
}

}  // namespace wander
