#include "wander/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wander/errors.hpp"
#include "wander/rng.hpp"

namespace wander::discrete {

namespace {

double to_double(const Rational& x) { return x.to_double(); }
double to_double(double x) { return x; }

// Floating comparisons carry a 1e-12 guard so that lattice points computed in
// floating point land on the intended side of lattice-aligned endpoints.
double guard(double x) { return 1e-12 * std::max(1.0, std::abs(x)); }
bool at_least(const Rational& x, const Rational& a) { return x >= a; }
bool at_least(double x, double a) { return x >= a - guard(a); }
bool below(const Rational& x, const Rational& b) { return x < b; }
bool below(double x, double b) { return x < b - guard(b); }
bool same(const Rational& a, const Rational& b) { return a == b; }
bool same(double a, double b) { return std::abs(a - b) <= guard(b); }

Rational floor_of(const Rational& x) { return x.floor(); }
double floor_of(double x) { return std::floor(x); }
Rational abs_of(const Rational& x) { return x.abs(); }
double abs_of(double x) { return std::abs(x); }

template <class S>
S one() {
  return S(1);
}

template <class S>
bool overlap(const Interval<S>& a, const std::optional<S>& a_hi, const Interval<S>& b, const std::optional<S>& b_hi) {
  // positive-length intersection of [a.lo, a_hi) and [b.lo, b_hi), absent hi = inf
  const S lo = std::max(a.lo, b.lo, [](const S& x, const S& y) { return x < y; });
  if (!a_hi && !b_hi) return true;
  S hi = !a_hi ? *b_hi : !b_hi ? *a_hi : std::min(*a_hi, *b_hi, [](const S& x, const S& y) { return x < y; });
  return below(lo, hi);
}

}  // namespace

template <class S>
DiscreteSystem<S>::DiscreteSystem(Domain domain, std::vector<Piece<S>> pieces, SurfaceMap<S> surfaces)
    : domain_(domain), pieces_(std::move(pieces)), surfaces_(std::move(surfaces)) {
  require(!pieces_.empty(), ErrorKind::precondition, "map needs at least one piece");
  require(same(pieces_.front().lo, S(0)), ErrorKind::precondition, "first piece must start at 0");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    require(!same(p.slope, S(0)), ErrorKind::precondition, "piece with zero slope is not injective");
    const bool last = i + 1 == pieces_.size();
    if (!last) {
      require(p.hi.has_value() && same(*p.hi, pieces_[i + 1].lo), ErrorKind::precondition,
              "pieces must be contiguous and sorted");
      require(below(p.lo, *p.hi), ErrorKind::precondition, "empty piece");
    }
  }
  const auto& tail = pieces_.back();
  if (domain_ == Domain::half_line) {
    require(!tail.hi.has_value(), ErrorKind::precondition, "last half-line piece must extend to infinity");
    require(S(0) < tail.slope, ErrorKind::precondition, "unbounded piece must be increasing");
  } else {
    require(tail.hi.has_value() && same(*tail.hi, S(1)), ErrorKind::precondition, "circle pieces must end at 1");
  }

  // images, as half-open intervals (circle images folded into [0, 1))
  std::vector<std::pair<Interval<S>, std::optional<S>>> images;
  for (const auto& p : pieces_) {
    const S a = p.slope * p.lo + p.offset;
    if (!p.hi) {
      require(at_least(a, S(0)), ErrorKind::precondition, "image leaves the half-line");
      images.push_back({Interval<S>{a, a}, std::nullopt});
      continue;
    }
    const S b = p.slope * *p.hi + p.offset;
    S lo = a < b ? a : b, hi = a < b ? b : a;
    if (domain_ == Domain::half_line) {
      require(at_least(lo, S(0)), ErrorKind::precondition, "image leaves the half-line");
      images.push_back({Interval<S>{lo, hi}, hi});
    } else {
      require(below(hi - lo, S(1)) || same(hi - lo, S(1)), ErrorKind::precondition, "piece image wraps the circle");
      const S shift = floor_of(lo);
      lo = lo - shift;
      hi = hi - shift;
      if (below(S(1), hi)) {
        images.push_back({Interval<S>{lo, S(1)}, S(1)});
        images.push_back({Interval<S>{S(0), hi - S(1)}, hi - S(1)});
      } else {
        images.push_back({Interval<S>{lo, hi}, hi});
      }
    }
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      require(!overlap(images[i].first, images[i].second, images[j].first, images[j].second), ErrorKind::precondition,
              "piece images overlap: the map is not injective");
    }
  }
  for (const auto& [m, list] : surfaces_) {
    for (const auto& iv : list) require(!below(iv.hi, iv.lo), ErrorKind::precondition, "surface interval reversed");
  }
}

template <class S>
const Piece<S>& DiscreteSystem<S>::piece_at(const S& x) const {
  require(at_least(x, S(0)) && (domain_ == Domain::half_line || below(x, S(1))), ErrorKind::precondition,
          "point outside the domain");
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const S& value, const Piece<S>& p) { return value < p.lo; });
  if (it != pieces_.begin()) --it;
  return *it;
}

template <class S>
S DiscreteSystem<S>::apply(const S& x) const {
  const auto& p = piece_at(x);
  S y = p.slope * x + p.offset;
  if (domain_ == Domain::circle) y = y - floor_of(y);
  return y;
}

template <class S>
bool DiscreteSystem<S>::measure_preserving() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece<S>& p) { return same(abs_of(p.slope), S(1)); });
}

template <class S>
bool DiscreteSystem<S>::in_surface(int m, const S& x) const {
  const auto it = surfaces_.find(m);
  if (it == surfaces_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const Interval<S>& iv) { return at_least(x, iv.lo) && below(x, iv.hi); });
}

template <class S>
double DiscreteSystem<S>::surface_measure(int m) const {
  const auto it = surfaces_.find(m);
  if (it == surfaces_.end()) return 0.0;
  // union length; intervals may overlap
  std::vector<std::pair<double, double>> ivs;
  for (const auto& iv : it->second) ivs.emplace_back(to_double(iv.lo), to_double(iv.hi));
  std::sort(ivs.begin(), ivs.end());
  double total = 0.0, cur_lo = 0.0, cur_hi = -1.0;
  bool open = false;
  for (const auto& [a, b] : ivs) {
    if (!open || a > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = a;
      cur_hi = b;
      open = true;
    } else {
      cur_hi = std::max(cur_hi, b);
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

template <class S>
SurfaceMap<S> geometric_family(int m_max, const S& width, const S& decay) {
  require(m_max >= 0, ErrorKind::precondition, "negative family size");
  SurfaceMap<S> out;
  S len = width;
  for (int m = 1; m <= m_max; ++m) {
    out[m] = {Interval<S>{S(m), S(m) + len}};
    len = len * decay;
  }
  return out;
}

template <class S>
std::vector<S> forward_orbit(const DiscreteSystem<S>& sys, const S& x, long steps) {
  require(steps >= 0, ErrorKind::precondition, "negative step count");
  std::vector<S> orbit;
  orbit.reserve(steps);
  S y = x;
  for (long i = 0; i < steps; ++i) {
    orbit.push_back(y);
    if (i + 1 < steps) y = sys.apply(y);
  }
  return orbit;
}

template <class S>
PreservationReport check_measure_preservation(const DiscreteSystem<S>& sys, const S& lo, const S& hi, long cells) {
  require(cells > 0 && below(lo, hi), ErrorKind::precondition, "need a nonempty window and cells > 0");
  PreservationReport out;
  out.preserving = sys.measure_preserving();
  const S h = (hi - lo) / S(cells);
  for (long i = 0; i < cells; ++i) {
    const S a = lo + S(i) * h, b = a + h;
    double image = 0.0;
    for (const auto& p : sys.pieces()) {
      const S plo = a < p.lo ? p.lo : a;
      S phi = b;
      if (p.hi && *p.hi < phi) phi = *p.hi;
      if (below(plo, phi)) image += to_double(abs_of(p.slope)) * to_double(phi - plo);
    }
    if (sys.domain() == Domain::circle) image = std::min(image, 1.0);
    out.max_distortion = std::max(out.max_distortion, std::abs(image - to_double(h)));
  }
  return out;
}

template <class S>
DiscreteProfile estimate_transition_measure_discrete(const DiscreteSystem<S>& sys, int m0, int M, const Grid<S>& grid,
                                                     long max_steps) {
  require(m0 >= 1 && M >= m0, ErrorKind::precondition, "depth range must satisfy 1 <= m0 <= M");
  require(grid.points > 0 && below(grid.lo, grid.hi), ErrorKind::precondition, "grid needs points > 0 and lo < hi");
  require(max_steps > 0, ErrorKind::precondition, "step budget must be positive");
  const int depth = M - m0 + 1;

  // Beyond every remaining surface on a nondecreasing unit-slope tail, nothing more can be hit.
  std::optional<S> tail_start;
  const auto& tail = sys.pieces().back();
  if (sys.domain() == Domain::half_line && same(tail.slope, S(1)) && at_least(tail.offset, S(0))) {
    S start = tail.lo;
    for (int m = m0; m <= M; ++m) {
      const auto it = sys.surfaces().find(m);
      if (it == sys.surfaces().end()) continue;
      for (const auto& iv : it->second) {
        if (start < iv.hi) start = iv.hi;
      }
    }
    tail_start = start;
  }

  std::vector<long> transition(depth, 0), censored(depth, 0);
  std::vector<char> hit(depth);
  const S h = (grid.hi - grid.lo) / S(grid.points);
  for (long i = 0; i < grid.points; ++i) {
    const S x0 = grid.lo + S(i) * h;
    std::fill(hit.begin(), hit.end(), 0);
    int missing = depth;
    bool decided = false;
    S x = x0;
    for (long step = 0; step < max_steps; ++step) {
      for (int j = 0; j < depth; ++j) {
        if (!hit[j] && sys.in_surface(m0 + j, x)) {
          hit[j] = 1;
          --missing;
        }
      }
      if (missing == 0 || (tail_start && at_least(x, *tail_start))) {
        decided = true;
        break;
      }
      x = sys.apply(x);
      if (same(x, x0)) {  // periodic orbit: everything it will ever meet has been seen
        decided = true;
        break;
      }
    }
    int first_missing = depth;
    for (int j = 0; j < depth; ++j) {
      if (!hit[j]) {
        first_missing = j;
        break;
      }
    }
    for (int j = 0; j < depth; ++j) {
      if (j < first_missing) {
        ++transition[j];
      } else if (!decided) {
        ++censored[j];
      }
    }
  }

  DiscreteProfile out;
  out.m0 = m0;
  out.points = grid.points;
  out.resolution = to_double(h);
  double min_surface = std::numeric_limits<double>::infinity();
  for (int j = 0; j < depth; ++j) {
    min_surface = std::min(min_surface, sys.surface_measure(m0 + j));
    DiscreteDepth d;
    d.M = m0 + j;
    d.transition = transition[j];
    d.censored = censored[j];
    d.estimate.value = static_cast<double>(transition[j]) * out.resolution;
    d.estimate.count = grid.points;
    d.estimate.method = EstimateMethod::quadrature;
    d.min_surface = min_surface;
    out.depths.push_back(d);
  }
  return out;
}

DiscreteSystem<Rational> random_wandering_system(std::uint64_t seed, int cells, std::int64_t lattice) {
  require(cells >= 2 && lattice >= 4, ErrorKind::precondition, "need cells >= 2 and lattice >= 4");
  CounterRng rng(seed, 0);
  auto lattice_point = [&](std::int64_t k) { return Rational(k, lattice); };
  std::vector<Piece<Rational>> pieces;
  for (int k = 0; k < cells; ++k) {
    // interval exchange of [k, k+1) into [k+1, k+2)
    const int parts = 1 + static_cast<int>(rng.uniform() * 4);
    std::vector<std::int64_t> cuts{0, lattice};
    for (int i = 1; i < parts; ++i) cuts.push_back(1 + static_cast<std::int64_t>(rng.uniform() * (lattice - 1)));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const int count = static_cast<int>(cuts.size()) - 1;
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    for (int i = count - 1; i > 0; --i) std::swap(order[i], order[static_cast<int>(rng.uniform() * (i + 1))]);
    std::vector<std::int64_t> target(count);
    std::int64_t pos = 0;
    for (int idx : order) {
      target[idx] = pos;
      pos += cuts[idx + 1] - cuts[idx];
    }
    for (int i = 0; i < count; ++i) {
      const Rational lo = Rational(k) + lattice_point(cuts[i]);
      const Rational hi = Rational(k) + lattice_point(cuts[i + 1]);
      const Rational dest = Rational(k + 1) + lattice_point(target[i]);
      pieces.push_back(Piece<Rational>{lo, hi, Rational(1), dest - lo});
    }
  }
  pieces.push_back(Piece<Rational>{Rational(cells), std::nullopt, Rational(1), Rational(1)});

  SurfaceMap<Rational> surfaces;
  for (int m = 1; m < cells; ++m) {
    const int parts = 1 + static_cast<int>(rng.uniform() * 2);
    const double scale = std::pow(0.8, m);
    for (int i = 0; i < parts; ++i) {
      const auto len = std::max<std::int64_t>(1, static_cast<std::int64_t>(rng.uniform() * scale * lattice / parts));
      const auto start = static_cast<std::int64_t>(rng.uniform() * (lattice - len));
      surfaces[m].push_back(Interval<Rational>{Rational(m) + lattice_point(start), Rational(m) + lattice_point(start + len)});
    }
  }
  return DiscreteSystem<Rational>(Domain::half_line, std::move(pieces), std::move(surfaces));
}

#define WANDER_DISCRETE_INSTANTIATE(S)                                                                           \
  template class DiscreteSystem<S>;                                                                              \
  template SurfaceMap<S> geometric_family<S>(int, const S&, const S&);                                          \
  template std::vector<S> forward_orbit<S>(const DiscreteSystem<S>&, const S&, long);                           \
  template PreservationReport check_measure_preservation<S>(const DiscreteSystem<S>&, const S&, const S&, long); \
  template DiscreteProfile estimate_transition_measure_discrete<S>(const DiscreteSystem<S>&, int, int, const Grid<S>&, long);

WANDER_DISCRETE_INSTANTIATE(Rational)
WANDER_DISCRETE_INSTANTIATE(double)

}  // namespace wander::discrete
