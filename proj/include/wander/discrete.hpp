#pragma once

// Injective piecewise-affine maps of the half-line [0, inf) or the circle [0, 1),
// with surface families H_m given as finite unions of half-open intervals, and a
// brute-force grid oracle for the set of points whose orbit meets every H_m.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "wander/estimate.hpp"
#include "wander/rational.hpp"

namespace wander::discrete {

enum class Domain { half_line, circle };

/// T(x) = slope * x + offset on [lo, hi); hi absent means +inf (half-line only).
template <class S>
struct Piece {
  S lo;
  std::optional<S> hi;
  S slope;
  S offset;
};

/// [lo, hi)
template <class S>
struct Interval {
  S lo;
  S hi;
};

template <class S>
using SurfaceMap = std::map<int, std::vector<Interval<S>>>;

template <class S>
class DiscreteSystem {
 public:
  /// Validates that the pieces tile the domain and that their images are pairwise disjoint.
  DiscreteSystem(Domain domain, std::vector<Piece<S>> pieces, SurfaceMap<S> surfaces = {});

  Domain domain() const { return domain_; }
  const std::vector<Piece<S>>& pieces() const { return pieces_; }
  const SurfaceMap<S>& surfaces() const { return surfaces_; }

  S apply(const S& x) const;
  /// Every slope has absolute value 1.
  bool measure_preserving() const;
  bool in_surface(int m, const S& x) const;
  /// Lebesgue measure of H_m (0 when absent).
  double surface_measure(int m) const;

 private:
  const Piece<S>& piece_at(const S& x) const;
  Domain domain_;
  std::vector<Piece<S>> pieces_;
  SurfaceMap<S> surfaces_;
};

/// H_m = [m, m + width * decay^{m-1}) for m = 1..m_max.
template <class S>
SurfaceMap<S> geometric_family(int m_max, const S& width, const S& decay);

/// x, T(x), ..., T^{steps-1}(x)
template <class S>
std::vector<S> forward_orbit(const DiscreteSystem<S>& sys, const S& x, long steps);

struct PreservationReport {
  double max_distortion = 0.0;  // max over cells I of |mu(T(I)) - mu(I)|
  bool preserving = false;      // all slopes have |slope| = 1
};

/// Cells [lo + i h, lo + (i+1) h), h = (hi - lo) / cells.
template <class S>
PreservationReport check_measure_preservation(const DiscreteSystem<S>& sys, const S& lo, const S& hi, long cells);

template <class S>
struct Grid {
  S lo;
  S hi;
  long points = 1'000'000;  // nodes lo + i (hi - lo) / points, i < points
};

struct DiscreteDepth {
  int M = 0;
  MeasureEstimate estimate;  // Lebesgue measure of grid points meeting H_m for all m in [m0, M]
  long transition = 0;
  long censored = 0;         // undecided within the step budget
  double min_surface = 0.0;  // min over m0 <= m <= M of mu(H_m)
};

struct DiscreteProfile {
  int m0 = 0;
  long points = 0;
  double resolution = 0.0;   // grid spacing
  std::vector<DiscreteDepth> depths;
};

template <class S>
DiscreteProfile estimate_transition_measure_discrete(const DiscreteSystem<S>& sys, int m0, int M, const Grid<S>& grid,
                                                     long max_steps = 100'000);

/// A wandering system on the half-line: on each unit cell [k, k+1), k < cells, an interval
/// exchange with breakpoints on the lattice (1/lattice) Z followed by the shift to the next
/// cell; x + 1 beyond. H_m (m = 1..cells-1) is a random lattice-aligned union of intervals in [m, m+1).
DiscreteSystem<Rational> random_wandering_system(std::uint64_t seed, int cells, std::int64_t lattice);

}  // namespace wander::discrete
