#pragma once

#include <cstdint>
#include <string_view>

namespace wander {

enum class EstimateMethod { quadrature, monte_carlo, closed_form };

std::string_view to_string(EstimateMethod m);

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;      // zero unless monte_carlo
  long count = 0;              // samples or quadrature nodes
  std::uint64_t seed = 0;      // 0 for deterministic methods
  EstimateMethod method = EstimateMethod::quadrature;
  bool degenerate = false;     // n = 1: value is a point count
};

}  // namespace wander
