#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wander {

enum class ErrorKind {
  precondition,          // invalid argument or violated operation precondition
  dimension_mismatch,
  singularity,           // potential evaluated at q = 0
  rest_point,            // grad H vanishes
  degenerate,            // degenerate denominator or dimension (n = 1 charts)
  incompatible_structure,
  off_surface,
  no_hit,
  tangential_hit,
  collision_before_hit,
  empty_surface,
  chart_escape,          // flow tube leaves the chart
  escape_time,           // flow undefined on the requested interval
  budget_exhausted,
  parse,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace wander
