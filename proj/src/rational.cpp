#include "wander/rational.hpp"

#include <charconv>
#include <limits>

#include "wander/errors.hpp"

namespace wander {

namespace {

wide_int gcd128(wide_int a, wide_int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const wide_int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(ErrorKind::parse, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  require(d != 0, ErrorKind::precondition, "rational with zero denominator");
  *this = from_wide(n, d);
}

Rational Rational::from_wide(wide_int n, wide_int d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const wide_int g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  constexpr wide_int lim = std::numeric_limits<std::int64_t>::max();
  require(n <= lim && n >= -lim && d <= lim, ErrorKind::precondition, "rational arithmetic overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational::from_wide(static_cast<wide_int>(a.num_) + b.num_, a.den_);
  return Rational::from_wide(static_cast<wide_int>(a.num_) * b.den_ + static_cast<wide_int>(b.num_) * a.den_,
                             static_cast<wide_int>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<wide_int>(a.num_) * b.num_, static_cast<wide_int>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  require(b.num_ != 0, ErrorKind::precondition, "rational division by zero");
  return Rational::from_wide(static_cast<wide_int>(a.num_) * b.den_, static_cast<wide_int>(a.den_) * b.num_);
}

Rational Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return Rational(q);
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  require(!text.empty(), ErrorKind::parse, "empty rational");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  std::int64_t exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    exponent = parse_int(text.substr(e + 1));
    text = text.substr(0, e);
  }
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string digits;
  std::int64_t scale = 0;
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
    scale = static_cast<std::int64_t>(text.size() - dot - 1);
  } else {
    digits = std::string(text);
  }
  require(!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos, ErrorKind::parse,
          "not a rational: '" + std::string(text) + "'");
  Rational value(parse_int(digits));
  scale -= exponent;
  Rational ten(10);
  for (; scale > 0; --scale) value = value / ten;
  for (; scale < 0; ++scale) value = value * ten;
  return negative ? -value : value;
}

}  // namespace wander
