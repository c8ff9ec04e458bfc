#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>

namespace cbcast {

// Directed rounding emulated with error-free transformations: the round-to-nearest
// result is moved one ulp outward only when the exact residual says it fell on the
// wrong side. Below 2^-968 residuals can be inexact, so results are widened blindly.
namespace rounding {

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double tiny = 0x1p-968;
inline constexpr const char* mode = "emulated-directed (error-free transformations)";

inline double next_down(double v) { return std::nextafter(v, -inf); }
inline double next_up(double v) { return std::nextafter(v, inf); }

inline double overflow_down(double s) {
  if (std::isnan(s)) return -inf;
  return s == inf ? std::numeric_limits<double>::max() : s;
}
inline double overflow_up(double s) {
  if (std::isnan(s)) return inf;
  return s == -inf ? -std::numeric_limits<double>::max() : s;
}

// exact error of a+b, given s = fl(a+b)
inline double two_sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

inline double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return std::isfinite(a) && std::isfinite(b) ? overflow_down(s) : (std::isnan(s) ? -inf : s);
  return two_sum_err(a, b, s) < 0.0 ? next_down(s) : s;
}
inline double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return std::isfinite(a) && std::isfinite(b) ? overflow_up(s) : (std::isnan(s) ? inf : s);
  return two_sum_err(a, b, s) > 0.0 ? next_up(s) : s;
}
inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) return std::isfinite(a) && std::isfinite(b) ? overflow_down(p) : p;
  if (std::fabs(p) < tiny) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}
inline double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) return std::isfinite(a) && std::isfinite(b) ? overflow_up(p) : p;
  if (std::fabs(p) < tiny) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

// sign of (a/b - q), using r = a - q b exactly
inline int div_err_sign(double a, double b, double q) {
  const double r = std::fma(-q, b, a);
  if (r == 0.0) return 0;
  return (r > 0.0) == (b > 0.0) ? 1 : -1;
}
inline double div_down(double a, double b) {
  if (a == 0.0) return 0.0;
  const double q = a / b;
  if (!std::isfinite(q)) return std::isfinite(a) ? overflow_down(q) : q;
  if (std::fabs(q) < tiny || std::fabs(a) < tiny) return next_down(q);
  return div_err_sign(a, b, q) < 0 ? next_down(q) : q;
}
inline double div_up(double a, double b) {
  if (a == 0.0) return 0.0;
  const double q = a / b;
  if (!std::isfinite(q)) return std::isfinite(a) ? overflow_up(q) : q;
  if (std::fabs(q) < tiny || std::fabs(a) < tiny) return next_up(q);
  return div_err_sign(a, b, q) > 0 ? next_up(q) : q;
}

inline double sqrt_down(double a) {
  if (a <= 0.0) return 0.0;
  if (a == inf) return std::numeric_limits<double>::max();
  const double s = std::sqrt(a);
  if (a < tiny) return std::max(0.0, next_down(s));
  return std::fma(-s, s, a) < 0.0 ? std::max(0.0, next_down(s)) : s;
}
inline double sqrt_up(double a) {
  if (a <= 0.0) return 0.0;
  if (a == inf) return inf;
  const double s = std::sqrt(a);
  if (a < tiny) return next_up(s);
  return std::fma(-s, s, a) > 0.0 ? next_up(s) : s;
}

} // namespace rounding

// Count of arguments clipped into a function's domain (sqrt of a negative lower
// bound, acos outside [-1,1], G outside [0,2]); per thread.
inline std::uint64_t& clip_events() {
  thread_local std::uint64_t n = 0;
  return n;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double v) : lo(v), hi(v) {}
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  static constexpr Interval entire() { return {-rounding::inf, rounding::inf}; }

  constexpr double width() const { return hi - lo; }
  constexpr double mid() const { return lo + 0.5 * (hi - lo); }
  constexpr bool contains(double v) const { return lo <= v && v <= hi; }
  constexpr bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  constexpr bool is_point() const { return lo == hi; }
  bool is_valid() const { return !(std::isnan(lo) || std::isnan(hi)) && lo <= hi; }

  friend std::ostream& operator<<(std::ostream& os, const Interval& v) {
    return os << '[' << v.lo << ", " << v.hi << ']';
  }
};

inline Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator+(const Interval& a, const Interval& b) {
  return {rounding::add_down(a.lo, b.lo), rounding::add_up(a.hi, b.hi)};
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return {rounding::sub_down(a.lo, b.hi), rounding::sub_up(a.hi, b.lo)};
}

inline Interval operator*(const Interval& a, const Interval& b) {
  using namespace rounding;
  if (a.lo >= 0.0 && b.lo >= 0.0) return {mul_down(a.lo, b.lo), mul_up(a.hi, b.hi)};
  const double lo = std::min({mul_down(a.lo, b.lo), mul_down(a.lo, b.hi), mul_down(a.hi, b.lo), mul_down(a.hi, b.hi)});
  const double hi = std::max({mul_up(a.lo, b.lo), mul_up(a.lo, b.hi), mul_up(a.hi, b.lo), mul_up(a.hi, b.hi)});
  return {lo, hi};
}

inline Interval operator/(const Interval& a, const Interval& b) {
  using namespace rounding;
  if (b.lo <= 0.0 && b.hi >= 0.0) return Interval::entire();
  const double lo = std::min({div_down(a.lo, b.lo), div_down(a.lo, b.hi), div_down(a.hi, b.lo), div_down(a.hi, b.hi)});
  const double hi = std::max({div_up(a.lo, b.lo), div_up(a.lo, b.hi), div_up(a.hi, b.lo), div_up(a.hi, b.hi)});
  return {lo, hi};
}

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }

inline Interval sqr(const Interval& a) {
  using namespace rounding;
  if (a.lo >= 0.0) return {mul_down(a.lo, a.lo), mul_up(a.hi, a.hi)};
  if (a.hi <= 0.0) return {mul_down(a.hi, a.hi), mul_up(a.lo, a.lo)};
  return {0.0, std::max(mul_up(a.lo, a.lo), mul_up(a.hi, a.hi))};
}

// The caller asserts the true argument is nonnegative; a negative lower bound is an
// overestimate and is clipped.
inline Interval sqrt(const Interval& a) {
  if (a.lo < 0.0) ++clip_events();
  return {rounding::sqrt_down(std::max(a.lo, 0.0)), rounding::sqrt_up(std::max(a.hi, 0.0))};
}

// a^{3/2} for a >= 0
inline Interval pow32(const Interval& a) {
  if (a.lo < 0.0) ++clip_events();
  const double l = std::max(a.lo, 0.0), h = std::max(a.hi, 0.0);
  return {rounding::mul_down(l, rounding::sqrt_down(l)), rounding::mul_up(h, rounding::sqrt_up(h))};
}

inline Interval pi_interval() { return {std::numbers::pi, rounding::next_up(std::numbers::pi)}; }

// libm acos widened by two ulps per side; acos is decreasing.
inline Interval acos(const Interval& a) {
  double l = a.lo, h = a.hi;
  if (l < -1.0 || h > 1.0) ++clip_events();
  l = std::clamp(l, -1.0, 1.0);
  h = std::clamp(h, -1.0, 1.0);
  const double lo = std::max(0.0, rounding::next_down(rounding::next_down(std::acos(h))));
  const double hi = std::min(rounding::next_up(std::numbers::pi), rounding::next_up(rounding::next_up(std::acos(l))));
  return {lo, hi};
}

inline double pow32(double a) { return a * std::sqrt(a); }

} // namespace cbcast
