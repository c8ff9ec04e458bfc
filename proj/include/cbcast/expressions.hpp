#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cbcast/geometry.hpp"
#include "cbcast/interval.hpp"

namespace cbcast {

// Catalog of the prover's expressions in the compactified coordinates (x, z), z = 1/y.
enum class Expression {
  g,              // g(x)
  g_over_x32,     // g(x)/x^{3/2}
  f,              // f(x, 1/z)
  f_over_sqrt_x,  // f/sqrt(x)
  f_prime,        // f'
  f_double_prime, // f''
  fpp_x32,        // x^{3/2} f''
  fpp_sqrt_2mx,   // sqrt(2-x) f''
  t1_weighted,    // T1 sqrt(x(2-x))
  t2_weighted,    // T2 sqrt(x)
  t3_weighted,    // T3 x^{3/2}
  f_ratio_half,   // f(x)/f(x/2)
};

inline constexpr std::array<Expression, 12> all_expressions{
    Expression::g,           Expression::g_over_x32,    Expression::f,           Expression::f_over_sqrt_x,
    Expression::f_prime,     Expression::f_double_prime, Expression::fpp_x32,    Expression::fpp_sqrt_2mx,
    Expression::t1_weighted, Expression::t2_weighted,   Expression::t3_weighted, Expression::f_ratio_half};

inline constexpr std::string_view to_string(Expression e) {
  switch (e) {
  case Expression::g: return "g";
  case Expression::g_over_x32: return "g_over_x32";
  case Expression::f: return "f";
  case Expression::f_over_sqrt_x: return "f_over_sqrt_x";
  case Expression::f_prime: return "f_prime";
  case Expression::f_double_prime: return "f_double_prime";
  case Expression::fpp_x32: return "fpp_x32";
  case Expression::fpp_sqrt_2mx: return "fpp_sqrt_2mx";
  case Expression::t1_weighted: return "t1_weighted";
  case Expression::t2_weighted: return "t2_weighted";
  case Expression::t3_weighted: return "t3_weighted";
  case Expression::f_ratio_half: return "f_ratio_half";
  }
  return "?";
}

inline std::optional<Expression> expression_from_string(std::string_view s) {
  for (auto e : all_expressions)
    if (to_string(e) == s) return e;
  return std::nullopt;
}

struct Box {
  Interval x;
  Interval z;
};

// Closed domain on which the safe form is defined; open ends are flagged.
struct ExpressionDomain {
  double x_lo = 0.0;
  double x_hi = 2.0;
  bool x_lo_open = false;
  bool x_hi_open = false;
};

inline constexpr ExpressionDomain domain_of(Expression e) {
  switch (e) {
  case Expression::f_prime: return {0.0, 2.0, true, false};
  case Expression::f_double_prime: return {0.0, 2.0, true, true};
  case Expression::fpp_x32: return {0.0, 2.0, false, true};
  case Expression::fpp_sqrt_2mx: return {0.0, 2.0, true, false};
  default: return {0.0, 2.0, false, false};
  }
}

inline bool in_domain(Expression e, const Box& b) {
  const auto d = domain_of(e);
  const bool xl = d.x_lo_open ? b.x.lo > d.x_lo : b.x.lo >= d.x_lo;
  const bool xh = d.x_hi_open ? b.x.hi < d.x_hi : b.x.hi <= d.x_hi;
  return b.x.is_valid() && b.z.is_valid() && xl && xh && b.z.lo >= 0.0 && b.z.hi <= 1.0;
}

namespace safe {

inline constexpr double G_collar = 0x1p-20;

inline double G0() { return 4.0 * std::numbers::sqrt2 / 3.0; }

inline Interval G0_interval() { return sqrt(Interval(2.0)) * Interval(4.0) / Interval(3.0); }

// G(u) = g(u)/u^{3/2}, decreasing on [0,2]
inline double G(double u) {
  u = std::clamp(u, 0.0, 2.0);
  if (u == 0.0) return G0();
  return detail::g_unchecked(u) / (u * std::sqrt(u));
}

inline double g(double u) { return detail::g_unchecked(u); }

// rigorous enclosure of g at a point
inline Interval g_point(double u) {
  const Interval U(u);
  const Interval v = Interval(1.0) - U;
  return acos(v) - v * sqrt(U * (Interval(2.0) - U));
}

// rigorous enclosure of G at a point; Taylor bounds on the collar
inline Interval G_point(double u) {
  if (u == 0.0) return G0_interval();
  const Interval U(u);
  if (u < G_collar) {
    const Interval base = G0_interval();
    const Interval lo = base - Interval(2.0) * U / (Interval(5.0) * sqrt(Interval(2.0) - U));
    const Interval hi = base - sqrt(Interval(2.0)) * U / Interval(5.0);
    return {lo.lo, hi.hi};
  }
  return g_point(u) / pow32(U);
}

inline Interval clip_unit2(const Interval& u) {
  if (u.lo < 0.0 || u.hi > 2.0) ++clip_events();
  return {std::clamp(u.lo, 0.0, 2.0), std::clamp(u.hi, 0.0, 2.0)};
}

inline Interval G(const Interval& u) {
  const Interval c = clip_unit2(u);
  return {G_point(c.hi).lo, G_point(c.lo).hi};
}

inline Interval g(const Interval& u) {
  const Interval c = clip_unit2(u);
  return {std::max(0.0, g_point(c.lo).lo), g_point(c.hi).hi};
}

// R = x/(2 - (2-x) z) in [0,1], increasing in x and z
inline double ratio_xp(double x, double z) {
  if (x == 0.0) return 0.0;
  return std::min(1.0, x / (2.0 - (2.0 - x) * z));
}

inline Interval ratio_xp(const Interval& x, const Interval& z) {
  auto at = [](double xv, double zv) {
    if (xv == 0.0) return Interval(0.0);
    const Interval X(xv);
    return X / (Interval(2.0) - (Interval(2.0) - X) * Interval(zv));
  };
  const double lo = at(x.lo, z.lo).lo;
  const double hi = std::min(1.0, at(x.hi, z.hi).hi);
  return {std::max(0.0, lo), hi};
}

using std::sqrt;
using cbcast::sqrt;
using cbcast::pow32;

template <class T> T F(const T& x, const T& z) {
  const T C = (T(2.0) - x) * z;
  const T P = T(2.0) - C;
  const T A = x * P / T(2.0);
  const T u = x * z;
  return x * pow32(P / T(2.0)) * G(A) + T(0.25) * (u + T(1.0)) * sqrt(u + T(2.0)) * pow32(T(2.0) - x) * G(C);
}

template <class T> T f(const T& x, const T& z) {
  const T C = (T(2.0) - x) * z;
  const T P = T(2.0) - C;
  const T u = x * z;
  return g(x * P / T(2.0)) + T(0.25) * (u + T(1.0)) * sqrt(x * (u + T(2.0))) * pow32(T(2.0) - x) * G(C);
}

template <class T> T f_prime(const T& x, const T& z) {
  const T C = (T(2.0) - x) * z;
  const T P = T(2.0) - C;
  const T u = x * z;
  const T v = u + T(1.0);
  const T Q = T(2.0) * v * v - T(1.0);
  return pow32(T(2.0) - x) * G(C) * Q / (T(4.0) * sqrt(x * (u + T(2.0)))) +
         (v - T(2.0) * z) * sqrt(x * (T(2.0) - x) * P * (u + T(2.0))) / T(2.0);
}

template <class T> T t1_weighted(const T& x, const T& z) {
  const T P = T(2.0) - (T(2.0) - x) * z;
  const T s = sqrt(x * z + T(2.0));
  const T c4 = T(-3.0) * z * z * z;
  const T c3 = (T(-12.0) + T(14.0) * z) * z * z;
  const T c2 = (T(-14.0) + (T(42.0) - T(20.0) * z) * z) * z;
  const T k0 = T(-4.0) + (T(30.0) + (T(-36.0) + T(8.0) * z) * z) * z;
  const T K = ((c4 * x + c3) * x + c2) * x + k0;
  return (T(1.0) - T(2.0) * z) * sqrt(P) / s + sqrt(x) * sqrt(ratio_xp(x, z)) * K / (T(2.0) * s);
}

template <class T> T t2_weighted(const T& x, const T& z) {
  const T P = T(2.0) - (T(2.0) - x) * z;
  const T v = x * z + T(1.0);
  const T Q = T(2.0) * v * v - T(1.0);
  return -(sqrt((T(2.0) - x) * P) * Q) / (T(2.0) * sqrt(x * z + T(2.0)));
}

template <class T> T t3_weighted(const T& x, const T& z) {
  const T C = (T(2.0) - x) * z;
  const T v = x * z + T(1.0);
  return v * (T(2.0) * v * v - T(3.0)) * pow32(T(2.0) - x) * G(C) / (T(4.0) * pow32(x * z + T(2.0)));
}

template <class T> T f_double_prime(const T& x, const T& z) {
  return t1_weighted(x, z) / sqrt(x * (T(2.0) - x)) + t2_weighted(x, z) / sqrt(x) + t3_weighted(x, z) / pow32(x);
}

template <class T> T fpp_x32(const T& x, const T& z) {
  return t1_weighted(x, z) * x / sqrt(T(2.0) - x) + t2_weighted(x, z) * x + t3_weighted(x, z);
}

template <class T> T fpp_sqrt_2mx(const T& x, const T& z) {
  const T r = sqrt(T(2.0) - x);
  return t1_weighted(x, z) / sqrt(x) + t2_weighted(x, z) * r / sqrt(x) + t3_weighted(x, z) * r / pow32(x);
}

template <class T> T f_ratio_half(const T& x, const T& z) {
  return sqrt(T(2.0)) * F(x, z) / F(x / T(2.0), z);
}

template <class T> T evaluate(Expression e, const T& x, const T& z) {
  switch (e) {
  case Expression::g: return g(x);
  case Expression::g_over_x32: return G(x);
  case Expression::f: return f(x, z);
  case Expression::f_over_sqrt_x: return F(x, z);
  case Expression::f_prime: return f_prime(x, z);
  case Expression::f_double_prime: return f_double_prime(x, z);
  case Expression::fpp_x32: return fpp_x32(x, z);
  case Expression::fpp_sqrt_2mx: return fpp_sqrt_2mx(x, z);
  case Expression::t1_weighted: return t1_weighted(x, z);
  case Expression::t2_weighted: return t2_weighted(x, z);
  case Expression::t3_weighted: return t3_weighted(x, z);
  case Expression::f_ratio_half: return f_ratio_half(x, z);
  }
  throw std::logic_error("unknown expression");
}

} // namespace safe

// Enclosure of the expression's range over the box.
inline Interval interval_eval(Expression e, const Box& box) {
  if (!in_domain(e, box)) throw std::domain_error("interval_eval: box outside the domain of " + std::string(to_string(e)));
  return safe::evaluate<Interval>(e, box.x, box.z);
}

// Plain floating-point value of the same safe form.
inline double point_eval(Expression e, double x, double z) { return safe::evaluate<double>(e, x, z); }

} // namespace cbcast
