#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace cbcast {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

inline double norm(Point2 p) { return std::sqrt(p.x * p.x + p.y * p.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline double dist2(Point2 a, Point2 b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

// g without domain check, argument clamped to [0,2]. Evaluated as (t - sin t)/2 with
// t = 4 asin(sqrt(u/2)), by its Taylor series when t < 1.
inline double g_unchecked(double u) {
  u = std::clamp(u, 0.0, 2.0);
  const double t = 4.0 * std::asin(std::sqrt(0.5 * u));
  if (t >= 1.0) return 0.5 * (t - std::sin(t));
  const double t2 = t * t;
  double term = t * t2 / 6.0, s = 0.0;
  for (int k = 1; k <= 9; ++k) {
    s += term;
    term *= -t2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return 0.5 * s;
}

} // namespace detail

struct EllipseParams {
  double d = 0.0;
  double w = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double z0 = 0.0;
  double z1 = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
};

// Excess path length via p between the origin and (d,0).
inline double delta_d(Point2 p, double d) {
  detail::require(d > 0.0, "delta_d: d must be positive");
  return norm(p) + std::hypot(d - p.x, p.y) - d;
}

// Unit-circle segment area at depth x.
inline double segment_g(double x) {
  detail::require(x >= 0.0 && x <= 2.0, "segment_g: x outside [0,2]");
  return detail::g_unchecked(x);
}

inline double segment_area(double r1, double r2, double z) {
  detail::require(r1 > 0.0 && r2 > 0.0, "segment_area: radii must be positive");
  detail::require(z >= 0.0 && z <= 2.0 * r1, "segment_area: z outside [0, 2 r1]");
  return r1 * r2 * detail::g_unchecked(z / r1);
}

inline EllipseParams ellipse_params(double w, double d) {
  detail::require(w >= 0.0 && w <= 2.0 && d >= 1.0, "ellipse_params: need w in [0,2], d >= 1");
  EllipseParams e;
  e.d = d;
  e.w = w;
  e.r1 = 0.5 * (d + w);
  e.r2 = 0.5 * std::sqrt((2.0 * d + w) * w);
  e.z0 = w * (2.0 * d - 2.0 + w) / (2.0 * d);
  e.z1 = (2.0 - w) * (d + w) / (2.0 * d);
  e.x0 = 1.0 - e.z0;
  e.y0 = std::sqrt(std::max(0.0, 1.0 - e.x0 * e.x0));
  return e;
}

// |E_{<=w} ∩ U| for the receiver at distance d.
inline double intersection_area_f(double w, double d) {
  detail::require(w >= 0.0 && w <= 2.0 && d >= 1.0, "intersection_area_f: need w in [0,2], d >= 1");
  if (w >= 2.0) return std::numbers::pi;
  return detail::g_unchecked(w * (2.0 * d + w - 2.0) / (2.0 * d)) +
         0.25 * (d + w) * std::sqrt(w * (2.0 * d + w)) * detail::g_unchecked((2.0 - w) / d);
}

inline double f_prime(double w, double d) {
  detail::require(w > 0.0 && w < 2.0 && d >= 1.0, "f_prime: need w in (0,2), d >= 1");
  const double x = w, y = d;
  return detail::g_unchecked((2.0 - x) / y) * (2.0 * x * x + 4.0 * x * y + y * y) / (4.0 * std::sqrt(x * (x + 2.0 * y))) +
         (x + y - 2.0) * std::sqrt(x * (2.0 - x) * (x + 2.0 * y - 2.0) * (x + 2.0 * y)) / (2.0 * y * y);
}

inline std::tuple<double, double, double> t_terms(double w, double d) {
  detail::require(w > 0.0 && w < 2.0 && d >= 1.0, "t_terms: need w in (0,2), d >= 1");
  const double x = w, y = d;
  // numerator of T1, Horner in x
  const double a4 = -3.0;
  const double a3 = -2.0 * (6.0 * y - 7.0);
  const double a2 = -2.0 * (7.0 * y * y - 21.0 * y + 10.0);
  const double a1 = -4.0 * (((y - 8.0) * y + 10.0) * y - 2.0);
  const double a0 = 4.0 * y * ((y - 3.0) * y + 2.0);
  const double num = (((a4 * x + a3) * x + a2) * x + a1) * x + a0;
  const double t1 = num / (2.0 * y * y * std::sqrt((2.0 - x) * x * (x + 2.0 * y - 2.0) * (x + 2.0 * y)));
  const double t2 = -std::sqrt((2.0 - x) * (x + 2.0 * y - 2.0)) * (2.0 * x * x + 4.0 * x * y + y * y) /
                    (2.0 * y * y * std::sqrt(x * (x + 2.0 * y)));
  const double xx = x * (x + 2.0 * y);
  const double t3 = (x + y) * (2.0 * x * x + 4.0 * x * y - y * y) / (4.0 * xx * std::sqrt(xx)) *
                    detail::g_unchecked((2.0 - x) / y);
  return {t1, t2, t3};
}

inline double f_double_prime(double w, double d) {
  detail::require(w > 0.0 && w < 2.0 && d >= 1.0, "f_double_prime: need w in (0,2), d >= 1");
  const auto [t1, t2, t3] = t_terms(w, d);
  return t1 + t2 + t3;
}

// lim_{d->inf} f(w,d)
inline double f_limit_inf(double w) {
  detail::require(w >= 0.0 && w <= 2.0, "f_limit_inf: w outside [0,2]");
  return (w + 1.0) * std::sqrt((2.0 - w) * w) / 3.0 + std::acos(1.0 - w);
}

} // namespace cbcast
