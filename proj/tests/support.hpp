#pragma once

#include <cmath>
#include <cstdint>

#include "cbcast/geometry.hpp"
#include "cbcast/rng.hpp"

namespace cbtest {

// Hand-rolled generators over the library's counter RNG.
struct Gen {
  cbcast::Counter64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform() { return rng.uniform(); }
  double uniform(double a, double b) { return a + (b - a) * rng.uniform(); }
  std::uint64_t below(std::uint64_t n) { return rng() % n; }
  cbcast::Point2 point_in_square(double h) { return {uniform(-h, h), uniform(-h, h)}; }
  cbcast::Point2 point_in_disk(double r) {
    const double rr = r * std::sqrt(uniform()), a = uniform(0.0, 2.0 * M_PI);
    return {rr * std::cos(a), rr * std::sin(a)};
  }
  // d in [1, inf) drawn through z = 1/d uniform in (0, 1]
  double distance_ge1() { return 1.0 / uniform(1e-6, 1.0); }
};

inline bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b)); }

} // namespace cbtest
