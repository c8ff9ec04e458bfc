#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cbcast/signal.hpp"

namespace cbcast {

enum class Direction { upper, lower };

inline constexpr std::string_view to_string(Direction d) { return d == Direction::upper ? "upper" : "lower"; }

inline constexpr std::size_t rounds_infinite = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t schedule_max_len = 100000;

struct SchedulePrediction {
  Model model = Model::SNR;
  std::vector<double> radii;
  std::size_t predicted_rounds = rounds_infinite;
  Direction direction = Direction::upper;
  bool growth_ok = true; // MIMO: r_2 >= 15 r_1
};

namespace detail {

// Iterate r -> next(r) from r1 until r >= R; stops (infinite rounds) if the sequence
// stalls.
template <class Next> SchedulePrediction iterate_schedule(Model m, Direction dir, double r1, double R, Next&& next) {
  SchedulePrediction s;
  s.model = m;
  s.direction = dir;
  double r = r1;
  s.radii.push_back(r);
  while (r < R && s.radii.size() < schedule_max_len) {
    const double nr = next(r);
    if (!(nr > r) || !std::isfinite(nr)) return s;
    r = nr;
    s.radii.push_back(r);
  }
  if (r >= R) s.predicted_rounds = s.radii.size();
  return s;
}

} // namespace detail

// r_j = (rho/16)^{(j-1)/2}, r_1 = 1 unless overridden.
inline SchedulePrediction snr_upper_schedule(double rho, double R, std::optional<double> r1 = std::nullopt) {
  if (!(rho > 16.0)) throw std::invalid_argument("snr_upper_schedule: need rho > 16");
  const double q = std::sqrt(rho / 16.0);
  const double start = r1.value_or(1.0);
  SchedulePrediction s;
  s.model = Model::SNR;
  s.direction = Direction::upper;
  for (std::size_t j = 0; j < schedule_max_len; ++j) {
    const double r = start * std::pow(q, static_cast<double>(j));
    s.radii.push_back(r);
    if (r >= R) break;
  }
  s.predicted_rounds = s.radii.back() >= R ? s.radii.size() : rounds_infinite;
  return s;
}

inline double snr_lower_radius(double rho, double r) { return 4.0 * std::sqrt(rho) * r; }

inline double mimo_lower_radius(double rho, double r) { return 4.0 * std::numbers::pi * rho * r * r; }

inline SchedulePrediction snr_lower_schedule(double rho, double R, double r1 = 1.0) {
  return detail::iterate_schedule(Model::SNR, Direction::lower, r1, R, [&](double r) { return snr_lower_radius(rho, r); });
}

// r_1 = sqrt((k/(pi rho)) ln n) for the sparse case
inline double snr_sparse_r1(double k, double rho, double n) { return std::sqrt(k / (std::numbers::pi * rho) * std::log(n)); }

inline SchedulePrediction mimo_lower_schedule(double rho, double R, double r0) {
  return detail::iterate_schedule(Model::MIMO, Direction::lower, r0, R, [&](double r) { return mimo_lower_radius(rho, r); });
}

// r_1 = c2/lambda, r_{j+1} = c1 rho lambda^{1/2} r_j^{3/2}
inline SchedulePrediction mimo_upper_schedule(double rho, double lambda, double c1, double c2, double R) {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(lambda > 0.0) || !(rho > 0.0))
    throw std::invalid_argument("mimo_upper_schedule: need c1, c2, lambda, rho > 0");
  const double K = c1 * rho * std::sqrt(lambda);
  auto next = [&](double r) { return K * r * std::sqrt(r); };
  auto s = detail::iterate_schedule(Model::MIMO, Direction::upper, c2 / lambda, R, next);
  s.growth_ok = next(s.radii.front()) >= 15.0 * s.radii.front();
  return s;
}

// r_j = r_1^{(3/2)^{j-1}} K^{2((3/2)^{j-1}) - 2}, j >= 1
inline double mimo_closed_form(double r1, double K, std::size_t j) {
  const double e = std::pow(1.5, static_cast<double>(j) - 1.0);
  return std::pow(r1, e) * std::pow(K, 2.0 * e - 2.0);
}

inline double propagation_time(const std::vector<double>& radii) {
  double t = 0.0;
  for (double r : radii) t += r;
  return t;
}

// r'_p = R, r'_{j-1} = r'_j / sqrt(rho/16), down to the first value <= 1; increasing order.
inline std::vector<double> reverse_snr_schedule(double rho, double R) {
  if (!(rho > 16.0)) throw std::invalid_argument("reverse_snr_schedule: need rho > 16");
  if (!(R > 0.0)) throw std::invalid_argument("reverse_snr_schedule: need R > 0");
  const double q = std::sqrt(rho / 16.0);
  std::vector<double> down{R};
  while (down.back() > 1.0 && down.size() < schedule_max_len) down.push_back(down.back() / q);
  return {down.rbegin(), down.rend()};
}

// Broadcast round cap 10 ceil(log2 log2 n) + 100.
inline std::size_t round_cap(std::size_t n) {
  if (n < 4) return 100;
  return 10 * static_cast<std::size_t>(std::ceil(std::log2(std::log2(static_cast<double>(n))))) + 100;
}

} // namespace cbcast
