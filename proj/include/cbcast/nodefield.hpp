#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cbcast/geometry.hpp"
#include "cbcast/rng.hpp"

namespace cbcast {

struct NodeField {
  std::vector<Point2> positions; // positions[0] is v0 at the origin
  double R = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return positions.size(); }
};

// Node i >= 1 uses counters 2(i-1) and 2(i-1)+1 of Counter64(seed):
// radius R sqrt(u), angle 2 pi v.
inline NodeField sample_field(std::size_t n, double R, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_field: n must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("sample_field: R must be positive");
  NodeField f;
  f.R = R;
  f.seed = seed;
  f.positions.resize(n);
  const Counter64 rng(seed);
  for (std::size_t i = 1; i < n; ++i) {
    const double u = rng.uniform_at(2 * (i - 1));
    const double v = rng.uniform_at(2 * (i - 1) + 1);
    const double r = R * std::sqrt(u);
    const double a = 2.0 * std::numbers::pi * v;
    f.positions[i] = {r * std::cos(a), r * std::sin(a)};
  }
  return f;
}

inline std::size_t count_within(const NodeField& field, double r) {
  std::size_t c = 0;
  const double r2 = r * r;
  for (const auto& p : field.positions)
    if (p.x * p.x + p.y * p.y <= r2) ++c;
  return c;
}

inline double density(const NodeField& field) {
  return static_cast<double>(field.size()) / (std::numbers::pi * field.R * field.R);
}

// R for n nodes at density rho.
inline double radius_for_density(std::size_t n, double rho) {
  return std::sqrt(static_cast<double>(n) / (std::numbers::pi * rho));
}

inline constexpr double sector_inner_radius = 0.5;
inline constexpr double sector_slack = 1e-12;

// Sector k in [0,6) holds directions in [60k, 60(k+1)) degrees and distances in the
// closed annulus [1/2, 1]; -1 if p is outside every sector.
inline int sector_of(Point2 center, Point2 p) {
  const Point2 d = p - center;
  const double r = norm(d);
  if (r < sector_inner_radius - sector_slack || r > 1.0 + sector_slack) return -1;
  double a = std::atan2(d.y, d.x);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  int k = static_cast<int>(a / (std::numbers::pi / 3.0));
  return k > 5 ? 5 : k;
}

inline std::array<bool, 6> sector_occupancy(const NodeField& field, Point2 center) {
  std::array<bool, 6> occ{};
  for (const auto& p : field.positions) {
    if (p == center) continue;
    const int k = sector_of(center, p);
    if (k >= 0) occ[static_cast<std::size_t>(k)] = true;
  }
  return occ;
}

// Uniform bucket grid over a point set; cells of side h.
class GridIndex {
public:
  GridIndex(const std::vector<Point2>& pts, const std::vector<std::size_t>& ids, double h) : pts_(&pts), h_(h) {
    if (!(h > 0.0)) throw std::invalid_argument("GridIndex: cell size must be positive");
    if (ids.empty()) return;
    double x0 = pts[ids[0]].x, x1 = x0, y0 = pts[ids[0]].y, y1 = y0;
    for (auto i : ids) {
      x0 = std::min(x0, pts[i].x);
      x1 = std::max(x1, pts[i].x);
      y0 = std::min(y0, pts[i].y);
      y1 = std::max(y1, pts[i].y);
    }
    ox_ = x0;
    oy_ = y0;
    nx_ = static_cast<long>((x1 - x0) / h) + 1;
    ny_ = static_cast<long>((y1 - y0) / h) + 1;
    start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    for (auto i : ids) ++start_[cell(pts[i]) + 1];
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    items_.resize(ids.size());
    auto fill = start_;
    for (auto i : ids) items_[fill[cell(pts[i])]++] = i; // ids order kept inside each cell
  }

  GridIndex(const std::vector<Point2>& pts, double h) : GridIndex(pts, all_ids(pts.size()), h) {}

  // Calls fn(id) for every indexed point within distance r of q.
  template <class Fn> void for_each_within(Point2 q, double r, Fn&& fn) const {
    if (items_.empty()) return;
    const double r2 = r * r;
    const long cx0 = std::max(0L, static_cast<long>(std::floor((q.x - r - ox_) / h_)));
    const long cx1 = std::min(nx_ - 1, static_cast<long>(std::floor((q.x + r - ox_) / h_)));
    const long cy0 = std::max(0L, static_cast<long>(std::floor((q.y - r - oy_) / h_)));
    const long cy1 = std::min(ny_ - 1, static_cast<long>(std::floor((q.y + r - oy_) / h_)));
    for (long cy = cy0; cy <= cy1; ++cy)
      for (long cx = cx0; cx <= cx1; ++cx) {
        const auto c = static_cast<std::size_t>(cy * nx_ + cx);
        for (auto k = start_[c]; k < start_[c + 1]; ++k) {
          const auto id = items_[k];
          if (dist2((*pts_)[id], q) <= r2) fn(id);
        }
      }
  }

  template <class Pred> bool any_within(Point2 q, double r, Pred&& pred) const {
    bool found = false;
    for_each_within(q, r, [&](std::size_t id) { found = found || pred(id); });
    return found;
  }

private:
  static std::vector<std::size_t> all_ids(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
  }

  std::size_t cell(Point2 p) const {
    const long cx = std::min(nx_ - 1, static_cast<long>((p.x - ox_) / h_));
    const long cy = std::min(ny_ - 1, static_cast<long>((p.y - oy_) / h_));
    return static_cast<std::size_t>(cy * nx_ + cx);
  }

  const std::vector<Point2>* pts_;
  double h_;
  double ox_ = 0.0, oy_ = 0.0;
  long nx_ = 0, ny_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

} // namespace cbcast
