#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cbcast/bounds.hpp"
#include "cbcast/nodefield.hpp"
#include "cbcast/rng.hpp"
#include "cbcast/signal.hpp"

namespace cbcast {

enum class Schedule { flood, expanding_disk };
enum class PhaseRule { none, random, center_sync };

inline constexpr std::string_view to_string(Schedule s) { return s == Schedule::flood ? "flood" : "expanding_disk"; }

inline constexpr std::string_view to_string(PhaseRule r) {
  switch (r) {
  case PhaseRule::none: return "none";
  case PhaseRule::random: return "random";
  case PhaseRule::center_sync: return "center_sync";
  }
  return "?";
}

struct BroadcastConfig {
  Model model = Model::SNR;
  Schedule schedule = Schedule::flood;
  std::vector<double> radius_schedule;
  SignalParams params;
  PhaseRule phase_rule = PhaseRule::none;
  std::uint64_t phase_seed = 0;
};

struct RoundRecord {
  std::size_t round_index = 0;
  std::vector<std::size_t> newly_informed;
  double frontier_radius = 0.0;
  std::size_t senders_active = 0;
  std::optional<double> disk_radius_r_j;
  double travel_distance = 0.0;
};

struct RoundLog {
  std::vector<RoundRecord> rounds;
  std::size_t total_rounds = 0;
  bool fully_informed = false;
  double propagation_time = 0.0;
  bool cap_hit = false;
  std::size_t bootstrap_rounds = 0;
  std::size_t main_rounds = 0;
  bool bootstrap_failed = false;
};

// Smallest distance from the origin among nodes never informed; infinity if none.
inline double coverage_radius(const NodeField& field, const RoundLog& log, std::size_t after_rounds) {
  std::vector<char> informed(field.size(), 0);
  informed[0] = 1;
  for (std::size_t k = 0; k < std::min(after_rounds, log.rounds.size()); ++k)
    for (auto i : log.rounds[k].newly_informed) informed[i] = 1;
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!informed[i]) r = std::min(r, norm(field.positions[i]));
  return r;
}

namespace detail {

inline double frontier(const NodeField& field, const std::vector<char>& informed) {
  double r = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (informed[i]) r = std::max(r, norm(field.positions[i]));
  return r;
}

inline void finish(const NodeField& field, const std::vector<char>& informed, RoundLog& log) {
  while (!log.rounds.empty() && log.rounds.back().newly_informed.empty()) log.rounds.pop_back();
  log.total_rounds = log.rounds.size();
  log.propagation_time = 0.0;
  for (const auto& r : log.rounds) log.propagation_time += r.travel_distance;
  log.fully_informed = std::all_of(informed.begin(), informed.end(), [](char c) { return c != 0; });
  (void)field;
}

// One synchronous round's reception test against a fixed transmitting set. Cell
// bounds decide most receivers; ambiguous ones fall back to the exact pairwise sum
// over senders in index order.
class RoundEvaluator {
public:
  static constexpr double slack = 1e-9;

  RoundEvaluator(const NodeField& field, std::vector<std::size_t> senders, std::vector<double> phases, Model model,
                 const SignalParams& params)
      : field_(field), ids_(std::move(senders)), phases_(std::move(phases)), model_(model), p_(params) {
    if (ids_.empty()) return;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (auto i : ids_) {
      const auto& q = field.positions[i];
      x0 = std::min(x0, q.x);
      x1 = std::max(x1, q.x);
      y0 = std::min(y0, q.y);
      y1 = std::max(y1, q.y);
    }
    const double ext = std::max(x1 - x0, y1 - y0);
    h_ = model_ == Model::UDG ? 1.0 : std::max(1.0, ext / 40.0);
    nx_ = static_cast<long>((x1 - x0) / h_) + 1;
    ny_ = static_cast<long>((y1 - y0) / h_) + 1;
    ox_ = x0;
    oy_ = y0;
    grid_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t j = 0; j < ids_.size(); ++j) {
      const auto& q = field.positions[ids_[j]];
      auto& c = grid_[cell_of(q)];
      if (c.members.empty()) c.x0 = c.x1 = q.x, c.y0 = c.y1 = q.y;
      c.x0 = std::min(c.x0, q.x);
      c.x1 = std::max(c.x1, q.x);
      c.y0 = std::min(c.y0, q.y);
      c.y1 = std::max(c.y1, q.y);
      c.members.push_back(j);
    }
    const double a = p_.amplitude_default;
    for (auto& c : grid_)
      if (!c.members.empty()) {
        c.amp = a * static_cast<double>(c.members.size());
        c.amp2 = a * a * static_cast<double>(c.members.size());
        cells_.push_back(&c);
      }
  }

  std::size_t size() const { return ids_.size(); }

  bool triggered(Point2 q) const {
    if (ids_.empty()) return false;
    switch (model_) {
    case Model::UDG: return udg(q);
    case Model::SNR: return snr(q);
    case Model::MIMO: return mimo(q);
    }
    return false;
  }

  double nearest(Point2 q) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Cell* c : cells_) {
      if (box_min(*c, q) >= best) continue;
      for (auto j : c->members) best = std::min(best, dist(field_.positions[ids_[j]], q));
    }
    return best;
  }

  double exact_snr(Point2 q) const {
    return snr_energy_sum(ids_.size(), [&](std::size_t j) { return sender(j); }, q, p_);
  }
  double exact_mimo(Point2 q) const {
    return phasor_sum(ids_.size(), [&](std::size_t j) { return sender(j); }, q, p_).energy();
  }

private:
  struct Cell {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double amp = 0, amp2 = 0;
    std::vector<std::size_t> members;
  };

  Sender sender(std::size_t j) const { return {field_.positions[ids_[j]], p_.amplitude_default, phases_[j]}; }

  std::size_t cell_of(Point2 q) const {
    const long cx = std::min(nx_ - 1, static_cast<long>((q.x - ox_) / h_));
    const long cy = std::min(ny_ - 1, static_cast<long>((q.y - oy_) / h_));
    return static_cast<std::size_t>(cy * nx_ + cx);
  }

  static double box_min(const Cell& c, Point2 q) {
    const double dx = std::max({c.x0 - q.x, 0.0, q.x - c.x1});
    const double dy = std::max({c.y0 - q.y, 0.0, q.y - c.y1});
    return std::sqrt(dx * dx + dy * dy);
  }
  static double box_max(const Cell& c, Point2 q) {
    const double dx = std::max(std::fabs(q.x - c.x0), std::fabs(q.x - c.x1));
    const double dy = std::max(std::fabs(q.y - c.y0), std::fabs(q.y - c.y1));
    return std::sqrt(dx * dx + dy * dy);
  }

  bool udg(Point2 q) const {
    const long cx0 = std::max(0L, static_cast<long>(std::floor((q.x - 1.0 - ox_) / h_)));
    const long cx1 = std::min(nx_ - 1, static_cast<long>(std::floor((q.x + 1.0 - ox_) / h_)));
    const long cy0 = std::max(0L, static_cast<long>(std::floor((q.y - 1.0 - oy_) / h_)));
    const long cy1 = std::min(ny_ - 1, static_cast<long>(std::floor((q.y + 1.0 - oy_) / h_)));
    for (long cy = cy0; cy <= cy1; ++cy)
      for (long cx = cx0; cx <= cx1; ++cx)
        for (auto j : grid_[static_cast<std::size_t>(cy * nx_ + cx)].members)
          if (udg_triggered(field_.positions[ids_[j]], q)) return true;
    return false;
  }

  bool snr(Point2 q) const {
    const double cl = p_.clamp();
    double lo = 0.0, hi = 0.0;
    for (const Cell* c : cells_) {
      const double dmin = std::max(box_min(*c, q), cl), dmax = std::max(box_max(*c, q), cl);
      lo += c->amp2 / (dmax * dmax);
      hi += c->amp2 / (dmin * dmin);
    }
    const double thr = p_.beta_N0;
    if (lo >= thr * (1.0 + slack)) return true;
    if (hi < thr * (1.0 - slack)) return false;
    return exact_snr(q) >= thr;
  }

  bool mimo(Point2 q) const {
    const double cl = p_.clamp();
    double hi = 0.0;
    for (const Cell* c : cells_) hi += c->amp / std::max(box_min(*c, q), cl);
    if (hi * hi < p_.beta_N0 * (1.0 - slack)) return false;
    return exact_mimo(q) >= p_.beta_N0;
  }

  const NodeField& field_;
  std::vector<std::size_t> ids_;
  std::vector<double> phases_;
  Model model_;
  SignalParams p_;
  double h_ = 1.0, ox_ = 0.0, oy_ = 0.0;
  long nx_ = 0, ny_ = 0;
  std::vector<Cell> grid_;
  std::vector<const Cell*> cells_;
};

inline double phase_for(PhaseRule rule, const NodeField& field, std::size_t node, std::size_t round, std::uint64_t seed,
                        const SignalParams& p) {
  switch (rule) {
  case PhaseRule::none: return 0.0;
  case PhaseRule::random: return 2.0 * std::numbers::pi * Counter64::stream(seed, round, node).uniform();
  case PhaseRule::center_sync: return -2.0 * std::numbers::pi * norm(field.positions[node]) / p.lambda;
  }
  return 0.0;
}

// Rounds where informed nodes within radius(k) transmit (all informed if nullopt).
// `radius` returns {radius, schedule_exhausted}.
template <class RadiusFn>
void run_phase(const NodeField& field, Model model, const SignalParams& params, PhaseRule rule, std::uint64_t seed,
               std::vector<char>& informed, RoundLog& log, std::size_t cap, double R, RadiusFn&& radius) {
  std::size_t since_productive = 0;
  for (std::size_t k = 1;; ++k) {
    if (std::all_of(informed.begin(), informed.end(), [](char c) { return c != 0; })) return;
    if (log.rounds.size() >= cap) {
      log.cap_hit = true;
      return;
    }
    const auto [r, exhausted] = radius(k);
    std::vector<std::size_t> senders;
    std::vector<double> phases;
    const std::size_t round_index = log.rounds.size() + 1;
    for (std::size_t i = 0; i < field.size(); ++i)
      if (informed[i] && (!r || norm(field.positions[i]) <= *r)) {
        senders.push_back(i);
        phases.push_back(phase_for(rule, field, i, round_index, seed, params));
      }
    RoundEvaluator ev(field, senders, phases, model, params);
    RoundRecord rec;
    rec.round_index = round_index;
    rec.senders_active = senders.size();
    rec.disk_radius_r_j = r;
    for (std::size_t i = 0; i < field.size(); ++i)
      if (!informed[i] && ev.triggered(field.positions[i])) rec.newly_informed.push_back(i);
    for (auto i : rec.newly_informed) {
      informed[i] = 1;
      rec.travel_distance = std::max(rec.travel_distance, ev.nearest(field.positions[i]));
    }
    rec.frontier_radius = frontier(field, informed);
    const bool productive = !rec.newly_informed.empty();
    log.rounds.push_back(std::move(rec));
    since_productive = productive ? 0 : since_productive + 1;
    if (!productive && (exhausted || !r || *r >= R)) return;
  }
}

} // namespace detail

// Synchronous BFS on the unit-disk graph restricted to nodes with |v| <= limit.
inline RoundLog run_udg_flood_within(const NodeField& field, double limit, std::vector<char>& informed) {
  RoundLog log;
  if (field.size() == 0) throw std::invalid_argument("run_udg_flood: empty field");
  GridIndex idx(field.positions, 1.0);
  std::vector<std::size_t> layer;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (informed[i]) layer.push_back(i);
  std::size_t informed_count = layer.size();
  while (!layer.empty()) {
    RoundRecord rec;
    rec.round_index = log.rounds.size() + 1;
    rec.senders_active = informed_count;
    std::vector<double> best(field.size(), std::numeric_limits<double>::infinity());
    for (auto s : layer)
      idx.for_each_within(field.positions[s], 1.0, [&](std::size_t k) {
        if (informed[k] || norm(field.positions[k]) > limit) return;
        if (best[k] == std::numeric_limits<double>::infinity()) rec.newly_informed.push_back(k);
        best[k] = std::min(best[k], dist(field.positions[s], field.positions[k]));
      });
    std::sort(rec.newly_informed.begin(), rec.newly_informed.end());
    for (auto k : rec.newly_informed) {
      informed[k] = 1;
      rec.travel_distance = std::max(rec.travel_distance, best[k]);
    }
    informed_count += rec.newly_informed.size();
    rec.frontier_radius = detail::frontier(field, informed);
    layer = rec.newly_informed;
    if (!layer.empty()) log.rounds.push_back(std::move(rec));
  }
  detail::finish(field, informed, log);
  return log;
}

inline RoundLog run_udg_flood(const NodeField& field) {
  std::vector<char> informed(field.size(), 0);
  if (!informed.empty()) informed[0] = 1;
  return run_udg_flood_within(field, std::numeric_limits<double>::infinity(), informed);
}

// Greedy corridor routing: each hop picks, among nodes of the forward sector (annulus
// [1/2, 1], within 30 degrees of the line direction) that stay in the width-2
// corridor, the one closest to the line, then the farthest along it.
inline std::vector<std::size_t> sector_route(const NodeField& field, std::size_t from, std::size_t to) {
  if (from >= field.size() || to >= field.size()) throw std::out_of_range("sector_route: node index");
  if (from == to) return {from};
  const Point2 a = field.positions[from], b = field.positions[to];
  const double L = dist(a, b);
  const Point2 u{(b.x - a.x) / L, (b.y - a.y) / L};
  const Point2 nrm{-u.y, u.x};
  const double cos30 = std::sqrt(3.0) / 2.0;
  GridIndex idx(field.positions, 1.0);
  std::vector<std::size_t> path{from};
  std::size_t c = from;
  const auto max_hops = static_cast<std::size_t>(4.0 * L) + 2;
  while (path.size() <= max_hops) {
    const Point2 pc = field.positions[c];
    if (dist2(pc, b) <= 1.0) {
      path.push_back(to);
      return path;
    }
    std::optional<std::size_t> best;
    double best_off = 0.0, best_along = 0.0;
    idx.for_each_within(pc, 1.0, [&](std::size_t k) {
      const Point2 d = field.positions[k] - pc;
      const double r = norm(d);
      if (k == c || r < sector_inner_radius) return;
      const double along = d.x * u.x + d.y * u.y;
      if (along < r * cos30) return;
      const Point2 w = field.positions[k] - a;
      const double off = std::fabs(w.x * nrm.x + w.y * nrm.y);
      if (off > 1.0) return;
      if (!best || off < best_off || (off == best_off && (along > best_along || (along == best_along && k < *best)))) {
        best = k;
        best_off = off;
        best_along = along;
      }
    });
    if (!best) return {};
    c = *best;
    path.push_back(c);
  }
  return {};
}

inline std::vector<std::size_t> all_informed_indices(const std::vector<char>& informed) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < informed.size(); ++i)
    if (informed[i]) v.push_back(i);
  return v;
}

// Round 1 is v0 alone; round k >= 2 uses r_{k-1}, repeating the last radius once the
// schedule runs out.
inline RoundLog run_expanding_disk(const NodeField& field, const BroadcastConfig& config) {
  if (config.schedule != Schedule::expanding_disk) throw std::invalid_argument("run_expanding_disk: schedule must be expanding_disk");
  const auto& s = config.radius_schedule;
  if (s.empty() || !std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
    throw std::invalid_argument("run_expanding_disk: radius_schedule must be nonempty and increasing");
  config.params.validate();
  std::vector<char> informed(field.size(), 0);
  informed[0] = 1;
  RoundLog log;
  const std::size_t cap = round_cap(field.size());
  detail::run_phase(field, config.model, config.params, config.phase_rule, config.phase_seed, informed, log, cap, field.R,
                    [&](std::size_t k) -> std::pair<std::optional<double>, bool> {
                      if (k == 1) return {0.0, false};
                      const std::size_t j = std::min(k - 2, s.size() - 1);
                      return {s[j], k - 2 >= s.size() - 1};
                    });
  detail::finish(field, informed, log);
  log.main_rounds = log.total_rounds;
  return log;
}

inline RoundLog run_flood(const NodeField& field, Model model, const SignalParams& params, PhaseRule rule,
                          std::uint64_t phase_seed = 0) {
  params.validate();
  std::vector<char> informed(field.size(), 0);
  informed[0] = 1;
  RoundLog log;
  detail::run_phase(field, model, params, rule, phase_seed, informed, log, round_cap(field.size()), field.R,
                    [](std::size_t) -> std::pair<std::optional<double>, bool> { return {std::nullopt, true}; });
  detail::finish(field, informed, log);
  log.main_rounds = log.total_rounds;
  return log;
}

struct MisoConstants {
  double c1 = 0.125;
  double c2 = 1.0;
};

// Phase 1: UDG flood inside radius 15 r_1. Phase 2: MIMO rounds with center_sync
// phases on r_{j+1} = (c1/15) rho lambda^{1/2} r_j^{3/2}.
inline RoundLog run_miso_broadcast(const NodeField& field, const SignalParams& params, const MisoConstants& k) {
  params.validate();
  if (!(k.c1 > 0.0) || !(k.c2 > 0.0)) throw std::invalid_argument("run_miso_broadcast: c1, c2 must be positive");
  const double r1 = k.c2 / params.lambda;
  const double boot = 15.0 * r1;
  std::vector<char> informed(field.size(), 0);
  informed[0] = 1;
  RoundLog log = run_udg_flood_within(field, boot, informed);
  log.bootstrap_rounds = log.total_rounds;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!informed[i] && norm(field.positions[i]) <= boot) log.bootstrap_failed = true;
  const auto sched = mimo_upper_schedule(density(field), params.lambda, k.c1 / 15.0, k.c2, field.R);
  const auto& s = sched.radii;
  RoundLog phase2;
  detail::run_phase(field, Model::MIMO, params, PhaseRule::center_sync, 0, informed, phase2, round_cap(field.size()),
                    field.R, [&](std::size_t kk) -> std::pair<std::optional<double>, bool> {
                      const std::size_t j = std::min(kk - 1, s.size() - 1);
                      return {s[j], kk - 1 >= s.size() - 1};
                    });
  while (!phase2.rounds.empty() && phase2.rounds.back().newly_informed.empty()) phase2.rounds.pop_back();
  for (auto& r : phase2.rounds) {
    r.round_index += log.bootstrap_rounds;
    log.rounds.push_back(std::move(r));
  }
  log.cap_hit = phase2.cap_hit;
  detail::finish(field, informed, log);
  log.main_rounds = log.total_rounds - log.bootstrap_rounds;
  return log;
}

struct TriggerCell {
  double r = 0.0;
  double d = 0.0;
  std::size_t trials = 0;
  std::size_t triggered = 0;

  double rate() const { return trials ? static_cast<double>(triggered) / static_cast<double>(trials) : 0.0; }
};

struct TriggerTestSpec {
  double rho = 0.0;
  SignalParams params;
  MisoConstants constants;
  std::vector<double> r_multiples{1.0, 4.0, 16.0};
  std::size_t receivers = 100;
  std::uint64_t seed = 1;
};

// Distances {15 r, c1 rho r^{3/2} lambda^{1/2} / 2, c1 rho r^{3/2} lambda^{1/2}}.
inline std::vector<double> trigger_distances(double rho, double lambda, double c1, double r) {
  const double top = c1 * rho * r * std::sqrt(r) * std::sqrt(lambda);
  return {15.0 * r, 0.5 * top, top};
}

// Senders: a field of round(pi rho r^2) nodes (v0 included) in D_r with center_sync
// phases; receivers at uniformly random angles on circles of radius d.
inline std::vector<TriggerCell> miso_trigger_test(const TriggerTestSpec& spec) {
  spec.params.validate();
  std::vector<TriggerCell> out;
  const double r1 = spec.constants.c2 / spec.params.lambda;
  for (std::size_t ri = 0; ri < spec.r_multiples.size(); ++ri) {
    const double r = spec.r_multiples[ri] * r1;
    const auto m = static_cast<std::size_t>(std::max(1.0, std::round(std::numbers::pi * spec.rho * r * r)));
    const NodeField f = sample_field(m, r, Counter64::stream(spec.seed, 0x7219, ri).key());
    std::vector<double> phases(m);
    for (std::size_t i = 0; i < m; ++i) phases[i] = -2.0 * std::numbers::pi * norm(f.positions[i]) / spec.params.lambda;
    auto get = [&](std::size_t j) { return Sender{f.positions[j], spec.params.amplitude_default, phases[j]}; };
    const auto ds = trigger_distances(spec.rho, spec.params.lambda, spec.constants.c1, r);
    for (std::size_t di = 0; di < ds.size(); ++di) {
      TriggerCell cell;
      cell.r = r;
      cell.d = ds[di];
      Counter64 rng = Counter64::stream(spec.seed, 0x7220 + ri, di);
      for (std::size_t t = 0; t < spec.receivers; ++t) {
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        const Point2 q{cell.d * std::cos(a), cell.d * std::sin(a)};
        ++cell.trials;
        if (phasor_sum(m, get, q, spec.params).energy() >= spec.params.beta_N0) ++cell.triggered;
      }
      out.push_back(cell);
    }
  }
  return out;
}

} // namespace cbcast
