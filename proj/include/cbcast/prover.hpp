#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbcast/expressions.hpp"
#include "cbcast/interval.hpp"

namespace cbcast {

enum class Relation { le, ge, lt, gt };

inline constexpr std::string_view to_string(Relation r) {
  switch (r) {
  case Relation::le: return "<=";
  case Relation::ge: return ">=";
  case Relation::lt: return "<";
  case Relation::gt: return ">";
  }
  return "?";
}

// Weighted tasks prove  w(x)·(expr − bound) rel 0  with the weight folded into the
// expression: the task's expression is already the weighted safe form.
enum class Weight { none, x32, sqrt_2mx };

inline constexpr std::string_view to_string(Weight w) {
  switch (w) {
  case Weight::none: return "none";
  case Weight::x32: return "x^(3/2)";
  case Weight::sqrt_2mx: return "sqrt(2-x)";
  }
  return "?";
}

struct ProofTask {
  std::string name;
  Expression expression = Expression::g;
  Box domain{{0.0, 2.0}, {0.0, 1.0}};
  double bound = 0.0;
  Relation relation = Relation::le;
  Weight weight = Weight::none;
  int max_depth = 64;
  std::uint64_t max_boxes = std::uint64_t{1} << 24;
};

enum class Verdict { proved, exhausted, refuted };

inline constexpr std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::proved: return "proved";
  case Verdict::exhausted: return "exhausted";
  case Verdict::refuted: return "refuted";
  }
  return "?";
}

struct Leaf {
  Box box;
  Interval enclosure;
  int depth = 0;
};

struct ProofResult {
  Verdict verdict = Verdict::exhausted;
  std::uint64_t boxes_processed = 0;
  int deepest_level = 0;
  std::optional<Box> witness;
  std::optional<std::pair<double, double>> witness_point;
  double witness_value = 0.0;
  std::vector<Leaf> leaves;
  std::uint64_t leaf_count = 0;
  bool leaves_elided = false;
  std::uint64_t clip_events = 0;
};

inline constexpr std::size_t max_recorded_leaves = 10000;

namespace detail {

inline Interval weight_enclosure(Weight w, const Interval& x) {
  switch (w) {
  case Weight::none: return Interval(1.0);
  case Weight::x32: return pow32(x);
  case Weight::sqrt_2mx: return sqrt(Interval(2.0) - x);
  }
  return Interval(1.0);
}

inline double weight_value(Weight w, double x) {
  switch (w) {
  case Weight::none: return 1.0;
  case Weight::x32: return x * std::sqrt(x);
  case Weight::sqrt_2mx: return std::sqrt(2.0 - x);
  }
  return 1.0;
}

// Enclosure of the quantity compared against the task's right-hand side.
inline Interval task_enclosure(const ProofTask& t, const Box& b) {
  const Interval e = interval_eval(t.expression, b);
  if (t.weight == Weight::none) return e;
  return e - Interval(t.bound) * weight_enclosure(t.weight, b.x);
}

inline double task_rhs(const ProofTask& t) { return t.weight == Weight::none ? t.bound : 0.0; }

inline bool certifies(Relation r, const Interval& e, double c) {
  switch (r) {
  case Relation::le: return e.hi <= c;
  case Relation::lt: return e.hi < c;
  case Relation::ge: return e.lo >= c;
  case Relation::gt: return e.lo > c;
  }
  return false;
}

inline bool violates(Relation r, const Interval& e, double c) {
  switch (r) {
  case Relation::le: return e.lo > c;
  case Relation::lt: return e.lo >= c;
  case Relation::ge: return e.hi < c;
  case Relation::gt: return e.hi <= c;
  }
  return false;
}

inline bool holds(Relation r, double v, double c) {
  switch (r) {
  case Relation::le: return v <= c;
  case Relation::lt: return v < c;
  case Relation::ge: return v >= c;
  case Relation::gt: return v > c;
  }
  return false;
}

inline std::pair<Box, Box> split(const Box& b, const Box& domain) {
  const double dx = domain.x.width(), dz = domain.z.width();
  const double rx = dx > 0.0 ? b.x.width() / dx : 0.0;
  const double rz = dz > 0.0 ? b.z.width() / dz : 0.0;
  if (rx >= rz) {
    const double m = b.x.mid();
    return {{{b.x.lo, m}, b.z}, {{m, b.x.hi}, b.z}};
  }
  const double m = b.z.mid();
  return {{b.x, {b.z.lo, m}}, {b.x, {m, b.z.hi}}};
}

inline bool splittable(const Box& b) {
  return b.x.mid() > b.x.lo && b.x.mid() < b.x.hi ? true : (b.z.mid() > b.z.lo && b.z.mid() < b.z.hi);
}

// Rigorous refutation at the box midpoint: both the plain value and the point
// enclosure must violate the relation.
inline bool try_refute(const ProofTask& t, const Box& b, ProofResult& res) {
  const double x = b.x.mid(), z = b.z.mid();
  const Box pt{{x, x}, {z, z}};
  if (!in_domain(t.expression, pt)) return false;
  const Interval e = task_enclosure(t, pt);
  const double c = task_rhs(t);
  if (!violates(t.relation, e, c)) return false;
  const double v = point_eval(t.expression, x, z) - (t.weight == Weight::none ? 0.0 : t.bound * weight_value(t.weight, x));
  if (holds(t.relation, v, c)) return false;
  res.verdict = Verdict::refuted;
  res.witness = b;
  res.witness_point = std::make_pair(x, z);
  res.witness_value = t.weight == Weight::none ? v : v / weight_value(t.weight, x) + t.bound;
  return true;
}

} // namespace detail

// Depth-first adaptive bisection.
inline ProofResult prove_inequality(const ProofTask& task) {
  if (task.max_depth < 1) throw std::invalid_argument("prove_inequality: max_depth must be >= 1");
  if (!in_domain(task.expression, task.domain))
    throw std::domain_error("prove_inequality: task domain outside the expression's domain");
  ProofResult res;
  const std::uint64_t clips0 = clip_events();
  const double c = detail::task_rhs(task);
  std::vector<std::pair<Box, int>> stack{{task.domain, 0}};
  bool all_certified = true;
  while (!stack.empty()) {
    if (res.boxes_processed >= task.max_boxes) {
      res.verdict = Verdict::exhausted;
      res.witness = stack.back().first;
      all_certified = false;
      break;
    }
    auto [box, depth] = stack.back();
    stack.pop_back();
    ++res.boxes_processed;
    res.deepest_level = std::max(res.deepest_level, depth);
    const Interval e = detail::task_enclosure(task, box);
    if (e.is_valid() && detail::certifies(task.relation, e, c)) {
      ++res.leaf_count;
      if (res.leaves.size() < max_recorded_leaves) res.leaves.push_back({box, e, depth});
      else res.leaves_elided = true;
      continue;
    }
    if (e.is_valid() && detail::violates(task.relation, e, c) && detail::try_refute(task, box, res)) {
      all_certified = false;
      break;
    }
    if (depth >= task.max_depth || !detail::splittable(box)) {
      if (detail::try_refute(task, box, res)) {
        all_certified = false;
        break;
      }
      res.verdict = Verdict::exhausted;
      res.witness = box;
      all_certified = false;
      break;
    }
    auto [a, b] = detail::split(box, task.domain);
    stack.push_back({b, depth + 1});
    stack.push_back({a, depth + 1});
  }
  if (all_certified) res.verdict = Verdict::proved;
  if (res.leaves_elided) res.leaves.clear();
  res.clip_events = clip_events() - clips0;
  return res;
}

struct SuiteEntry {
  std::string name;
  std::string statement;
  ProofTask task;
  ProofResult result;
};

// Outward-rounded decimal endpoints: [lo, hi] covers the real interval they name.
inline double below(double v) { return std::nextafter(v, -rounding::inf); }
inline double above(double v) { return std::nextafter(v, rounding::inf); }

// Doubles bracketing p/q: proving expr <= at_most(p,q) implies expr <= p/q.
inline double at_most(double p, double q) { return rounding::div_down(p, q); }
inline double at_least(double p, double q) { return rounding::div_up(p, q); }

inline std::vector<SuiteEntry> inequality_tasks(std::uint64_t max_boxes = std::uint64_t{1} << 24) {
  const Interval full_x{0.0, 2.0};
  const Interval full_z{0.0, 1.0};
  const Interval middle{below(0.01), above(1.99)};
  const Interval left{0.0, above(0.01)};
  const Interval right{below(1.99), 2.0};
  auto task = [&](std::string name, std::string statement, Expression e, Box dom, Relation r, double bound,
                  Weight w = Weight::none) {
    ProofTask t;
    t.name = name;
    t.expression = e;
    t.domain = dom;
    t.relation = r;
    t.bound = bound;
    t.weight = w;
    t.max_boxes = max_boxes;
    return SuiteEntry{std::move(name), std::move(statement), t, {}};
  };
  std::vector<SuiteEntry> s;
  s.push_back(task("f_prime_positive", "f'(x,y) > 0 for x in [1/100, 2-1/100], y >= 1", Expression::f_prime,
                   {middle, full_z}, Relation::gt, 0.0));
  s.push_back(task("f_over_sqrt_lower", "f(x,y) > sqrt(x) for x in (0,2], y >= 1", Expression::f_over_sqrt_x,
                   {full_x, full_z}, Relation::gt, 1.0));
  s.push_back(task("f_over_sqrt_upper", "f(x,y) < (7/3) sqrt(x) for x in (0,2], y >= 1", Expression::f_over_sqrt_x,
                   {full_x, full_z}, Relation::lt, at_most(7.0, 3.0)));
  s.push_back(task("f_over_sqrt_far", "f(x,y) > (3/2) sqrt(x) for x in (0,2], y >= 2", Expression::f_over_sqrt_x,
                   {full_x, {0.0, 0.5}}, Relation::gt, 1.5));
  s.push_back(task("f_ratio_half", "f(x,y)/f(x/2,y) > 7/5 for x in (0,2], y >= 1", Expression::f_ratio_half,
                   {full_x, full_z}, Relation::gt, at_least(7.0, 5.0)));
  s.push_back(task("t1_lower", "T1(x,y) sqrt(x(2-x)) >= -2", Expression::t1_weighted, {full_x, full_z}, Relation::ge, -2.0));
  s.push_back(task("t1_upper", "T1(x,y) sqrt(x(2-x)) <= 2", Expression::t1_weighted, {full_x, full_z}, Relation::le, 2.0));
  s.push_back(task("t2_lower", "T2(x,y) sqrt(x) >= -3", Expression::t2_weighted, {full_x, full_z}, Relation::ge, -3.0));
  s.push_back(task("t2_upper", "T2(x,y) sqrt(x) <= 0", Expression::t2_weighted, {full_x, full_z}, Relation::le, 0.0));
  s.push_back(task("t3_lower", "T3(x,y) x^(3/2) >= -1", Expression::t3_weighted, {full_x, full_z}, Relation::ge, -1.0));
  s.push_back(task("t3_upper", "T3(x,y) x^(3/2) <= 1", Expression::t3_weighted, {full_x, full_z}, Relation::le, 1.0));
  s.push_back(task("t3_collar", "T3(x,y) x^(3/2) <= -1/5 for x in (0, 1/100]", Expression::t3_weighted, {left, full_z},
                   Relation::le, at_most(-1.0, 5.0)));
  s.push_back(task("g_lower", "g(x)/x^(3/2) >= 1 for x in (0,2]", Expression::g_over_x32, {full_x, {0.0, 0.0}},
                   Relation::ge, 1.0));
  s.push_back(task("g_upper", "g(x)/x^(3/2) <= 2 for x in (0,2]", Expression::g_over_x32, {full_x, {0.0, 0.0}},
                   Relation::le, 2.0));
  s.push_back(task("fpp_middle", "f''(x,y) <= -1/8 for x in [1/100, 2-1/100]", Expression::f_double_prime,
                   {middle, full_z}, Relation::le, -0.125));
  s.push_back(task("fpp_middle_quarter", "f''(x,y) < -1/4 for x in [1/100, 2-1/100]", Expression::f_double_prime,
                   {middle, full_z}, Relation::lt, -0.25));
  s.push_back(task("fpp_left_collar", "f''(x,y) <= -199 for x in (0, 1/100]", Expression::fpp_x32, {left, full_z},
                   Relation::le, -199.0, Weight::x32));
  s.push_back(task("fpp_right_collar", "f''(x,y) <= -7/5 for x in [2-1/100, 2)", Expression::fpp_sqrt_2mx,
                   {right, full_z}, Relation::le, at_most(-7.0, 5.0), Weight::sqrt_2mx));
  return s;
}

inline std::vector<SuiteEntry> inequality_suite(std::uint64_t max_boxes = std::uint64_t{1} << 24) {
  auto s = inequality_tasks(max_boxes);
  for (auto& e : s) e.result = prove_inequality(e.task);
  return s;
}

} // namespace cbcast
