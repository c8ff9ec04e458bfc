// Acceptance criteria 1-10. One PASS/FAIL line per criterion.
//   acceptance [--only 3,7] [--expect-red 8]
// Exit 0 when every failing criterion is listed in --expect-red, 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "cbcast/bounds.hpp"
#include "cbcast/broadcast.hpp"
#include "cbcast/experiment.hpp"
#include "cbcast/expressions.hpp"
#include "cbcast/geometry.hpp"
#include "cbcast/prover.hpp"
#include "cbcast/signal.hpp"
#include "support.hpp"

using namespace cbcast;
using cbtest::Gen;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... a) {
  char buf[2048];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

Outcome c1_equivalence() {
  Gen g(101);
  const SignalParams p;
  std::size_t bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const Sender s{g.point_in_square(10), 1.0, g.uniform(0, 2 * pi)};
    const double r = g.uniform(0, 2), a = g.uniform(0, 2 * pi);
    const Point2 q{s.position.x + r * std::cos(a), s.position.y + r * std::sin(a)};
    const bool u = udg_triggered(s.position, q);
    bad += u != mimo_triggered({s}, q, p) || u != snr_triggered({s}, q, p);
  }
  return {bad == 0, fmt("disagreements=%zu of 100000", bad)};
}

Outcome c2_snr_expectation() {
  Gen g(102);
  const SignalParams p;
  double worst = 0;
  for (int c = 0; c < 20; ++c) {
    SenderSet s(50);
    for (auto& x : s) x = {g.point_in_square(5), g.uniform(0.5, 2), 0};
    const Point2 q = g.point_in_square(8);
    double expect = 0;
    for (const auto& x : s) expect += x.amplitude * x.amplitude / std::pow(std::max(dist(x.position, q), p.clamp()), 2);
    double acc = 0;
    for (int t = 0; t < 20000; ++t) {
      for (auto& x : s) x.phase = g.uniform(0, 2 * pi);
      acc += std::norm(received_phasor(s, q, p));
    }
    worst = std::max(worst, std::fabs(acc / 20000 / expect - 1));
  }
  return {worst <= 0.05, fmt("max relative deviation %.4f (limit 0.05)", worst)};
}

Outcome c3_geometry() {
  Gen g(103);
  const double ws[] = {0.1, 0.5, 1.0, 1.5, 1.9}, ds[] = {1.0, 1.5, 3.0, 10.0, 100.0};
  const long n = 10000000;
  double worst_sigma = 0;
  for (double d : ds) {
    long hit[5] = {};
    for (long i = 0; i < n; ++i) {
      const double dd = delta_d(g.point_in_disk(1), d);
      for (int k = 0; k < 5; ++k) hit[k] += dd <= ws[k];
    }
    for (int k = 0; k < 5; ++k) {
      const double ph = double(hit[k]) / double(n);
      const double sigma = pi * std::sqrt(ph * (1 - ph) / double(n));
      worst_sigma = std::max(worst_sigma, std::fabs(intersection_area_f(ws[k], d) - pi * ph) / sigma);
    }
  }
  auto f = [](double w, double d) { return intersection_area_f(w, d); };
  double e1 = 0, e2 = 0;
  for (int i = 0; i < 100; ++i) {
    const double w = g.uniform(0.05, 1.95), d = 1.0 / g.uniform(0.01, 1.0);
    const double h1 = 1e-6, h2 = 1e-4;
    const double fd1 = (f(w + h1, d) - f(w - h1, d)) / (2 * h1);
    const double fd2 = (f(w + h2, d) - 2 * f(w, d) + f(w - h2, d)) / (h2 * h2);
    e1 = std::max(e1, std::fabs(f_prime(w, d) / fd1 - 1));
    e2 = std::max(e2, std::fabs(f_double_prime(w, d) / fd2 - 1));
  }
  return {worst_sigma <= 4 && e1 <= 1e-4 && e2 <= 1e-3,
          fmt("MC worst %.2f sigma over 25 points; f' rel %.1e, f'' rel %.1e", worst_sigma, e1, e2)};
}

Outcome c4_suite() {
  const auto suite = inequality_suite(std::uint64_t{1} << 24);
  std::size_t proved = 0, boxes = 0;
  std::string bad;
  for (const auto& e : suite) {
    boxes += e.result.boxes_processed;
    if (e.result.verdict == Verdict::proved) ++proved;
    else bad += " " + e.name + "=" + std::string(to_string(e.result.verdict));
  }
  return {proved == suite.size(), fmt("%zu/%zu proved, %zu boxes total%s", proved, suite.size(), boxes, bad.c_str())};
}

Outcome c5_udg_scaling() {
  std::vector<std::pair<double, double>> pts;
  bool median_ok = true;
  std::string cells;
  for (int e = 10; e <= 16; ++e) {
    const std::size_t n = std::size_t{1} << e;
    const double rho = default_density_factor * std::log(double(n) + 1), R = radius_for_density(n, rho);
    std::vector<double> rounds;
    for (std::uint64_t s = 1; s <= 30; ++s) rounds.push_back(double(run_udg_flood(sample_field(n, R, field_seed(s, n))).total_rounds));
    std::sort(rounds.begin(), rounds.end());
    const double med = 0.5 * (rounds[14] + rounds[15]);
    median_ok = median_ok && med <= 4 * R;
    pts.emplace_back(std::sqrt(double(n) / rho), med);
    cells += fmt(" 2^%d:%g/%.1f", e, med, R);
  }
  const auto fit = fit_scaling(pts, Transform::loglog);
  return {median_ok && std::fabs(fit.slope - 1.0) <= 0.15,
          fmt("slope %.3f (1.0 +- 0.15), median rounds/R:%s", fit.slope, cells.c_str())};
}

Outcome c6_snr_disk() {
  const std::size_t n = std::size_t{1} << 14;
  const double rho = 64, R = radius_for_density(n, rho);
  const auto sched = snr_upper_schedule(rho, R);
  int covered = 0, rounds_ok = 0;
  std::size_t max_rounds = 0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const NodeField f = sample_field(n, R, field_seed(s, n));
    BroadcastConfig c;
    c.model = Model::SNR;
    c.schedule = Schedule::expanding_disk;
    c.radius_schedule = sched.radii;
    const RoundLog log = run_expanding_disk(f, c);
    // round k >= 2 transmits from D_{r_{k-1}} and must cover D_{r_k}
    bool ok = log.fully_informed;
    for (std::size_t k = 2; k <= log.total_rounds && k <= sched.radii.size(); ++k)
      ok = ok && coverage_radius(f, log, k) > std::min(sched.radii[k - 1], R);
    covered += ok;
    rounds_ok += log.total_rounds <= sched.predicted_rounds + 1;
    max_rounds = std::max(max_rounds, log.total_rounds);
  }
  return {covered >= 48 && rounds_ok == 50,
          fmt("coverage held in %d/50 seeds; rounds <= predicted+1 in %d/50 (max %zu, predicted %zu)", covered, rounds_ok,
              max_rounds, sched.predicted_rounds)};
}

Outcome c7_mimo_trigger() {
  TriggerTestSpec spec;
  spec.rho = 8 * std::log(1e4);
  spec.constants = {calibrated_c1, 1.0};
  spec.receivers = 100;
  const auto cells = miso_trigger_test(spec);
  bool ok = !cells.empty();
  std::string s;
  for (const auto& c : cells) {
    ok = ok && c.rate() >= 0.99;
    s += fmt(" (r=%g d=%.0f %zu/%zu)", c.r, c.d, c.triggered, c.trials);
  }
  return {ok, fmt("c1=%g rho=%.2f:%s", calibrated_c1, spec.rho, s.c_str())};
}

Outcome c8_mimo_growth() {
  const std::size_t n = 10000;
  const double R = 30;
  const SignalParams p;
  std::string dist;
  std::size_t canonical_rounds = 0;
  bool canonical_full = false, superlinear = true;
  std::size_t r_count = 0;
  std::string radii;
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const NodeField f = sample_field(n, R, field_seed(s, n));
    const RoundLog log = run_flood(f, Model::MIMO, p, PhaseRule::random, s);
    dist += fmt(" %zu%s", log.total_rounds, log.fully_informed ? "" : "*");
    if (s != 1) continue;
    canonical_rounds = log.total_rounds;
    canonical_full = log.fully_informed;
    std::vector<double> r;
    for (const auto& rec : log.rounds) {
      radii += fmt(" %.2f", rec.frontier_radius);
      if (rec.frontier_radius < 0.95 * R) r.push_back(rec.frontier_radius);
    }
    for (std::size_t j = 2; j < r.size(); ++j) superlinear = superlinear && r[j] / r[j - 1] > r[j - 1] / r[j - 2];
    if (r.size() < 3) superlinear = false;
    r_count = r.size();
  }
  return {canonical_full && canonical_rounds <= 6 && superlinear,
          fmt("seed 1: %zu rounds, full=%d; frontier radii:%s (%zu below 0.95 R); ratio increasing=%d; rounds over seeds 1-4:%s",
              canonical_rounds, int(canonical_full), radii.c_str(), r_count, int(superlinear), dist.c_str())};
}

Outcome c9_speed_of_light() {
  std::string s;
  bool ok = true;
  for (double e : {10.0, 14.0, 20.0}) {
    const double rho = std::pow(2.0, e);
    const double bound = 1 + 3 / std::sqrt(std::log(rho));
    double worst = 0;
    for (double R : {10.0, 100.0, 1e3, 1e4, 1e6}) worst = std::max(worst, propagation_time(reverse_snr_schedule(rho, R)) / R);
    ok = ok && worst <= bound;
    s += fmt(" rho=2^%g: %.4f <= %.4f", e, worst, bound);
  }
  return {ok, s.substr(1)};
}

Outcome c10_properties() {
  Gen g(110);
  const SignalParams p;
  std::size_t fails = 0;
  // informed-set monotonicity: SNR flood dominates expanding disk round by round
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const NodeField f = sample_field(2000, radius_for_density(2000, 30), s);
    BroadcastConfig c;
    c.model = Model::SNR;
    c.schedule = Schedule::expanding_disk;
    c.radius_schedule = snr_upper_schedule(30, f.R).radii;
    const RoundLog e = run_expanding_disk(f, c), fl = run_flood(f, Model::SNR, p, PhaseRule::none);
    for (std::size_t k = 1; k <= e.total_rounds; ++k) fails += coverage_radius(f, fl, k) < coverage_radius(f, e, k);
    std::set<std::size_t> seen{0};
    for (const auto& r : fl.rounds)
      for (auto i : r.newly_informed) fails += !seen.insert(i).second;
  }
  // phasor linearity and permutation invariance
  for (int t = 0; t < 2000; ++t) {
    SenderSet a, b;
    for (std::size_t j = 0, m = 1 + g.below(30); j < m; ++j) a.push_back({g.point_in_square(4), g.uniform(0.2, 2), g.uniform(0, 2 * pi)});
    for (std::size_t j = 0, m = 1 + g.below(30); j < m; ++j) b.push_back({g.point_in_square(4), g.uniform(0.2, 2), g.uniform(0, 2 * pi)});
    SenderSet u = a;
    u.insert(u.end(), b.begin(), b.end());
    SenderSet perm = u;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[g.below(i)]);
    const Point2 q = g.point_in_square(6);
    double scale = 1;
    for (const auto& x : u) scale += x.amplitude / std::max(dist(x.position, q), p.clamp());
    const cplx z = received_phasor(canonical(u), q, p);
    fails += std::abs(z - received_phasor(canonical(a), q, p) - received_phasor(canonical(b), q, p)) > 1e-12 * scale;
    fails += z != received_phasor(canonical(perm), q, p);
  }
  // interval enclosure soundness
  for (Expression e : all_expressions) {
    const auto dom = domain_of(e);
    for (int b = 0; b < 2000; ++b) {
      const double xmin = dom.x_lo_open ? 1e-9 : 0.0, xmax = dom.x_hi_open ? 2.0 - 1e-9 : 2.0;
      const double wx = std::min(xmax - xmin, std::pow(10.0, g.uniform(-8, 0.3))), wz = std::pow(10.0, g.uniform(-8, 0));
      const double x0 = g.uniform(xmin, xmax - wx), z0 = g.uniform(0, 1 - wz);
      const Box box{{x0, x0 + wx}, {z0, z0 + wz}};
      const Interval I = interval_eval(e, box);
      for (int k = 0; k < 20; ++k) {
        const double v = point_eval(e, g.uniform(box.x.lo, box.x.hi), g.uniform(box.z.lo, box.z.hi));
        fails += std::isfinite(v) && !I.contains(v);
      }
    }
  }
  // determinism
  ExperimentConfig c;
  c.models = {Model::UDG, Model::SNR, Model::MIMO};
  c.n_grid = {128, 512};
  c.seeds = {1, 2, 3};
  c.threads = 2;
  const auto r1 = run_experiment(c, false);
  c.threads = 1;
  const auto r2 = run_experiment(c, false);
  fails += aggregate_csv(r1.rows) != aggregate_csv(r2.rows);
  return {fails == 0, fmt("%zu property violations", fails)};
}

struct Criterion {
  int id;
  double budget_s;
  std::function<Outcome()> run;
};

std::set<int> parse_list(const char* s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.insert(std::stoi(tok));
  return out;
}

} // namespace

int main(int argc, char** argv) {
  std::set<int> only, expect_red;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = parse_list(argv[++i]);
    else if (!std::strcmp(argv[i], "--expect-red") && i + 1 < argc) expect_red = parse_list(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--only N,M] [--expect-red N,M]\n");
      return 2;
    }
  }
  const std::vector<Criterion> all{{1, 5, c1_equivalence},     {2, 60, c2_snr_expectation}, {3, 120, c3_geometry},
                                   {4, 600, c4_suite},         {5, 300, c5_udg_scaling},    {6, 180, c6_snr_disk},
                                   {7, 180, c7_mimo_trigger},  {8, 120, c8_mimo_growth},    {9, 1, c9_speed_of_light},
                                   {10, 300, c10_properties}};
  bool unexpected = false;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s  [%.1f s, budget %.0f s%s]\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), dt,
                c.budget_s, dt > c.budget_s ? ", over" : "");
    std::fflush(stdout);
    if (!o.pass && !expect_red.count(c.id)) unexpected = true;
    if (o.pass && expect_red.count(c.id)) std::printf("criterion %2d: expected red but passed\n", c.id);
  }
  return unexpected ? 1 : 0;
}
