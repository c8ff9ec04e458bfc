#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cbcast/geometry.hpp"
#include "cbcast/nodefield.hpp"
#include "cbcast/signal.hpp"
#include "support.hpp"

using namespace cbcast;
using cbtest::Gen;

namespace {

constexpr double pi = std::numbers::pi;

SenderSet random_senders(Gen& g, std::size_t m, double box) {
  SenderSet s;
  for (std::size_t j = 0; j < m; ++j) s.push_back({g.point_in_square(box), g.uniform(0.2, 2.0), g.uniform(0, 2 * pi)});
  return s;
}

double bsum(const SenderSet& s, Point2 q, const SignalParams& p) {
  double a = 0;
  for (const auto& x : s) a += x.amplitude / std::max(dist(x.position, q), p.clamp());
  return a;
}

} // namespace

TEST(Params, Validation) {
  SignalParams p;
  EXPECT_NO_THROW(p.validate());
  p.lambda = 0.6; // c_f lambda = 1.2 > 1
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.beta_N0 = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Phasor, Examples) {
  const SignalParams p;
  EXPECT_NEAR(std::abs(received_phasor({{{0, 0}, 1, 0}}, {2, 0}, p)), 0.5, 1e-15);
  SenderSet co;
  for (int j = 0; j < 7; ++j) co.push_back({{0, 0}, 1, 0});
  EXPECT_NEAR(std::abs(received_phasor(co, {3, 0}, p)), 7.0 / 3.0, 1e-14);
  EXPECT_EQ(received_phasor({}, {1, 1}, p), cplx(0, 0));
}

TEST(Phasor, RandomPhaseEnergyMatchesSum) {
  Gen g(21);
  const SignalParams p;
  const SenderSet base = random_senders(g, 20, 5);
  const Point2 q{7, 1};
  double expect = 0;
  for (const auto& s : base) expect += s.amplitude * s.amplitude / dist2(s.position, q);
  double acc = 0;
  SenderSet s = base;
  for (int t = 0; t < 10000; ++t) {
    for (auto& x : s) x.phase = g.uniform(0, 2 * pi);
    acc += std::norm(received_phasor(s, q, p));
  }
  EXPECT_NEAR(acc / 10000, expect, 0.05 * expect);
}

TEST(Mimo, TriggerExamples) {
  const SignalParams p;
  EXPECT_TRUE(mimo_triggered({{{0, 0}, 1, 0}}, {1, 0}, p));
  EXPECT_FALSE(mimo_triggered({{{0, 0}, 1, 0}}, {1.000001, 0}, p));
  const SenderSet two{{{0, 2}, 1, 0}, {{0, -2}, 1, 0}};
  EXPECT_EQ(std::norm(received_phasor_parts(two, {0, 0}, p).relative), 1.0);
  EXPECT_TRUE(mimo_triggered(two, {0, 0}, p));
}

TEST(Mimo, DestructiveInterferenceUntriggers) {
  const SignalParams p;
  const SenderSet one{{{0, 0}, 1, 0}};
  const SenderSet two{{{0, 0}, 1, 0}, {{-p.lambda / 2, 0}, 1, 0}};
  const Point2 q{0.9, 0};
  EXPECT_TRUE(mimo_triggered(one, q, p));
  EXPECT_FALSE(mimo_triggered(two, q, p));
  EXPECT_TRUE(snr_triggered(two, q, p));
}

TEST(Snr, Examples) {
  const SignalParams p;
  EXPECT_EQ(snr_received_energy({{{0, 0}, 1, 0}}, {1, 0}, p), 1.0);
  const SenderSet four{{{2, 0}, 1, 0}, {{-2, 0}, 1, 0}, {{0, 2}, 1, 0}, {{0, -2}, 1, 0}};
  EXPECT_EQ(snr_received_energy(four, {0, 0}, p), 1.0);
  EXPECT_TRUE(snr_triggered(four, {0, 0}, p));
  // n = rho pi r^2 / 2 senders at distance sqrt(rho) r / 2 give 2 pi
  const double rho = 64, r = 3;
  const auto n = static_cast<std::size_t>(std::llround(0.5 * pi * rho * r * r));
  SenderSet s(n, {{0, 0}, 1, 0});
  const double e = snr_received_energy(s, {0.5 * std::sqrt(rho) * r, 0}, p);
  EXPECT_NEAR(e, 2 * pi, 2 * pi / double(n));
}

TEST(Udg, Examples) {
  EXPECT_TRUE(udg_triggered({0, 0}, {1, 0}));
  EXPECT_FALSE(udg_triggered({0, 0}, {1 + 1e-9, 0}));
  EXPECT_TRUE(udg_triggered({0.3, 0.4}, {0.3, 1.4}));
}

TEST(Models, SingleSenderEquivalence) {
  Gen g(22);
  const SignalParams p;
  int disagree = 0;
  for (int i = 0; i < 100000; ++i) {
    const Sender s{g.point_in_square(3), 1.0, g.uniform(0, 2 * pi)};
    const double r = g.below(4) == 0 ? 1.0 + (g.below(2) ? 1e-9 : -1e-9) : g.uniform(0, 4);
    const Point2 q{s.position.x + r * std::cos(i), s.position.y + r * std::sin(i)};
    const bool u = udg_triggered(s.position, q), m = mimo_triggered({s}, q, p), n = snr_triggered({s}, q, p);
    disagree += (u != m) || (u != n);
  }
  EXPECT_EQ(disagree, 0);
}

TEST(Phasor, PermutationInvarianceAfterCanonicalSort) {
  Gen g(23);
  const SignalParams p;
  for (int t = 0; t < 200; ++t) {
    const SenderSet s = random_senders(g, 1 + g.below(60), 4);
    SenderSet perm = s;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[g.below(i)]);
    const Point2 q = g.point_in_square(6);
    EXPECT_EQ(received_phasor(canonical(s), q, p), received_phasor(canonical(perm), q, p));
    EXPECT_EQ(snr_received_energy(canonical(s), q, p), snr_received_energy(canonical(perm), q, p));
  }
}

TEST(Phasor, Linearity) {
  Gen g(24);
  const SignalParams p;
  for (int t = 0; t < 500; ++t) {
    const SenderSet a = random_senders(g, 1 + g.below(30), 4), b = random_senders(g, 1 + g.below(30), 4);
    SenderSet u = a;
    u.insert(u.end(), b.begin(), b.end());
    const Point2 q = g.point_in_square(6);
    const cplx lhs = received_phasor(canonical(u), q, p);
    const cplx rhs = received_phasor(canonical(a), q, p) + received_phasor(canonical(b), q, p);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, bsum(u, q, p)));
  }
}

TEST(Phasor, ClampAndTriangleBound) {
  Gen g(25);
  const SignalParams p;
  for (int t = 0; t < 2000; ++t) {
    const SenderSet s = random_senders(g, 1 + g.below(40), 1);
    const Point2 q = g.point_in_square(1.5);
    EXPECT_LE(std::abs(received_phasor(s, q, p)), bsum(s, q, p) * (1 + 1e-12));
  }
  // coincident sender: clamp at c_f lambda
  EXPECT_NEAR(std::abs(received_phasor({{{1, 1}, 1, 0}}, {1, 1}, p)), 1 / p.clamp(), 1e-12);
}

TEST(Phasor, CoherentGainIsMaximal) {
  Gen g(26);
  const SignalParams p;
  for (int t = 0; t < 200; ++t) {
    SenderSet s = random_senders(g, 1 + g.below(50), 5);
    const Point2 q = g.point_in_square(8);
    for (auto& x : s) x.phase = 2 * pi * dist(x.position, q) / p.lambda;
    EXPECT_NEAR(std::abs(received_phasor(s, q, p)), bsum(s, q, p), 1e-12 * bsum(s, q, p));
  }
}

TEST(Demodulation, AgreesWithClosedForm) {
  Gen g(27);
  const SignalParams p;
  for (int t = 0; t < 100; ++t) {
    const SenderSet s = random_senders(g, 1 + g.below(10), 3);
    const Point2 q = g.point_in_square(4);
    const cplx a = received_phasor(s, q, p), b = demodulate_numeric(s, q, p, 50 * p.lambda, 20000);
    EXPECT_LE(std::abs(a - b), 1e-6 * std::max(std::abs(a), 1e-3 * bsum(s, q, p))) << t;
  }
  EXPECT_EQ(demodulate_numeric({}, {0, 0}, p, 5, 10000), cplx(0, 0));
  EXPECT_NEAR(std::abs(demodulate_numeric({{{0, 0}, 1, 0}}, {3, 0}, p, 5, 10000)), 1.0 / 3, 1e-9);
  EXPECT_THROW(demodulate_numeric({{{0, 0}, 1, 0}}, {3, 0}, p, 4.9, 10000), std::invalid_argument);
  EXPECT_THROW(demodulate_numeric({{{0, 0}, 1, 0}}, {3, 0}, p, 5, 9999), std::invalid_argument);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  const auto [x, w] = gauss_legendre(12);
  for (int k = 0; k <= 23; ++k) {
    double acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * std::pow(x[i], k);
    EXPECT_NEAR(acc, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-14);
  }
}

TEST(ExpectedPhasor, LowerBoundAndPositivity) {
  const cplx s = expected_phasor_integral(20, 0.5);
  EXPECT_GE(s.imag(), expected_phasor_lower_bound(20, 0.5));
  EXPECT_GT(expected_phasor_integral(100, 1).imag(), 0.0);
  EXPECT_THROW(expected_phasor_integral(10, 0.5), std::invalid_argument);
  EXPECT_THROW(expected_phasor_integral(20, 3), std::invalid_argument);
}

TEST(ExpectedPhasor, ScalingIdentity) {
  const cplx a = phasor_disk_integral(20, 0.5, 1), b = phasor_disk_integral(40, 1.0, 2);
  EXPECT_LE(std::abs(b - 2.0 * a), 1e-8 * std::abs(b));
}

// Monte Carlo mean of e^{i 2 pi Δ/λ}/dist over the disk, times its area.
TEST(ExpectedPhasor, MatchesMonteCarlo) {
  Gen g(28);
  const double d = 20, lam = 0.5;
  const int n = 400000;
  cplx acc{};
  for (int i = 0; i < n; ++i) {
    const Point2 v = g.point_in_disk(1);
    acc += std::polar(1.0 / dist(v, {d, 0}), 2 * pi * delta_d(v, d) / lam);
  }
  const cplx mc = acc * (pi / n);
  const cplx s = expected_phasor_integral(d, lam);
  EXPECT_LE(std::abs(mc - s), 4 * pi / d / std::sqrt(double(n)));
}

TEST(Analysis, JacobianReproducesFPrime) {
  for (double d : {2.0, 5.0, 30.0})
    for (double z : {0.05, 0.5, 1.0, 1.7}) EXPECT_NEAR(f_prime_via_jacobian(z, d), f_prime(z, d), 1e-7) << d << ' ' << z;
}

TEST(Analysis, UAtTwoEqualsDiskIntegral) {
  const cplx u = u_integral(20, 0.5, 2), s = phasor_disk_integral(20, 0.5, 1);
  EXPECT_LE(std::abs(u - s), 1e-8);
}

TEST(Analysis, HIntegralArgumentInUpperHalfPlane) {
  for (double lam : {0.25, 0.5, 1.0})
    for (double w = lam / 2; w <= 2.0; w += 0.05) EXPECT_GT(h_integral(20, lam, w).imag(), 0.0) << lam << ' ' << w;
  EXPECT_NEAR(h_integral(20, 0.5, 2).real(), 0.0, 2.0);
  EXPECT_EQ(h_integral(20, 0.5, 0), cplx(0, 0));
}

TEST(FieldMap, SingleSenderSymmetry) {
  const SignalParams p;
  const GridSpec grid{-1.5, 1.5, -1.5, 1.5, 3, 3};
  const auto m = field_map({{{0, 0}, 1, 0}}, grid, p, Model::MIMO);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(m.at(i, j), m.at(1, 1));
  EXPECT_EQ(m.at(0, 0), m.at(2, 2));
  EXPECT_EQ(m.at(0, 0), m.at(0, 2));
  EXPECT_EQ(m.at(0, 1), m.at(1, 0));
  EXPECT_EQ(m.at(2, 1), m.at(1, 2));
  const auto s = field_map({{{0, 0}, 1, 0}}, grid, p, Model::SNR);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(s.values[k], m.values[k], 1e-12 * m.values[k]);
}

TEST(FieldMap, EmptyAndInvalid) {
  const SignalParams p;
  const auto m = field_map({}, {-1, 1, -1, 1, 4, 5}, p, Model::SNR);
  EXPECT_EQ(m.values.size(), 20u);
  EXPECT_TRUE(std::all_of(m.values.begin(), m.values.end(), [](double v) { return v == 0.0; }));
  EXPECT_THROW(field_map({}, {1, 1, -1, 1, 4, 5}, p, Model::SNR), std::invalid_argument);
  EXPECT_THROW(field_map({}, {-1, 1, -1, 1, 0, 5}, p, Model::SNR), std::invalid_argument);
}

TEST(FieldMap, CoherentDiskIsSpikierInMimo) {
  const SignalParams p;
  const auto f = sample_field(400, 3, 29);
  SenderSet s;
  for (const auto& v : f.positions) s.push_back({v, 1, -2 * pi * norm(v) / p.lambda});
  auto variance = [&](Model m) {
    const int n = 720;
    double a = 0, b = 0;
    for (int i = 0; i < n; ++i) {
      const double t = 2 * pi * i / n;
      const double v = reception_value(canonical(s), {12 * std::cos(t), 12 * std::sin(t)}, p, m);
      a += v;
      b += v * v;
    }
    return b / n - (a / n) * (a / n);
  };
  EXPECT_GT(variance(Model::MIMO), variance(Model::SNR));
}
