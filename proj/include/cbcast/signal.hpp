#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "cbcast/geometry.hpp"

namespace cbcast {

using cplx = std::complex<double>;

enum class Model { UDG, SNR, MIMO };

inline constexpr std::string_view to_string(Model m) {
  switch (m) {
  case Model::UDG: return "udg";
  case Model::SNR: return "snr";
  case Model::MIMO: return "mimo";
  }
  return "?";
}

struct SignalParams {
  double lambda = 0.1;
  double beta_N0 = 1.0;
  double c_f = 2.0;
  double amplitude_default = 1.0;

  double clamp() const { return c_f * lambda; }

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("SignalParams: lambda must be positive");
    if (!(beta_N0 > 0.0)) throw std::invalid_argument("SignalParams: beta_N0 must be positive");
    if (!(c_f > 0.0) || c_f * lambda > 1.0) throw std::invalid_argument("SignalParams: need 0 < c_f*lambda <= 1");
  }
};

struct Sender {
  Point2 position;
  double amplitude = 1.0;
  double phase = 0.0;
};

using SenderSet = std::vector<Sender>;

template <class T, class It> T pairwise_sum(It first, It last) {
  const auto n = last - first;
  if (n <= 8) {
    T s{};
    for (; first != last; ++first) s += *first;
    return s;
  }
  const It mid = first + n / 2;
  return pairwise_sum<T>(first, mid) + pairwise_sum<T>(mid, last);
}

// z = e^{i reference_phase} * relative. The first sender's phase is factored out, so
// its own term is exactly b_0 and |relative| is free of the rotation's rounding.
struct Phasor {
  cplx relative{};
  double reference_phase = 0.0;

  cplx value() const { return std::polar(1.0, reference_phase) * relative; }
  double energy() const { return std::norm(relative); }
};

// Phasor at q of senders get(0..m-1), summed pairwise in the given order.
template <class Get> Phasor phasor_sum(std::size_t m, Get&& get, Point2 q, const SignalParams& p) {
  Phasor out;
  if (m == 0) return out;
  thread_local std::vector<cplx> terms;
  terms.resize(m);
  const double cl = p.clamp();
  const double k = 2.0 * std::numbers::pi / p.lambda;
  const Sender s0 = get(std::size_t{0});
  const double d0 = dist(s0.position, q);
  for (std::size_t j = 0; j < m; ++j) {
    const Sender s = get(j);
    const double d = dist(s.position, q);
    const double b = s.amplitude / std::max(d, cl);
    if (j == 0) {
      terms[j] = {b, 0.0};
      continue;
    }
    const double th = (s.phase - s0.phase) - k * (d - d0);
    terms[j] = {b * std::cos(th), b * std::sin(th)};
  }
  out.relative = pairwise_sum<cplx>(terms.begin(), terms.end());
  out.reference_phase = s0.phase - k * d0;
  return out;
}

template <class Get> double snr_energy_sum(std::size_t m, Get&& get, Point2 q, const SignalParams& p) {
  if (m == 0) return 0.0;
  thread_local std::vector<double> terms;
  terms.resize(m);
  const double cl2 = p.clamp() * p.clamp();
  for (std::size_t j = 0; j < m; ++j) {
    const Sender s = get(j);
    terms[j] = s.amplitude * s.amplitude / std::max(dist2(s.position, q), cl2);
  }
  return pairwise_sum<double>(terms.begin(), terms.end());
}

// Canonical order for sender sets without node indices: (x, y, amplitude, phase).
inline SenderSet canonical(SenderSet s) {
  std::sort(s.begin(), s.end(), [](const Sender& a, const Sender& b) {
    return std::tie(a.position.x, a.position.y, a.amplitude, a.phase) <
           std::tie(b.position.x, b.position.y, b.amplitude, b.phase);
  });
  return s;
}

inline Phasor received_phasor_parts(const SenderSet& senders, Point2 q, const SignalParams& params) {
  const SenderSet c = canonical(senders);
  return phasor_sum(c.size(), [&](std::size_t j) { return c[j]; }, q, params);
}

inline cplx received_phasor(const SenderSet& senders, Point2 q, const SignalParams& params) {
  return received_phasor_parts(senders, q, params).value();
}

inline bool mimo_triggered(const SenderSet& senders, Point2 q, const SignalParams& params) {
  return received_phasor_parts(senders, q, params).energy() >= params.beta_N0;
}

inline double snr_received_energy(const SenderSet& senders, Point2 q, const SignalParams& params) {
  const SenderSet c = canonical(senders);
  return snr_energy_sum(c.size(), [&](std::size_t j) { return c[j]; }, q, params);
}

inline bool snr_triggered(const SenderSet& senders, Point2 q, const SignalParams& params) {
  return snr_received_energy(senders, q, params) >= params.beta_N0;
}

inline bool udg_triggered(Point2 sender, Point2 q) { return dist2(sender, q) <= 1.0; }

// Time-domain oracle: senders emit a e^{i(2 pi t/lambda + phi)} from t = 0; the window
// [t0, t0 + delta] starts once every signal has arrived at q.
inline cplx demodulate_numeric(const SenderSet& senders, Point2 q, const SignalParams& params, double delta,
                               std::size_t steps) {
  params.validate();
  if (delta < 50.0 * params.lambda) throw std::invalid_argument("demodulate_numeric: delta must be >= 50 lambda");
  if (steps < 10000) throw std::invalid_argument("demodulate_numeric: steps must be >= 10^4");
  if (senders.empty()) return {0.0, 0.0};
  const double w = 2.0 * std::numbers::pi / params.lambda;
  const double cl = params.clamp();
  std::vector<double> delay(senders.size()), gain(senders.size());
  double t0 = 0.0;
  for (std::size_t j = 0; j < senders.size(); ++j) {
    delay[j] = dist(senders[j].position, q);
    gain[j] = senders[j].amplitude / std::max(delay[j], cl);
    t0 = std::max(t0, delay[j]);
  }
  auto integrand = [&](double t) {
    cplx rx{};
    for (std::size_t j = 0; j < senders.size(); ++j) {
      const double ts = t - delay[j];
      if (ts < 0.0) continue;
      rx += gain[j] * std::polar(1.0, w * ts + senders[j].phase);
    }
    return rx * std::polar(1.0, -w * t);
  };
  const double h = delta / static_cast<double>(steps);
  cplx acc = 0.5 * (integrand(t0) + integrand(t0 + delta));
  for (std::size_t i = 1; i < steps; ++i) acc += integrand(t0 + h * static_cast<double>(i));
  return acc * h / delta;
}

// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n) {
  std::vector<double> x(n), w(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 20; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

namespace detail {

// GL rule mapped to [a, b]
struct Rule {
  std::vector<double> x, w;
  Rule(std::size_t n, double a, double b) {
    auto [t, v] = gauss_legendre(n);
    x.resize(n);
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = a + 0.5 * (b - a) * (t[i] + 1.0);
      w[i] = 0.5 * (b - a) * v[i];
    }
  }
};

// Doubles the node count until successive values agree to tol; throws if the last
// pair still differs by more than 1e-4 relative.
template <class Fn> cplx refine(Fn&& eval, std::size_t n0, std::size_t n_max, const char* what) {
  cplx prev = eval(n0);
  double diff = 0.0;
  for (std::size_t n = 2 * n0; n <= n_max; n *= 2) {
    const cplx cur = eval(n);
    diff = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
    prev = cur;
    if (diff < 1e-11) return cur;
  }
  if (diff > 1e-4) throw std::runtime_error(std::string(what) + ": quadrature did not converge");
  return prev;
}

} // namespace detail

// s(d, lambda, r) = ∬_{D_r} e^{+i 2 pi Δ_d(p)/lambda} / |p - (d,0)| dp. The physical
// demodulated phasor is the complex conjugate.
inline cplx phasor_disk_integral(double d, double lambda, double r) {
  if (!(r > 0.0) || !(lambda > 0.0) || !(d > r)) throw std::invalid_argument("phasor_disk_integral: need d > r > 0, lambda > 0");
  const double k = 2.0 * std::numbers::pi / lambda;
  auto eval = [&](std::size_t n) {
    const detail::Rule rr(n, 0.0, r), rt(n, 0.0, std::numbers::pi);
    cplx acc{};
    for (std::size_t i = 0; i < n; ++i) {
      cplx row{};
      for (std::size_t j = 0; j < n; ++j) {
        const double px = rr.x[i] * std::cos(rt.x[j]), py = rr.x[i] * std::sin(rt.x[j]);
        const double dq = std::hypot(d - px, py);
        const double delta = rr.x[i] + dq - d;
        row += rt.w[j] * std::polar(1.0 / dq, k * delta);
      }
      acc += rr.w[i] * rr.x[i] * row;
    }
    return 2.0 * acc;
  };
  return detail::refine(eval, 32, 4096, "phasor_disk_integral");
}

inline cplx expected_phasor_integral(double d_over_r, double lambda_over_r) {
  if (!(d_over_r >= 15.0)) throw std::invalid_argument("expected_phasor_integral: need d/r >= 15");
  if (!(lambda_over_r > 0.0 && lambda_over_r <= 2.0)) throw std::invalid_argument("expected_phasor_integral: need 0 < lambda/r <= 2");
  return phasor_disk_integral(d_over_r, lambda_over_r, 1.0);
}

// Lower bound on Im s(d, lambda, 1).
inline double expected_phasor_lower_bound(double d, double lambda) {
  return 9.0 / (2240.0 * std::numbers::sqrt2) * std::sqrt(lambda) / (d + 1.0);
}

// h_{d,lambda}(w) = ∫_0^w e^{i 2 pi x/lambda} f'(x,d) dx
inline cplx h_integral(double d, double lambda, double w) {
  if (!(d >= 1.0) || !(lambda > 0.0) || !(w >= 0.0 && w <= 2.0)) throw std::invalid_argument("h_integral: need d >= 1, lambda > 0, w in [0,2]");
  const double k = 2.0 * std::numbers::pi / lambda;
  auto eval = [&](std::size_t n) {
    cplx acc{};
    const double a = std::min(w, 1.0);
    const detail::Rule r1(n, 0.0, std::sqrt(a)); // x = s^2
    for (std::size_t i = 0; i < n; ++i) {
      const double x = r1.x[i] * r1.x[i];
      acc += r1.w[i] * 2.0 * r1.x[i] * f_prime(x, d) * std::polar(1.0, k * x);
    }
    if (w > 1.0) {
      const detail::Rule r2(n, std::sqrt(2.0 - w), 1.0); // x = 2 - t^2
      for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 - r2.x[i] * r2.x[i];
        acc += r2.w[i] * 2.0 * r2.x[i] * f_prime(x, d) * std::polar(1.0, k * x);
      }
    }
    return acc;
  };
  if (w == 0.0) return {0.0, 0.0};
  return detail::refine(eval, 32, 4096, "h_integral");
}

// |det| of the (l, z) -> plane map for the ellipse/circle parametrisation.
inline double jacobian_det(double d, double z, double l) {
  return 2.0 * l * (d - l + z) / (std::sqrt(z) * std::sqrt(2.0 * l - z) * std::sqrt((2.0 * d + z) * (2.0 * d - 2.0 * l + z)));
}

inline double t_integrand(double d, double z, double l) { return 2.0 / l * std::fabs(jacobian_det(d, z, l)); }

namespace detail {

// ∫ weight(l) |det| dl over l in [d-1+z, d+z/2], with l = l_hi - L s^2
template <class W> double ell_integral(double d, double z, std::size_t n, W&& weight) {
  const double hi = d + 0.5 * z, L = 1.0 - 0.5 * z;
  const Rule r(n, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = r.x[i], l = hi - L * s * s;
    acc += r.w[i] * 2.0 * L * s * weight(l) * std::fabs(jacobian_det(d, z, l));
  }
  return acc;
}

} // namespace detail

// ∫ 2|det| dl; equals f'(z, d)
inline double f_prime_via_jacobian(double z, double d) {
  if (!(d >= 2.0) || !(z > 0.0 && z < 2.0)) throw std::invalid_argument("f_prime_via_jacobian: need d >= 2, z in (0,2)");
  return detail::refine([&](std::size_t n) { return cplx(detail::ell_integral(d, z, n, [](double) { return 2.0; })); },
                        32, 2048, "f_prime_via_jacobian")
      .real();
}

inline double t_integral(double d, double z) {
  if (!(d >= 2.0) || !(z > 0.0 && z < 2.0)) throw std::invalid_argument("t_integral: need d >= 2, z in (0,2)");
  return detail::refine([&](std::size_t n) { return cplx(detail::ell_integral(d, z, n, [](double l) { return 2.0 / l; })); },
                        32, 2048, "t_integral")
      .real();
}

// u_{d,lambda}(w) = ∫_0^w e^{i 2 pi z/lambda} t(d,z) dz;  u(2) = s(d, lambda, 1).
inline cplx u_integral(double d, double lambda, double w) {
  if (!(d >= 2.0) || !(lambda > 0.0) || !(w >= 0.0 && w <= 2.0)) throw std::invalid_argument("u_integral: need d >= 2, lambda > 0, w in [0,2]");
  if (w == 0.0) return {0.0, 0.0};
  const double k = 2.0 * std::numbers::pi / lambda;
  auto eval = [&](std::size_t n) {
    auto t = [&](double z) { return detail::ell_integral(d, z, n, [](double l) { return 2.0 / l; }); };
    cplx acc{};
    const double a = std::min(w, 1.0);
    const detail::Rule r1(n, 0.0, std::sqrt(a));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = r1.x[i] * r1.x[i];
      acc += r1.w[i] * 2.0 * r1.x[i] * t(z) * std::polar(1.0, k * z);
    }
    if (w > 1.0) {
      const detail::Rule r2(n, std::sqrt(2.0 - w), 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double z = 2.0 - r2.x[i] * r2.x[i];
        acc += r2.w[i] * 2.0 * r2.x[i] * t(z) * std::polar(1.0, k * z);
      }
    }
    return acc;
  };
  return detail::refine(eval, 16, 512, "u_integral");
}

struct GridSpec {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  std::size_t nx = 1, ny = 1;

  Point2 center(std::size_t ix, std::size_t iy) const {
    return {xmin + (static_cast<double>(ix) + 0.5) * (xmax - xmin) / static_cast<double>(nx),
            ymin + (static_cast<double>(iy) + 0.5) * (ymax - ymin) / static_cast<double>(ny)};
  }
};

struct FieldMap {
  GridSpec grid;
  Model model = Model::MIMO;
  std::vector<double> values; // row-major, row = y index

  double at(std::size_t ix, std::size_t iy) const { return values[iy * grid.nx + ix]; }
};

// |z|^2 (MIMO), RS (SNR), or the strongest single-sender energy (UDG) at cell centers.
inline double reception_value(const SenderSet& canon, Point2 q, const SignalParams& params, Model model) {
  auto get = [&](std::size_t j) { return canon[j]; };
  switch (model) {
  case Model::MIMO: return phasor_sum(canon.size(), get, q, params).energy();
  case Model::SNR: return snr_energy_sum(canon.size(), get, q, params);
  case Model::UDG: {
    double best = 0.0;
    const double cl2 = params.clamp() * params.clamp();
    for (const auto& s : canon) best = std::max(best, s.amplitude * s.amplitude / std::max(dist2(s.position, q), cl2));
    return best;
  }
  }
  return 0.0;
}

inline FieldMap field_map(const SenderSet& senders, const GridSpec& grid, const SignalParams& params, Model model) {
  if (grid.nx < 1 || grid.ny < 1 || !(grid.xmax > grid.xmin) || !(grid.ymax > grid.ymin))
    throw std::invalid_argument("field_map: invalid grid bounds");
  params.validate();
  const SenderSet c = canonical(senders);
  FieldMap m;
  m.grid = grid;
  m.model = model;
  m.values.resize(grid.nx * grid.ny);
  for (std::size_t iy = 0; iy < grid.ny; ++iy)
    for (std::size_t ix = 0; ix < grid.nx; ++ix) m.values[iy * grid.nx + ix] = reception_value(c, grid.center(ix, iy), params, model);
  return m;
}

} // namespace cbcast
