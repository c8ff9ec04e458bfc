#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cbcast/bounds.hpp"
#include "cbcast/broadcast.hpp"
#include "cbcast/io.hpp"
#include "cbcast/nodefield.hpp"
#include "cbcast/signal.hpp"

namespace cbcast {

// Shipped calibration (calibrate-c1 at rho = 8 ln 1e4, lambda = 0.1, c2 = 1, 50 seeds).
inline constexpr double calibrated_c1 = 0.25;
inline constexpr double default_density_factor = 4.0 * 8.0 / std::numbers::pi;

inline std::optional<Model> model_from_string(std::string_view s) {
  for (Model m : {Model::UDG, Model::SNR, Model::MIMO})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

inline std::optional<Schedule> schedule_from_string(std::string_view s) {
  for (Schedule x : {Schedule::flood, Schedule::expanding_disk})
    if (to_string(x) == s) return x;
  return std::nullopt;
}

inline std::optional<PhaseRule> phase_rule_from_string(std::string_view s) {
  for (PhaseRule r : {PhaseRule::none, PhaseRule::random, PhaseRule::center_sync})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

struct ExperimentConfig {
  std::vector<Model> models{Model::UDG};
  std::vector<std::size_t> n_grid{1024};
  double density_factor = default_density_factor; // rho = c ln(n+1)
  std::optional<double> fixed_rho;
  std::vector<std::uint64_t> seeds{1};
  Schedule schedule = Schedule::flood;
  PhaseRule phase_rule = PhaseRule::random;
  std::filesystem::path out_dir = "out";
  SignalParams params;
  MisoConstants constants{calibrated_c1, 1.0};
  unsigned threads = 0; // 0: hardware concurrency

  double rho_for(std::size_t n) const { return fixed_rho.value_or(density_factor * std::log(static_cast<double>(n) + 1.0)); }

  void validate() const {
    if (models.empty() || n_grid.empty() || seeds.empty()) throw std::invalid_argument("experiment: models, n-grid and seeds must be nonempty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) throw std::invalid_argument("experiment: seeds must be distinct");
    for (auto n : n_grid)
      if (n < 1) throw std::invalid_argument("experiment: n must be >= 1");
    if (fixed_rho && !(*fixed_rho > 0.0)) throw std::invalid_argument("experiment: rho must be positive");
    if (!fixed_rho && !(density_factor > 0.0)) throw std::invalid_argument("experiment: density factor must be positive");
    params.validate();
  }
};

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j.at("models")) {
      auto v = model_from_string(m.get<std::string>());
      if (!v) throw std::invalid_argument("config: unknown model " + m.get<std::string>());
      c.models.push_back(*v);
    }
  }
  if (j.contains("n_grid")) c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  if (j.contains("density_factor")) c.density_factor = j.at("density_factor").get<double>();
  if (j.contains("rho")) c.fixed_rho = j.at("rho").get<double>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("schedule")) {
    auto s = schedule_from_string(j.at("schedule").get<std::string>());
    if (!s) throw std::invalid_argument("config: unknown schedule");
    c.schedule = *s;
  }
  if (j.contains("phase_rule")) {
    auto r = phase_rule_from_string(j.at("phase_rule").get<std::string>());
    if (!r) throw std::invalid_argument("config: unknown phase_rule");
    c.phase_rule = *r;
  }
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("lambda")) c.params.lambda = j.at("lambda").get<double>();
  if (j.contains("c1")) c.constants.c1 = j.at("c1").get<double>();
  if (j.contains("c2")) c.constants.c2 = j.at("c2").get<double>();
  if (j.contains("c_f")) c.params.c_f = j.at("c_f").get<double>();
  if (j.contains("beta_N0")) c.params.beta_N0 = j.at("beta_N0").get<double>();
  if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  return c;
}

inline std::uint64_t field_seed(std::uint64_t seed, std::size_t n) { return Counter64::stream(seed, n, 0x6669656c64).key(); }

// One run of the configured algorithm for `model` on a field of n nodes.
inline RoundLog run_model(const NodeField& f, Model model, const ExperimentConfig& c, std::uint64_t seed) {
  switch (model) {
  case Model::UDG: return run_udg_flood(f);
  case Model::SNR:
    if (c.schedule == Schedule::expanding_disk) {
      BroadcastConfig bc;
      bc.model = Model::SNR;
      bc.schedule = Schedule::expanding_disk;
      bc.radius_schedule = snr_upper_schedule(density(f), f.R).radii;
      bc.params = c.params;
      return run_expanding_disk(f, bc);
    }
    return run_flood(f, Model::SNR, c.params, PhaseRule::none);
  case Model::MIMO:
    if (c.schedule == Schedule::expanding_disk) return run_miso_broadcast(f, c.params, c.constants);
    return run_flood(f, Model::MIMO, c.params, c.phase_rule, seed);
  }
  return {};
}

struct RunRow {
  Model model = Model::UDG;
  std::size_t n = 0;
  double rho = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> rounds; // empty when the run failed
  bool fully_informed = false;
  double propagation_time = 0.0;
  std::string error;
};

struct ExperimentReport {
  std::vector<RunRow> rows; // ordered by (model, n, seed) as configured
  std::filesystem::path aggregate_csv;
};

inline std::string run_file_name(const RunRow& r) {
  return std::string(to_string(r.model)) + "_n" + std::to_string(r.n) + "_s" + std::to_string(r.seed) + ".json";
}

inline std::string aggregate_csv(const std::vector<RunRow>& rows) {
  std::string s = "model,n,rho,lambda,seed,rounds,fully_informed,propagation_time\n";
  for (const auto& r : rows)
    s += std::string(to_string(r.model)) + ',' + std::to_string(r.n) + ',' + fmt17(r.rho) + ',' + fmt17(r.lambda) + ',' +
         std::to_string(r.seed) + ',' + (r.rounds ? std::to_string(*r.rounds) : std::string("NA")) + ',' +
         (r.fully_informed ? "true" : "false") + ',' + fmt17(r.propagation_time) + '\n';
  return s;
}

// Runs every (model, n, seed) cell on a worker pool; when write_files is set, writes
// runs/<model>_n<n>_s<seed>.json and aggregate.csv under out_dir.
inline ExperimentReport run_experiment(const ExperimentConfig& c, bool write_files = true) {
  c.validate();
  ExperimentReport rep;
  for (Model m : c.models)
    for (auto n : c.n_grid)
      for (auto s : c.seeds) {
        RunRow r;
        r.model = m;
        r.n = n;
        r.rho = c.rho_for(n);
        r.lambda = c.params.lambda;
        r.seed = s;
        rep.rows.push_back(r);
      }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rep.rows.size();) {
      RunRow& r = rep.rows[i];
      try {
        const NodeField f = sample_field(r.n, radius_for_density(r.n, r.rho), field_seed(r.seed, r.n));
        const RoundLog log = run_model(f, r.model, c, r.seed);
        r.rounds = log.total_rounds;
        r.fully_informed = log.fully_informed;
        r.propagation_time = log.propagation_time;
        if (write_files) atomic_write(c.out_dir / "runs" / run_file_name(r), to_json(log).dump(1) + "\n");
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nt = std::min<std::size_t>(c.threads ? c.threads : hw, rep.rows.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (write_files) {
    rep.aggregate_csv = c.out_dir / "aggregate.csv";
    atomic_write(rep.aggregate_csv, aggregate_csv(rep.rows));
    json fails = json::array();
    for (const auto& r : rep.rows)
      if (!r.error.empty()) fails.push_back({{"file", run_file_name(r)}, {"error", r.error}});
    atomic_write(c.out_dir / "failures.json", fails.dump(1) + "\n");
  }
  return rep;
}

enum class Transform { loglog, semilog, loglogx };

inline std::optional<Transform> transform_from_string(std::string_view s) {
  if (s == "loglog") return Transform::loglog;
  if (s == "semilog") return Transform::semilog;
  if (s == "loglogx") return Transform::loglogx;
  return std::nullopt;
}

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points; // transformed
};

// loglog: (ln x, ln y); semilog: (ln x, y); loglogx: (ln ln x, y).
inline ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& pts, Transform t) {
  if (pts.size() < 4) throw std::invalid_argument("fit_scaling: need at least 4 points");
  ScalingFit fit;
  for (auto [x, y] : pts) {
    double tx = 0, ty = y;
    switch (t) {
    case Transform::loglog:
      if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_scaling: loglog needs positive x and y");
      tx = std::log(x);
      ty = std::log(y);
      break;
    case Transform::semilog:
      if (!(x > 0.0)) throw std::invalid_argument("fit_scaling: semilog needs positive x");
      tx = std::log(x);
      break;
    case Transform::loglogx:
      if (!(x > 1.0)) throw std::invalid_argument("fit_scaling: loglogx needs x > 1");
      tx = std::log(std::log(x));
      break;
    }
    fit.points.emplace_back(tx, ty);
  }
  const double n = static_cast<double>(fit.points.size());
  double mx = 0, my = 0;
  for (auto [x, y] : fit.points) mx += x, my += y;
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 1e-300)) throw std::invalid_argument("fit_scaling: degenerate (constant x) input");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

struct CalibrationStep {
  double c1 = 0.0;
  std::vector<TriggerCell> cells; // pooled over seeds
  bool passed = false;
};

struct Calibration {
  std::optional<double> c1; // largest passing 2^-k
  std::vector<CalibrationStep> steps;
};

struct CalibrationConfig {
  double rho = 8.0 * std::log(1e4);
  SignalParams params;
  double c2 = 1.0;
  std::size_t seeds = 50;
  std::size_t receivers_per_seed = 2;
  double target = 0.99;
  int max_halvings = 8;
};

// Tries c1 = 1, 1/2, 1/4, ... and stops at the first value whose pooled trigger rate
// reaches the target in every (r, d) cell.
inline Calibration calibrate_c1(const CalibrationConfig& cc) {
  Calibration out;
  for (int k = 0; k <= cc.max_halvings; ++k) {
    CalibrationStep step;
    step.c1 = std::ldexp(1.0, -k);
    for (std::size_t s = 1; s <= cc.seeds; ++s) {
      TriggerTestSpec spec;
      spec.rho = cc.rho;
      spec.params = cc.params;
      spec.constants = {step.c1, cc.c2};
      spec.receivers = cc.receivers_per_seed;
      spec.seed = s;
      const auto cells = miso_trigger_test(spec);
      if (step.cells.empty()) step.cells = cells;
      else
        for (std::size_t i = 0; i < cells.size(); ++i) {
          step.cells[i].trials += cells[i].trials;
          step.cells[i].triggered += cells[i].triggered;
        }
    }
    step.passed = std::all_of(step.cells.begin(), step.cells.end(), [&](const TriggerCell& c) { return c.rate() >= cc.target; });
    out.steps.push_back(step);
    if (step.passed) {
      out.c1 = step.c1;
      break;
    }
  }
  return out;
}

struct FieldmapConfig {
  std::size_t n = 10000;
  double R = 30.0;
  std::uint64_t seed = 1;
  std::vector<Model> models{Model::UDG, Model::SNR, Model::MIMO};
  std::size_t rounds = 4;
  std::size_t resolution = 128;
  PhaseRule mimo_phase_rule = PhaseRule::random;
  SignalParams params;
  std::filesystem::path out_dir = "out";
};

// Senders transmitting in round j of the flood: every node informed before round j,
// with the phases that round uses.
inline SenderSet round_senders(const NodeField& f, const RoundLog& log, std::size_t j, PhaseRule rule, std::uint64_t seed,
                               const SignalParams& p) {
  std::vector<char> informed(f.size(), 0);
  informed[0] = 1;
  for (std::size_t k = 0; k + 1 < j && k < log.rounds.size(); ++k)
    for (auto i : log.rounds[k].newly_informed) informed[i] = 1;
  SenderSet s;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (informed[i]) s.push_back({f.positions[i], p.amplitude_default, detail::phase_for(rule, f, i, j, seed, p)});
  return s;
}

inline std::vector<std::filesystem::path> emit_fieldmap(const FieldmapConfig& c) {
  c.params.validate();
  if (c.resolution < 1) throw std::invalid_argument("emit_fieldmap: resolution must be >= 1");
  const NodeField f = sample_field(c.n, c.R, field_seed(c.seed, c.n));
  GridSpec g{-c.R, c.R, -c.R, c.R, c.resolution, c.resolution};
  std::vector<std::filesystem::path> written;
  for (Model m : c.models) {
    const PhaseRule rule = m == Model::MIMO ? c.mimo_phase_rule : PhaseRule::none;
    const RoundLog log = m == Model::UDG ? run_udg_flood(f) : run_flood(f, m, c.params, rule, c.seed);
    for (std::size_t j = 1; j <= c.rounds; ++j) {
      const FieldMap map = field_map(round_senders(f, log, j, rule, c.seed, c.params), g, c.params, m);
      const std::string stem = "round_" + std::to_string(j) + "_" + std::string(to_string(m));
      atomic_write(c.out_dir / (stem + ".pgm"), fieldmap_pgm(map, c.params.beta_N0));
      atomic_write(c.out_dir / (stem + ".csv"), fieldmap_csv(map));
      written.push_back(c.out_dir / (stem + ".pgm"));
      written.push_back(c.out_dir / (stem + ".csv"));
    }
  }
  return written;
}

} // namespace cbcast
