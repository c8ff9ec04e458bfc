#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cbcast/experiment.hpp"
#include "cbcast/io.hpp"
#include "cbcast/prover.hpp"

using namespace cbcast;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --out beats COBCAST_OUT beats the config file.
fs::path resolve_out(const std::string& flag, const fs::path& configured) {
  if (!flag.empty()) return flag;
  if (const char* e = std::getenv("COBCAST_OUT"); e && *e) return e;
  return configured;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

template <class T, class F> std::vector<T> parse_enum_list(const std::vector<std::string>& v, F from, const char* what) {
  std::vector<T> out;
  for (const auto& s : v) {
    auto x = from(s);
    if (!x) throw UsageError(std::string("unknown ") + what + ": " + s);
    out.push_back(*x);
  }
  return out;
}

std::vector<std::pair<double, double>> parse_points(const std::string& s) {
  std::vector<std::pair<double, double>> pts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto c = tok.find(':');
    if (c == std::string::npos) throw UsageError("point '" + tok + "' is not x:y");
    try {
      pts.emplace_back(std::stod(tok.substr(0, c)), std::stod(tok.substr(c + 1)));
    } catch (const std::logic_error&) {
      throw UsageError("point '" + tok + "' is not numeric");
    }
  }
  return pts;
}

// x,y columns with a header line.
std::vector<std::pair<double, double>> read_points_csv(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x = 0, y = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) != 2) throw std::runtime_error(p.string() + ": malformed line " + line);
    pts.emplace_back(x, y);
  }
  return pts;
}

struct SimulateOpts {
  std::string config, out, schedule, phase_rule, fit;
  std::vector<std::string> models;
  std::vector<std::size_t> n;
  std::vector<std::uint64_t> seeds;
  std::optional<double> rho, density_factor, lambda, c1, c2;
  std::optional<unsigned> threads;
  bool require_full = false;
};

int cmd_simulate(const SimulateOpts& o) {
  ExperimentConfig c;
  try {
    c = config_from_json(load_config(o.config));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!o.models.empty()) c.models = parse_enum_list<Model>(o.models, model_from_string, "model");
  if (!o.n.empty()) c.n_grid = o.n;
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.rho) c.fixed_rho = *o.rho;
  if (o.density_factor) c.density_factor = *o.density_factor, c.fixed_rho.reset();
  if (o.lambda) c.params.lambda = *o.lambda;
  if (o.c1) c.constants.c1 = *o.c1;
  if (o.c2) c.constants.c2 = *o.c2;
  if (o.threads) c.threads = *o.threads;
  if (!o.schedule.empty()) c.schedule = parse_enum_list<Schedule>({o.schedule}, schedule_from_string, "schedule")[0];
  if (!o.phase_rule.empty()) c.phase_rule = parse_enum_list<PhaseRule>({o.phase_rule}, phase_rule_from_string, "phase rule")[0];
  c.out_dir = resolve_out(o.out, c.out_dir);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rep = run_experiment(c);
  std::size_t errors = 0, partial = 0;
  for (const auto& r : rep.rows) {
    errors += !r.error.empty();
    partial += r.error.empty() && !r.fully_informed;
  }
  std::printf("%zu runs, %zu failed, %zu not fully informed; wrote %s\n", rep.rows.size(), errors, partial,
              rep.aggregate_csv.string().c_str());
  if (!o.fit.empty()) {
    const auto t = transform_from_string(o.fit);
    if (!t) throw UsageError("unknown transform " + o.fit);
    json fits = json::object();
    for (Model m : c.models) {
      // median rounds per n against sqrt(n/rho) for loglog, against n otherwise
      std::vector<std::pair<double, double>> pts;
      for (auto n : c.n_grid) {
        std::vector<double> v;
        for (const auto& r : rep.rows)
          if (r.model == m && r.n == n && r.rounds) v.push_back(double(*r.rounds));
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const double med = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        const double x = *t == Transform::loglog ? std::sqrt(double(n) / c.rho_for(n)) : double(n);
        pts.emplace_back(x, med);
      }
      try {
        const auto f = fit_scaling(pts, *t);
        fits[std::string(to_string(m))] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
        std::printf("%s: slope %.4f intercept %.4f r^2 %.4f\n", std::string(to_string(m)).c_str(), f.slope, f.intercept, f.r_squared);
      } catch (const std::invalid_argument& e) {
        fits[std::string(to_string(m))] = {{"error", e.what()}};
        std::printf("%s: fit skipped (%s)\n", std::string(to_string(m)).c_str(), e.what());
      }
    }
    atomic_write(c.out_dir / "fit.json", fits.dump(1) + "\n");
  }
  return errors || (o.require_full && partial) ? 1 : 0;
}

struct FieldmapOpts {
  std::string config, out, phase_rule;
  std::vector<std::string> models;
  std::optional<std::size_t> n, rounds, resolution;
  std::optional<double> R, lambda;
  std::optional<std::uint64_t> seed;
};

int cmd_fieldmap(const FieldmapOpts& o) {
  const json j = load_config(o.config);
  FieldmapConfig c;
  try {
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("R")) c.R = j.at("R").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rounds")) c.rounds = j.at("rounds").get<std::size_t>();
    if (j.contains("resolution")) c.resolution = j.at("resolution").get<std::size_t>();
    if (j.contains("lambda")) c.params.lambda = j.at("lambda").get<double>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("models")) c.models = parse_enum_list<Model>(j.at("models").get<std::vector<std::string>>(), model_from_string, "model");
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (o.n) c.n = *o.n;
  if (o.R) c.R = *o.R;
  if (o.seed) c.seed = *o.seed;
  if (o.rounds) c.rounds = *o.rounds;
  if (o.resolution) c.resolution = *o.resolution;
  if (o.lambda) c.params.lambda = *o.lambda;
  if (!o.models.empty()) c.models = parse_enum_list<Model>(o.models, model_from_string, "model");
  if (!o.phase_rule.empty()) c.mimo_phase_rule = parse_enum_list<PhaseRule>({o.phase_rule}, phase_rule_from_string, "phase rule")[0];
  c.out_dir = resolve_out(o.out, c.out_dir);
  if (c.n < 1 || !(c.R > 0) || c.resolution < 1) throw UsageError("fieldmap: need n >= 1, R > 0, resolution >= 1");
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto files = emit_fieldmap(c);
  std::printf("wrote %zu files to %s\n", files.size(), c.out_dir.string().c_str());
  return 0;
}

struct ProveOpts {
  std::string suite, task, out;
  std::uint64_t max_boxes = std::uint64_t{1} << 24;
};

int cmd_prove(const ProveOpts& o) {
  if (o.suite.empty() == o.task.empty()) throw UsageError("prove: give exactly one of --suite core or --task <name>");
  if (!o.suite.empty() && o.suite != "core") throw UsageError("prove: unknown suite " + o.suite);
  auto tasks = inequality_tasks(o.max_boxes);
  if (!o.task.empty()) {
    std::erase_if(tasks, [&](const SuiteEntry& e) { return e.name != o.task; });
    if (tasks.empty()) throw UsageError("prove: unknown task " + o.task);
  }
  const fs::path out = resolve_out(o.out, "out") / "certificates";
  bool all = true;
  for (auto& e : tasks) {
    e.result = prove_inequality(e.task);
    atomic_write(out / (e.name + ".json"), certificate_json(e.task, e.result, e.statement).dump(1) + "\n");
    std::printf("%-22s %-9s boxes=%llu depth=%d\n", e.name.c_str(), std::string(to_string(e.result.verdict)).c_str(),
                static_cast<unsigned long long>(e.result.boxes_processed), e.result.deepest_level);
    all = all && e.result.verdict == Verdict::proved;
  }
  return all ? 0 : 1;
}

struct CalibrateOpts {
  std::string out;
  CalibrationConfig cc;
  std::optional<double> lambda;
};

int cmd_calibrate(CalibrateOpts o) {
  if (o.lambda) o.cc.params.lambda = *o.lambda;
  try {
    o.cc.params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.cc.seeds < 1 || o.cc.receivers_per_seed < 1) throw UsageError("calibrate-c1: seeds and receivers must be >= 1");
  const auto cal = calibrate_c1(o.cc);
  json steps = json::array();
  for (const auto& s : cal.steps) {
    json cells = json::array();
    for (const auto& c : s.cells) cells.push_back({{"r", c.r}, {"d", c.d}, {"trials", c.trials}, {"triggered", c.triggered}});
    steps.push_back({{"c1", s.c1}, {"passed", s.passed}, {"cells", cells}});
    std::printf("c1=%g %s\n", s.c1, s.passed ? "pass" : "fail");
  }
  const json j = {{"rho", o.cc.rho},          {"lambda", o.cc.params.lambda}, {"c2", o.cc.c2},
                  {"seeds", o.cc.seeds},      {"receivers_per_seed", o.cc.receivers_per_seed},
                  {"target", o.cc.target},    {"c1", cal.c1 ? json(*cal.c1) : json(nullptr)},
                  {"steps", steps}};
  const fs::path out = resolve_out(o.out, "out") / "calibration.json";
  atomic_write(out, j.dump(1) + "\n");
  if (!cal.c1) {
    std::printf("no c1 reached the target\n");
    return 1;
  }
  std::printf("c1=%g\n", *cal.c1);
  return 0;
}

struct FitOpts {
  std::string points, csv, transform = "loglog";
  std::optional<double> expect_slope;
  double tol = 0.15;
};

int cmd_fit(const FitOpts& o) {
  if (o.points.empty() == o.csv.empty()) throw UsageError("fit: give exactly one of --points or --csv");
  const auto t = transform_from_string(o.transform);
  if (!t) throw UsageError("unknown transform " + o.transform);
  const auto pts = o.points.empty() ? read_points_csv(o.csv) : parse_points(o.points);
  ScalingFit f;
  try {
    f = fit_scaling(pts, *t);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::cout << json({{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}}).dump() << "\n";
  if (o.expect_slope && !(std::fabs(f.slope - *o.expect_slope) <= o.tol)) {
    std::fprintf(stderr, "slope %.6g outside %.6g +- %.3g\n", f.slope, *o.expect_slope, o.tol);
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative broadcast simulator"};
  app.require_subcommand(1);
  std::function<int()> action;

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "run broadcast experiments over an (n, seed) grid");
  sim->add_option("--config", so.config, "JSON config file")->check(CLI::ExistingFile);
  sim->add_option("--out", so.out, "output directory");
  sim->add_option("--models", so.models, "udg, snr, mimo")->delimiter(',');
  sim->add_option("--n", so.n, "node counts")->delimiter(',');
  sim->add_option("--seeds", so.seeds, "seeds")->delimiter(',');
  sim->add_option("--rho", so.rho, "fixed density");
  sim->add_option("--density-factor", so.density_factor, "rho = c ln(n+1)");
  sim->add_option("--lambda", so.lambda, "wavelength");
  sim->add_option("--c1", so.c1);
  sim->add_option("--c2", so.c2);
  sim->add_option("--schedule", so.schedule, "flood or expanding_disk");
  sim->add_option("--phase-rule", so.phase_rule, "none, random or center_sync (MIMO flood)");
  sim->add_option("--threads", so.threads);
  sim->add_option("--fit", so.fit, "fit median rounds: loglog (vs sqrt(n/rho)), semilog or loglogx (vs n)");
  sim->add_flag("--require-full", so.require_full, "exit 1 if any run leaves nodes uninformed");
  sim->callback([&] { action = [&] { return cmd_simulate(so); }; });

  FieldmapOpts fo;
  auto* fm = app.add_subcommand("fieldmap", "per-round reception maps as PGM and CSV");
  fm->add_option("--config", fo.config)->check(CLI::ExistingFile);
  fm->add_option("--out", fo.out);
  fm->add_option("--models", fo.models)->delimiter(',');
  fm->add_option("--n", fo.n);
  fm->add_option("--R", fo.R);
  fm->add_option("--seed", fo.seed);
  fm->add_option("--rounds", fo.rounds);
  fm->add_option("--resolution", fo.resolution);
  fm->add_option("--lambda", fo.lambda);
  fm->add_option("--phase-rule", fo.phase_rule);
  fm->callback([&] { action = [&] { return cmd_fieldmap(fo); }; });

  ProveOpts po;
  auto* pr = app.add_subcommand("prove", "interval branch-and-bound certificates");
  pr->add_option("--suite", po.suite, "core: every built-in inequality task");
  pr->add_option("--task", po.task, "single task name");
  pr->add_option("--max-boxes", po.max_boxes)->check(CLI::PositiveNumber);
  pr->add_option("--out", po.out);
  pr->callback([&] { action = [&] { return cmd_prove(po); }; });

  CalibrateOpts co;
  auto* cal = app.add_subcommand("calibrate-c1", "largest power-of-two c1 passing the trigger test");
  cal->add_option("--rho", co.cc.rho);
  cal->add_option("--lambda", co.lambda);
  cal->add_option("--c2", co.cc.c2);
  cal->add_option("--seeds", co.cc.seeds);
  cal->add_option("--receivers", co.cc.receivers_per_seed, "receivers per seed and distance");
  cal->add_option("--target", co.cc.target);
  cal->add_option("--max-halvings", co.cc.max_halvings);
  cal->add_option("--out", co.out);
  cal->callback([&] { action = [&] { return cmd_calibrate(co); }; });

  FitOpts fto;
  auto* fit = app.add_subcommand("fit", "least-squares scaling fit");
  fit->add_option("--points", fto.points, "x:y,x:y,...");
  fit->add_option("--csv", fto.csv, "file with x,y columns")->check(CLI::ExistingFile);
  fit->add_option("--transform", fto.transform, "loglog, semilog or loglogx");
  fit->add_option("--expect-slope", fto.expect_slope);
  fit->add_option("--tol", fto.tol);
  fit->callback([&] { action = [&] { return cmd_fit(fto); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
