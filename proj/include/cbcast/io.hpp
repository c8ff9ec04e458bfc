#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbcast/bounds.hpp"
#include "cbcast/broadcast.hpp"
#include "cbcast/nodefield.hpp"
#include "cbcast/prover.hpp"
#include "cbcast/signal.hpp"

namespace cbcast {

using json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Write to a sibling temp file, then rename over the target.
inline void atomic_write(const std::filesystem::path& path, const std::string& data) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string field_to_csv(const NodeField& f) {
  std::string s = "index,x,y\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    s += std::to_string(i) + ',' + fmt17(f.positions[i].x) + ',' + fmt17(f.positions[i].y) + '\n';
  return s;
}

// R defaults to the largest node norm.
inline NodeField field_from_csv(const std::string& text, std::optional<double> R = std::nullopt) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,x,y", 0) != 0) throw std::runtime_error("field csv: missing header index,x,y");
  NodeField f;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::size_t idx = 0;
    double x = 0, y = 0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf%c", &idx, &x, &y, &tail) < 3)
      throw std::runtime_error("field csv: malformed line " + std::to_string(lineno));
    if (idx != f.positions.size()) throw std::runtime_error("field csv: index out of order at line " + std::to_string(lineno));
    f.positions.push_back({x, y});
  }
  if (f.positions.empty()) throw std::runtime_error("field csv: no nodes");
  double m = 0.0;
  for (const auto& p : f.positions) m = std::max(m, norm(p));
  f.R = R.value_or(m);
  return f;
}

inline json to_json(const RoundLog& log) {
  json rounds = json::array();
  for (const auto& r : log.rounds) {
    auto ni = r.newly_informed;
    std::sort(ni.begin(), ni.end());
    rounds.push_back({{"round_index", r.round_index},
                      {"newly_informed", ni},
                      {"frontier_radius", r.frontier_radius},
                      {"senders_active", r.senders_active},
                      {"disk_radius_r_j", r.disk_radius_r_j ? json(*r.disk_radius_r_j) : json(nullptr)},
                      {"travel_distance", r.travel_distance}});
  }
  return {{"rounds", rounds},
          {"total_rounds", log.total_rounds},
          {"fully_informed", log.fully_informed},
          {"propagation_time", log.propagation_time},
          {"cap_hit", log.cap_hit},
          {"bootstrap_rounds", log.bootstrap_rounds},
          {"main_rounds", log.main_rounds},
          {"bootstrap_failed", log.bootstrap_failed}};
}

// Same schema as a RoundLog summary; rounds carry only the schedule radius.
inline json to_json(const SchedulePrediction& s) {
  json rounds = json::array();
  for (std::size_t j = 0; j < s.radii.size(); ++j)
    rounds.push_back({{"round_index", j + 1},
                      {"newly_informed", json::array()},
                      {"frontier_radius", j + 1 < s.radii.size() ? s.radii[j + 1] : s.radii[j]},
                      {"senders_active", 0},
                      {"disk_radius_r_j", s.radii[j]}});
  const bool finite = s.predicted_rounds != rounds_infinite;
  return {{"model", std::string(to_string(s.model))},
          {"direction", std::string(to_string(s.direction))},
          {"rounds", rounds},
          {"total_rounds", finite ? json(s.predicted_rounds) : json(nullptr)},
          {"fully_informed", finite},
          {"propagation_time", propagation_time(s.radii)},
          {"growth_ok", s.growth_ok}};
}

inline json to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

inline json to_json(const Box& b) { return {{"x", to_json(b.x)}, {"z", to_json(b.z)}}; }

inline json certificate_json(const ProofTask& task, const ProofResult& res, const std::string& statement = "") {
  json leaves = json::array();
  for (const auto& l : res.leaves) leaves.push_back({{"box", to_json(l.box)}, {"enclosure", to_json(l.enclosure)}, {"depth", l.depth}});
  json j = {{"task",
             {{"name", task.name},
              {"statement", statement},
              {"expression", std::string(to_string(task.expression))},
              {"domain", to_json(task.domain)},
              {"relation", std::string(to_string(task.relation))},
              {"bound", task.bound},
              {"weight", std::string(to_string(task.weight))}}},
            {"budget", {{"max_boxes", task.max_boxes}, {"max_depth", task.max_depth}}},
            {"rounding_mode", rounding::mode},
            {"verdict", std::string(to_string(res.verdict))},
            {"boxes_processed", res.boxes_processed},
            {"max_depth_reached", res.deepest_level},
            {"leaf_count", res.leaf_count},
            {"leaves_elided", res.leaves_elided},
            {"clip_events", res.clip_events},
            {"leaves", leaves}};
  if (res.witness) {
    j["witness"] = {{"box", to_json(*res.witness)}, {"value", res.witness_value}};
    if (res.witness_point) j["witness"]["point"] = {res.witness_point->first, res.witness_point->second};
  }
  return j;
}

inline std::string fieldmap_csv(const FieldMap& m) {
  std::string s = "x,y,value\n";
  const auto& g = m.grid;
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const Point2 c = g.center(ix, iy);
      s += fmt17(c.x) + ',' + fmt17(c.y) + ',' + fmt17(m.at(ix, iy)) + '\n';
    }
  return s;
}

// Plain P2; row 0 is the top (largest y).
inline std::string fieldmap_pgm(const FieldMap& m, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("fieldmap_pgm: threshold must be positive");
  const auto& g = m.grid;
  std::string s = "P2\n" + std::to_string(g.nx) + ' ' + std::to_string(g.ny) + "\n255\n";
  for (std::size_t r = 0; r < g.ny; ++r) {
    const std::size_t iy = g.ny - 1 - r;
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const long v = std::lround(255.0 * std::min(1.0, m.at(ix, iy) / threshold));
      s += std::to_string(v);
      s += ix + 1 < g.nx ? ' ' : '\n';
    }
  }
  return s;
}

} // namespace cbcast
