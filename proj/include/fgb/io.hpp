#pragma once

// JSON forms of graphs, instances, covering programs, complexity reports and
// regret traces.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fgb/algo.hpp"
#include "fgb/complexity.hpp"
#include "fgb/env.hpp"
#include "fgb/errors.hpp"
#include "fgb/graph.hpp"
#include "fgb/lp.hpp"

namespace fgb {

using json = nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// %.17g, enough digits to round-trip any double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// {"k": int, "adj": [[int,...],...]}
inline json graph_to_json(const FeedbackGraph& g) {
  return json{{"k", g.size()}, {"adj", g.adjacency()}};
}

inline FeedbackGraph graph_from_json(const json& j) {
  try {
    const auto k = j.at("k").get<std::size_t>();
    auto adj = j.at("adj").get<std::vector<VertexSet>>();
    if (adj.size() != k) throw ParameterError("adj: expected " + std::to_string(k) + " neighbor lists");
    return FeedbackGraph::from_adjacency(std::move(adj));
  } catch (const json::exception& e) {
    throw ParameterError(std::string("graph json: ") + e.what());
  }
}

// {"means": [...], "sigma": float}
inline json instance_to_json(const Instance& inst) {
  return json{{"means", inst.means()}, {"sigma", inst.sigma()}};
}

inline Instance instance_from_json(const json& j) {
  try {
    auto means = j.at("means").get<std::vector<double>>();
    const double sigma = j.contains("sigma") ? j.at("sigma").get<double>() : kDefaultSigma;
    return Instance(std::move(means), sigma);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("instance json: ") + e.what());
  }
}

// {"costs": [...], "rows": [{"vars": [...], "threshold": b}, ...]}
inline CoveringLP lp_from_json(const json& j) {
  try {
    CoveringLP lp;
    lp.costs = j.at("costs").get<std::vector<double>>();
    for (const auto& row : j.at("rows"))
      lp.rows.push_back({row.at("vars").get<std::vector<std::size_t>>(), row.at("threshold").get<double>()});
    return lp;
  } catch (const json::exception& e) {
    throw ModelError(std::string("lp json: ") + e.what());
  }
}

inline json lp_to_json(const CoveringLP& lp) {
  json rows = json::array();
  for (const auto& r : lp.rows) rows.push_back({{"vars", r.vars}, {"threshold", r.threshold}});
  return json{{"costs", lp.costs}, {"rows", rows}};
}

inline std::string to_string(LPStatus s) { return s == LPStatus::optimal ? "optimal" : "approximate"; }

inline json solution_to_json(const LPSolution& sol) {
  return json{{"primal", sol.primal},
              {"value", sol.value},
              {"dual", sol.dual},
              {"dual_value", sol.dual_value},
              {"duality_gap", sol.gap()},
              {"status", to_string(sol.status)},
              {"iterations", sol.iterations}};
}

inline json report_to_json(const ComplexityReport& r) {
  return json{{"c_star", r.c_star.value},
              {"c_star_primal", r.c_star.primal},
              {"d_profile", r.d_star.profile},
              {"d_star", r.d_star.value},
              {"argmax_s", r.d_star.argmax_s},
              {"is_bound", r.is_bound.value},
              {"is_bound_exact", r.is_bound.exact},
              {"star_condition", r.star_condition},
              {"clip_gaps", r.clip_gaps},
              {"duality_gaps",
               {{"c_star", r.c_star.duality_gap()}, {"d_profile", r.d_star.duality_gaps}}}};
}

inline json trace_to_json(const RegretTrace& t) {
  json phases = json::array();
  for (const auto& p : t.phases) {
    phases.push_back({{"s", p.s},
                      {"initialization", p.initialization},
                      {"truncated", p.truncated},
                      {"start", p.start},
                      {"tau", p.end},
                      {"lp_value", p.lp_value},
                      {"duality_gap", p.duality_gap},
                      {"lp_status", to_string(p.lp_status)},
                      {"plays", p.played},
                      {"regret", p.regret}});
  }
  return json{{"seed", t.seed},
              {"rounds", t.cumulative.size()},
              {"final_regret", t.final_regret()},
              {"plays", t.plays},
              {"observations", t.observations},
              {"phases", phases}};
}

}  // namespace fgb
