#pragma once

// Replicated experiments, aggregation on a round grid, CSV/JSON emission and
// the named scenario presets.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fgb/algo.hpp"
#include "fgb/complexity.hpp"
#include "fgb/env.hpp"
#include "fgb/graph.hpp"
#include "fgb/io.hpp"

namespace fgb {

inline constexpr const char* kVersion = "0.1.0";

enum class Algorithm { phased_lp, ucbn };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::phased_lp ? "phased_lp" : "ucbn"; }

inline Algorithm parse_algorithm(std::string_view name) {
  if (name == "phased_lp") return Algorithm::phased_lp;
  if (name == "ucbn") return Algorithm::ucbn;
  throw ConfigError("algo: unknown algorithm '" + std::string(name) + "'");
}

// Powers of 1.25 rounded to integers, deduplicated, always ending at T.
inline std::vector<std::size_t> default_grid(std::size_t horizon) {
  std::vector<std::size_t> grid;
  for (double v = 1.0; v < static_cast<double>(horizon); v *= 1.25) {
    const auto t = static_cast<std::size_t>(std::llround(v));
    if (t >= horizon) break;
    if (grid.empty() || grid.back() != t) grid.push_back(t);
  }
  grid.push_back(horizon);
  return grid;
}

struct ExperimentConfig {
  FeedbackGraph graph;
  Instance instance;
  std::string graph_desc;     // echoed into metadata
  std::string instance_desc;
  Algorithm algo = Algorithm::phased_lp;
  std::string scenario = "custom";
  std::string profile = "demo";
  AlgoConfig params = AlgoConfig::demo(1);  // horizon taken from `horizon`
  std::size_t horizon = 1000;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t experiment = 0;
  std::vector<std::size_t> grid;  // empty: default_grid(horizon)
  std::size_t workers = 1;

  std::vector<std::size_t> effective_grid() const { return grid.empty() ? default_grid(horizon) : grid; }

  void check() const {
    if (horizon < 1) throw ConfigError("T: must be >= 1");
    if (replicates < 1) throw ConfigError("replicates: must be >= 1");
    if (workers < 1) throw ConfigError("workers: must be >= 1");
    if (graph.size() == 0) throw ConfigError("graph: missing");
    if (graph.size() != instance.size())
      throw ConfigError("instance: " + std::to_string(instance.size()) + " arms for a graph of " +
                        std::to_string(graph.size()) + " vertices");
    for (std::size_t t : grid)
      if (t < 1 || t > horizon) throw ConfigError("grid: point " + std::to_string(t) + " outside [1, T]");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("grid: must be increasing");
    AlgoConfig p = params;
    p.horizon = horizon;
    p.check();
  }

  json echo() const {
    return json{{"graph", graph_desc},
                {"instance", instance_desc},
                {"algo", std::string(to_string(algo))},
                {"scenario", scenario},
                {"profile", profile},
                {"alpha", params.alpha},
                {"alpha_prime", params.alpha_prime},
                {"clip_gaps", params.clip_gaps},
                {"T", horizon},
                {"replicates", replicates},
                {"master_seed", master_seed},
                {"experiment", experiment}};
  }
};

struct AggregateResult {
  std::string algo;
  std::string scenario;
  std::size_t replicates = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::size_t> grid;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation, 0 for one replicate
  std::vector<double> final_regret;             // per replicate
  std::vector<std::vector<double>> curves;      // per replicate, on the grid
  json metadata;
};

inline RegretTrace run_replicate(const ExperimentConfig& cfg, std::size_t replicate) {
  const auto seed = derive_seed(cfg.master_seed, cfg.experiment, replicate);
  if (cfg.algo == Algorithm::ucbn) return run_ucbn(cfg.graph, cfg.instance, cfg.horizon, seed);
  AlgoConfig p = cfg.params;
  p.horizon = cfg.horizon;
  return run_algorithm(cfg.graph, cfg.instance, p, seed);
}

inline std::vector<double> sample_on_grid(const RegretTrace& trace, const std::vector<std::size_t>& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (std::size_t t : grid) out.push_back(trace.cumulative.at(t - 1));
  return out;
}

// Curves must be given in replicate order.
inline AggregateResult aggregate(const ExperimentConfig& cfg, std::vector<std::vector<double>> curves) {
  AggregateResult res;
  res.algo = std::string(to_string(cfg.algo));
  res.scenario = cfg.scenario;
  res.replicates = curves.size();
  res.master_seed = cfg.master_seed;
  res.grid = cfg.effective_grid();
  res.metadata = cfg.echo();
  res.metadata["version"] = kVersion;
  const std::size_t points = res.grid.size();
  const double r = static_cast<double>(curves.size());
  res.mean.assign(points, 0.0);
  res.stddev.assign(points, 0.0);
  for (std::size_t p = 0; p < points; ++p) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c[p];
    const double m = sum / r;
    double ss = 0.0;
    for (const auto& c : curves) ss += (c[p] - m) * (c[p] - m);
    res.mean[p] = m;
    res.stddev[p] = curves.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
  }
  for (const auto& c : curves) res.final_regret.push_back(c.empty() ? 0.0 : c.back());
  res.curves = std::move(curves);
  return res;
}

// Replicates run on up to cfg.workers threads; results are joined by
// replicate index.
inline AggregateResult run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  const auto grid = cfg.effective_grid();
  std::vector<std::vector<double>> curves(cfg.replicates);
  std::vector<std::exception_ptr> errors(cfg.replicates);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < cfg.replicates; r = next++) {
      try {
        curves[r] = sample_on_grid(run_replicate(cfg, r), grid);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(cfg.workers, cfg.replicates);
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return aggregate(cfg, std::move(curves));
}

// ---------------------------------------------------------------------------
// Emission

inline std::string to_csv(const AggregateResult& res) {
  std::string out = "t,regret_mean,regret_std,algo,scenario,replicates,master_seed\n";
  for (std::size_t p = 0; p < res.grid.size(); ++p) {
    out += std::to_string(res.grid[p]) + "," + format_double(res.mean[p]) + "," +
           format_double(res.stddev[p]) + "," + res.algo + "," + res.scenario + "," +
           std::to_string(res.replicates) + "," + std::to_string(res.master_seed) + "\n";
  }
  return out;
}

inline json to_json(const AggregateResult& res) {
  return json{{"algo", res.algo},
              {"scenario", res.scenario},
              {"replicates", res.replicates},
              {"master_seed", res.master_seed},
              {"grid", res.grid},
              {"regret_mean", res.mean},
              {"regret_std", res.stddev},
              {"final_regret", res.final_regret},
              {"curves", res.curves},
              {"metadata", res.metadata}};
}

inline AggregateResult aggregate_from_json(const json& j) {
  try {
    AggregateResult res;
    res.algo = j.at("algo").get<std::string>();
    res.scenario = j.at("scenario").get<std::string>();
    res.replicates = j.at("replicates").get<std::size_t>();
    res.master_seed = j.at("master_seed").get<std::uint64_t>();
    res.grid = j.at("grid").get<std::vector<std::size_t>>();
    res.mean = j.at("regret_mean").get<std::vector<double>>();
    res.stddev = j.at("regret_std").get<std::vector<double>>();
    res.final_regret = j.at("final_regret").get<std::vector<double>>();
    res.curves = j.at("curves").get<std::vector<std::vector<double>>>();
    res.metadata = j.at("metadata");
    return res;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("aggregate json: ") + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

enum class OutputFormat { csv, json };

inline void emit(const AggregateResult& res, OutputFormat format, const std::filesystem::path& path) {
  write_text_file(path, format == OutputFormat::csv ? to_csv(res) : dump(to_json(res)));
}

// Declarative chart description over the CSV columns, for external plotting.
inline json chart_description(const std::string& csv_path, const std::string& title) {
  return json{{"title", title},
              {"data", csv_path},
              {"mark", "line"},
              {"x", {{"field", "t"}, {"scale", "log"}}},
              {"y", {{"field", "regret_mean"}, {"error", "regret_std"}}},
              {"series", "algo"}};
}

// ---------------------------------------------------------------------------
// Scenarios

struct ScenarioOptions {
  std::size_t horizon = 20000;
  std::size_t replicates = 4;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
  std::string profile = "demo";
  bool clip_gaps = false;
};

struct ScenarioResult {
  std::string name;
  PaperInstance construction;
  ComplexityReport report;
  std::vector<AggregateResult> results;  // phased_lp, ucbn
  std::optional<CubeTable> cube_table;
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"example1_star", "example2_starlike",
                                                 "reinforced_wheel", "cube"};
  return names;
}

// Desk-scale defaults; `overrides` uses the named-instance key=value syntax
// plus env=A|B for the cube scenario.
inline PaperParams scenario_params(const std::string& name, const std::string& overrides,
                                   std::string& instance_name) {
  std::string base;
  std::string rest = overrides;
  std::string env = "A";
  {
    std::stringstream ss(overrides);
    std::string item;
    rest.clear();
    while (std::getline(ss, item, ',')) {
      if (item.rfind("env=", 0) == 0) env = item.substr(4);
      else if (!item.empty()) rest += (rest.empty() ? "" : ",") + item;
    }
  }
  if (name == "example1_star") {
    base = "k=64,delta=0.05";
    instance_name = "example1_star";
  } else if (name == "example2_starlike") {
    base = "k=16,delta=0.05,delta_max=0.4";
    instance_name = "example2_starlike";
  } else if (name == "reinforced_wheel") {
    base = "k=16,delta=0.05,nu=0.9,variant=2";
    instance_name = "reinforced_wheel_base";
  } else if (name == "cube") {
    base = "n=10,delta=0.1,eps=0.1";
    if (env != "A" && env != "B") throw ParameterError("env: must be A or B");
    instance_name = "cube_env_" + env;
  } else {
    throw ParameterError("name: unknown scenario '" + name + "'");
  }
  return parse_paper_params(base + (rest.empty() ? "" : "," + rest));
}

inline AlgoConfig profile_config(const std::string& profile, std::size_t horizon) {
  if (profile == "demo") return AlgoConfig::demo(horizon);
  if (profile == "paper") return AlgoConfig::paper(horizon);
  throw ConfigError("profile: must be paper or demo");
}

inline ScenarioResult scenario(const std::string& name, const std::string& overrides,
                               const ScenarioOptions& opt) {
  ScenarioResult out;
  out.name = name;
  std::string instance_name;
  const PaperParams params = scenario_params(name, overrides, instance_name);
  out.construction = paper_instance(instance_name, params);
  const FeedbackGraph g = generate(out.construction.graph);
  out.report = analyze(g, out.construction.instance, opt.clip_gaps);
  if (name == "cube") out.cube_table = cube_scenario_table(params.n, params.delta, params.eps);

  for (Algorithm algo : {Algorithm::phased_lp, Algorithm::ucbn}) {
    ExperimentConfig cfg;
    cfg.graph = g;
    cfg.instance = out.construction.instance;
    cfg.graph_desc = to_string(out.construction.graph);
    cfg.instance_desc = instance_name + ":" + overrides;
    cfg.algo = algo;
    cfg.scenario = name;
    cfg.profile = opt.profile;
    cfg.params = profile_config(opt.profile, opt.horizon);
    cfg.params.clip_gaps = opt.clip_gaps;
    cfg.horizon = opt.horizon;
    cfg.replicates = opt.replicates;
    cfg.master_seed = opt.master_seed;
    cfg.workers = opt.workers;
    out.results.push_back(run_experiment(cfg));
  }
  return out;
}

inline json scenario_to_json(const ScenarioResult& s) {
  json j{{"scenario", s.name},
         {"graph", to_string(s.construction.graph)},
         {"instance", instance_to_json(s.construction.instance)},
         {"report", report_to_json(s.report)}};
  json results = json::array();
  for (const auto& r : s.results) results.push_back(to_json(r));
  j["results"] = results;
  if (s.cube_table) {
    j["cube_table"] = {{"A_envA", s.cube_table->a_env_a},
                       {"A_envB", s.cube_table->a_env_b},
                       {"B_envA", s.cube_table->b_env_a},
                       {"B_envB", s.cube_table->b_env_b}};
  }
  return j;
}

}  // namespace fgb
