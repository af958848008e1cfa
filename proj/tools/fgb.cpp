// fgb: analyze / simulate / scenario / lp
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fgb/harness.hpp"

namespace fs = std::filesystem;
using namespace fgb;

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

struct Inputs {
  FeedbackGraph graph;
  Instance instance;
  std::string graph_desc;
  std::string instance_desc;
};

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ConfigError("instance: cannot parse mean '" + item + "'");
    }
  }
  return out;
}

// Graph: JSON file or generator spec. Instance: JSON file,
// "means:0.5,0.4,..." or a named construction "example1_star:k=8,delta=0.1"
// (which also supplies the graph when --graph is absent).
Inputs resolve_inputs(const std::string& graph_arg, const std::string& instance_arg, double sigma) {
  Inputs in;
  std::optional<FeedbackGraph> graph;
  if (!graph_arg.empty()) {
    in.graph_desc = graph_arg;
    graph = fs::is_regular_file(graph_arg) ? graph_from_json(json::parse(read_text_file(graph_arg)))
                                           : generate(parse_graph_spec(graph_arg));
  }
  if (instance_arg.empty()) throw ConfigError("instance: missing");
  in.instance_desc = instance_arg;
  const auto colon = instance_arg.find(':');
  const std::string head = instance_arg.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : instance_arg.substr(colon + 1);
  if (fs::is_regular_file(instance_arg)) {
    in.instance = instance_from_json(json::parse(read_text_file(instance_arg)));
  } else if (head == "means") {
    in.instance = Instance(parse_number_list(tail), sigma);
  } else if (is_paper_instance_name(head)) {
    auto pi = paper_instance(head, parse_paper_params(tail), sigma);
    in.instance = pi.instance;
    if (!graph) {
      graph = generate(pi.graph);
      in.graph_desc = to_string(pi.graph);
    }
  } else {
    throw ConfigError("instance: '" + instance_arg + "' is neither a file, a means list nor a known construction");
  }
  if (!graph) throw ConfigError("graph: missing");
  in.graph = std::move(*graph);
  if (in.graph.size() != in.instance.size())
    throw ConfigError("instance: arm count does not match the graph");
  return in;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("FGB_WORKERS")) {
    try {
      return std::max<std::size_t>(1, std::stoul(env));
    } catch (const std::logic_error&) {
      throw ConfigError("FGB_WORKERS: not a positive integer");
    }
  }
  return 1;
}

void write_outputs(const AggregateResult& res, const std::string& format, const std::string& out,
                   bool chart) {
  if (format != "csv" && format != "json" && format != "both")
    throw ConfigError("format: must be csv, json or both");
  if (out.empty()) {
    std::cout << (format == "json" ? dump(to_json(res)) : to_csv(res));
    return;
  }
  if (format != "json") emit(res, OutputFormat::csv, out + ".csv");
  if (format != "csv") emit(res, OutputFormat::json, out + ".json");
  if (chart) write_text_file(out + ".chart.json", dump(chart_description(out + ".csv", res.scenario)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic online learning with feedback graphs: complexities and simulation"};
  app.require_subcommand(1);

  std::string graph_arg;
  std::string instance_arg;
  double sigma = kDefaultSigma;
  bool clip_gaps = false;
  std::string out;
  std::string format = "both";

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute c*, the phase profile, d* and the independent-set bound");
  analyze_cmd->add_option("--graph", graph_arg, "Graph spec (kind:k=..) or JSON file");
  analyze_cmd->add_option("--instance", instance_arg, "Instance JSON file, means:..., or named construction")->required();
  analyze_cmd->add_option("--sigma", sigma, "Reward noise standard deviation");
  analyze_cmd->add_flag("--clip-gaps", clip_gaps, "Round gaps down to powers of two");
  analyze_cmd->add_option("--out", out, "Write the report here instead of stdout");

  // simulate
  std::string config_path;
  std::string algo = "phased_lp";
  std::size_t horizon = 10000;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double alpha_prime = 0.0;
  std::size_t workers = 1;
  std::string profile = "demo";
  std::string scenario_label = "custom";
  bool chart = false;
  auto* sim = app.add_subcommand("simulate", "Run replicated experiments and write CSV/JSON");
  sim->add_option("--config", config_path, "JSON config file; flags override its values");
  auto* o_graph = sim->add_option("--graph", graph_arg, "Graph spec or JSON file");
  auto* o_inst = sim->add_option("--instance", instance_arg, "Instance JSON file, means:..., or named construction");
  auto* o_sigma = sim->add_option("--sigma", sigma, "Reward noise standard deviation");
  auto* o_algo = sim->add_option("--algo", algo, "phased_lp or ucbn");
  auto* o_T = sim->add_option("--T", horizon, "Horizon");
  auto* o_R = sim->add_option("--replicates", replicates, "Replicate count");
  auto* o_seed = sim->add_option("--seed", seed, "Master seed");
  auto* o_out = sim->add_option("--out", out, "Output path prefix (<out>.csv, <out>.json)");
  auto* o_format = sim->add_option("--format", format, "csv, json or both");
  auto* o_clip = sim->add_flag("--clip-gaps", clip_gaps, "Round gap estimates down to powers of two");
  auto* o_alpha = sim->add_option("--alpha", alpha, "Confidence exponent");
  auto* o_alpha_prime = sim->add_option("--alpha-prime", alpha_prime, "Constraint multiplier");
  auto* o_workers = sim->add_option("--workers", workers, "Worker threads (default $FGB_WORKERS or 1)");
  auto* o_profile = sim->add_option("--profile", profile, "paper or demo");
  auto* o_label = sim->add_option("--scenario-label", scenario_label, "Value of the scenario column");
  sim->add_flag("--chart", chart, "Also write <out>.chart.json");

  // scenario
  std::string scenario_name;
  std::string scenario_overrides;
  ScenarioOptions sopt;
  auto* scen = app.add_subcommand("scenario", "Run a named preset end to end");
  scen->add_option("name", scenario_name, "example1_star, example2_starlike, reinforced_wheel, cube")->required();
  scen->add_option("--params", scenario_overrides, "key=value overrides, e.g. k=32,delta=0.1");
  scen->add_option("--T", sopt.horizon, "Horizon");
  scen->add_option("--replicates", sopt.replicates, "Replicate count");
  scen->add_option("--seed", sopt.master_seed, "Master seed");
  auto* s_workers = scen->add_option("--workers", sopt.workers, "Worker threads");
  scen->add_option("--profile", sopt.profile, "paper or demo");
  scen->add_flag("--clip-gaps", sopt.clip_gaps, "Round gaps down to powers of two");
  scen->add_option("--out", out, "Write the bundle JSON here instead of stdout");

  // lp
  std::string lp_path;
  double tol = kDefaultLPTolerance;
  auto* lp_cmd = app.add_subcommand("lp", "Solve a covering LP from JSON and print its certificate");
  lp_cmd->add_option("file", lp_path, "LP JSON file")->required();
  lp_cmd->add_option("--tol", tol, "Relative duality-gap tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*analyze_cmd) {
      const auto in = resolve_inputs(graph_arg, instance_arg, sigma);
      const auto report = analyze(in.graph, in.instance, clip_gaps);
      json j = report_to_json(report);
      j["graph"] = in.graph_desc;
      j["instance"] = in.instance_desc;
      if (out.empty()) std::cout << dump(j);
      else write_text_file(out, dump(j));
    } else if (*sim) {
      // Precedence: built-in defaults < profile < config file < flags.
      json file;
      if (!config_path.empty()) file = json::parse(read_text_file(config_path));
      auto pick = [&](CLI::Option* flag, const char* key, auto& value) {
        if (flag->count() == 0 && file.contains(key)) file.at(key).get_to(value);
      };
      pick(o_graph, "graph", graph_arg);
      pick(o_inst, "instance", instance_arg);
      pick(o_sigma, "sigma", sigma);
      pick(o_algo, "algo", algo);
      pick(o_T, "T", horizon);
      pick(o_R, "replicates", replicates);
      pick(o_seed, "seed", seed);
      pick(o_out, "out", out);
      pick(o_format, "format", format);
      pick(o_clip, "clip_gaps", clip_gaps);
      pick(o_profile, "profile", profile);
      pick(o_label, "scenario", scenario_label);
      pick(o_alpha, "alpha", alpha);
      pick(o_alpha_prime, "alpha_prime", alpha_prime);
      if (o_workers->count() == 0) {
        workers = default_workers();
        if (file.contains("workers")) file.at("workers").get_to(workers);
      }

      ExperimentConfig cfg;
      const auto in = resolve_inputs(graph_arg, instance_arg, sigma);
      cfg.graph = in.graph;
      cfg.instance = in.instance;
      cfg.graph_desc = in.graph_desc;
      cfg.instance_desc = in.instance_desc;
      cfg.algo = parse_algorithm(algo);
      cfg.scenario = scenario_label;
      cfg.profile = profile;
      cfg.params = profile_config(profile, horizon);
      if (alpha > 0.0) cfg.params.alpha = alpha;
      if (alpha_prime > 0.0) cfg.params.alpha_prime = alpha_prime;
      cfg.params.clip_gaps = clip_gaps;
      cfg.horizon = horizon;
      cfg.replicates = replicates;
      cfg.master_seed = seed;
      cfg.workers = workers;
      if (file.contains("grid")) file.at("grid").get_to(cfg.grid);
      write_outputs(run_experiment(cfg), format, out, chart);
    } else if (*scen) {
      if (s_workers->count() == 0) sopt.workers = default_workers();
      const auto result = scenario(scenario_name, scenario_overrides, sopt);
      const auto j = scenario_to_json(result);
      if (out.empty()) std::cout << dump(j);
      else write_text_file(out, dump(j));
    } else if (*lp_cmd) {
      const auto lp = lp_from_json(json::parse(read_text_file(lp_path)));
      const auto sol = solve_covering_lp(lp, tol);
      json j = solution_to_json(sol);
      j["certified_gap"] = weak_duality_gap(lp, sol, tol);
      std::cout << dump(j);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ModelError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
  return 0;
}
