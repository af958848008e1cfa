// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fgb/harness.hpp"
#include "oracles.hpp"

using namespace fgb;
namespace fs = std::filesystem;

namespace {

constexpr double kLpRelTol = 1e-6;
constexpr double kClosedFormRelTol = 1e-6;
constexpr double kBoundSlack = 1e-9;
constexpr double kStarSlack = 1e-6;
constexpr double kTableTol = 1e-3;
constexpr double kSlopeTarget = 0.5;
constexpr double kSlopeTol = 0.15;
constexpr double kSeparationRatio = 0.5;
// Measured phased/UCB-N ratio for criterion 10 on this code base.
constexpr double kPinnedSeparationRatio = 1.044080014;
constexpr double kPinnedRatioTol = 1e-8;
constexpr double kPhaseRegretShare = 0.9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

Instance from_gaps(const std::vector<double>& gaps, double top = 0.9) {
  std::vector<double> means;
  for (double d : gaps) means.push_back(top - d);
  return Instance(means);
}

// Phased-LP traces from criteria 10 and 11, reused by criterion 13.
struct RunLog {
  std::vector<RegretTrace> traces;
  std::vector<std::size_t> horizons;
};
RunLog g_runs;

Outcome lp_oracle_equivalence() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  double worst_rel = 0.0, worst_gap = 0.0;
  int bad = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    auto lp = oracle::random_covering_lp(rng, dim(rng), dim(rng));
    auto sol = solve_covering_lp(lp, 1e-9);
    const double ref = oracle::covering_lp_by_vertices(lp);
    const double rel = std::abs(sol.value - ref) / std::max(std::abs(ref), 1e-300);
    const double gap_rel = sol.gap() / std::max(sol.value, 1e-300);
    worst_rel = std::max(worst_rel, ref == 0.0 ? std::abs(sol.value) : rel);
    worst_gap = std::max(worst_gap, sol.value == 0.0 ? std::abs(sol.gap()) : gap_rel);
    if ((ref == 0.0 ? std::abs(sol.value) > 1e-12 : rel > kLpRelTol) ||
        sol.gap() > kLpRelTol * sol.value + 1e-12)
      ++bad;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {bad == 0 && secs < 10.0, "200 LPs, max rel err " + fmt(worst_rel) + ", max rel gap " + fmt(worst_gap) +
                                       ", failures " + std::to_string(bad) + ", " + fmt(secs, 3) + " s"};
}

Outcome bandit_closed_form() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = size(rng);
    Instance inst(oracle::random_means(rng, k));
    const double v = c_star(bandit_graph(k), inst).value;
    const double ref = oracle::bandit_c_star(inst.gaps());
    worst = std::max(worst, std::abs(v - ref) / ref);
  }
  return {worst <= kClosedFormRelTol, "100 instances, max rel err " + fmt(worst)};
}

Outcome full_information() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  int nonzero = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = size(rng);
    if (c_star(complete_graph(k), Instance(oracle::random_means(rng, k))).value != 0.0) ++nonzero;
  }
  return {nonzero == 0, "50 instances, nonzero c* " + std::to_string(nonzero)};
}

std::vector<FeedbackGraph> family_graphs_up_to_12() {
  std::vector<FeedbackGraph> out;
  for (std::size_t k = 1; k <= 12; ++k) {
    out.push_back(bandit_graph(k));
    out.push_back(complete_graph(k));
    if (k >= 2) out.push_back(star_graph(k));
    if (k >= 4) out.push_back(star_like_graph(k));
  }
  for (std::size_t k = 2; 2 * k + 1 <= 12; ++k) out.push_back(reinforced_wheel(k));
  out.push_back(cube_copies(1));
  return out;
}

Outcome independent_set_bound_holds() {
  std::mt19937_64 rng(9);
  auto graphs = family_graphs_up_to_12();
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::uniform_real_distribution<double> prob(0.1, 0.9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) graphs.push_back(erdos_renyi(size(rng), prob(rng), seed));
  int violations = 0, inexact = 0, checked = 0;
  double worst_excess = 0.0;
  std::string example;
  for (const auto& g : graphs) {
    Instance inst(oracle::random_means(rng, g.size()));
    const auto d = d_star(g, inst);
    const auto is = independent_set_bound(g, inst);
    ++checked;
    if (!is.exact) ++inexact;
    if (d.value > is.value + kBoundSlack) {
      ++violations;
      if (d.value - is.value > worst_excess) {
        worst_excess = d.value - is.value;
        example = "K=" + std::to_string(g.size()) + " d*=" + fmt(d.value) + " bound=" + fmt(is.value);
      }
    }
  }
  return {violations == 0 && inexact == 0,
          std::to_string(checked) + " graphs, violations " + std::to_string(violations) + ", inexact MIS " +
              std::to_string(inexact) + (example.empty() ? "" : ", worst " + example)};
}

Outcome star_condition_bound() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::size_t> star_size(3, 12);
  std::uniform_int_distribution<std::size_t> clique_count(1, 4);
  std::uniform_int_distribution<std::size_t> clique_size(1, 4);
  int violations = 0, checked = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    FeedbackGraph g;
    if (trial % 2 == 0) {
      g = star_graph(star_size(rng));
    } else {
      std::vector<std::size_t> sizes(clique_count(rng));
      for (auto& s : sizes) s = clique_size(rng);
      g = disjoint_cliques(sizes);
    }
    if (g.size() < 2 || !check_dstar_condition(g)) continue;
    Instance inst(oracle::random_means(rng, g.size()));
    const double d = d_star(g, inst).value;
    const double rhs = c_star(g, inst).value + static_cast<double>(inst.optimal_arms().size()) / *inst.delta_min();
    ++checked;
    if (d > rhs + kStarSlack) ++violations;
    worst_ratio = std::max(worst_ratio, d / rhs);
  }
  return {violations == 0 && checked >= 190, std::to_string(checked) + " instances, violations " +
                                                 std::to_string(violations) + ", max d*/(c*+|I*|/dmin) " +
                                                 fmt(worst_ratio)};
}

Outcome non_monotonic_profile() {
  std::vector<double> gaps(10, 0.2);
  gaps[0] = 0.5;
  gaps[9] = 0.0;
  const auto inst = from_gaps(gaps);
  const auto g = star_graph(10);
  const double d3 = d_lp2(g, inst, 3).value;
  const double d4 = d_lp2(g, inst, 4).value;
  const bool pinned = std::abs(d3 - 32.0) <= 1e-7 && std::abs(d4 - 16.0) <= 1e-7;
  return {d4 < d3 && pinned, "star K=10 (root gap .5, leaves .2, one optimal leaf): D(3)=" + fmt(d3) +
                                 " D(4)=" + fmt(d4)};
}

Outcome cube_table() {
  const auto t = cube_scenario_table(10, 0.1, 0.1);
  const double n = 10.0, d = 0.1, e = 0.1;
  const double ref[] = {n / (3 * d), n / ((1 + e) * d), 4 * n / (9 * d), 4 * n * e / ((1 + e) * (1 + e) * d)};
  const double got[] = {t.a_env_a, t.a_env_b, t.b_env_a, t.b_env_b};
  const double pinned[] = {33.333, 90.909, 44.444, 33.058};
  bool ok = true;
  for (int i = 0; i < 4; ++i) ok = ok && std::abs(got[i] - ref[i]) <= kTableTol && std::abs(got[i] - pinned[i]) <= kTableTol;
  return {ok, "(" + fmt(got[0]) + ", " + fmt(got[1]) + ", " + fmt(got[2]) + ", " + fmt(got[3]) + ")"};
}

Outcome clipping_factor() {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> size(3, 10);
  std::uniform_real_distribution<double> prob(0.1, 0.7);
  double lo = 1e300, hi = 0.0;
  int outside = 0, counted = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto g = erdos_renyi(size(rng), prob(rng), 1000 + trial);
    Instance inst(oracle::random_means(rng, g.size()));
    const double raw = c_star(g, inst).value;
    const double clipped = c_star(g, inst, true).value;
    if (raw == 0.0 && clipped == 0.0) continue;
    const double ratio = clipped / raw;
    ++counted;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (ratio < 0.5 - 1e-12 || ratio > 2.0 + 1e-12) ++outside;
  }
  return {outside == 0, std::to_string(counted) + " instances, clipped/raw in [" + fmt(lo) + ", " + fmt(hi) +
                            "], outside [1/2, 2]: " + std::to_string(outside)};
}

Outcome wheel_scaling() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> xs, ys;
  std::string values;
  for (std::size_t k : {16u, 81u, 256u}) {
    PaperParams p;
    p.k = k;
    p.delta = 0.05;
    p.nu = 0.9;
    p.variant = 2;
    const auto pi = paper_instance("reinforced_wheel_base", p);
    const double c = c_star(generate(pi.graph), pi.instance).value;
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(c));
    values += (values.empty() ? "" : ", ") + fmt(c);
  }
  const double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::abs(slope - kSlopeTarget) <= kSlopeTol && secs < 30.0,
          "c* = (" + values + "), slope " + fmt(slope) + ", " + fmt(secs, 3) + " s"};
}

ExperimentConfig base_config(const FeedbackGraph& g, const Instance& inst, std::size_t horizon,
                             std::size_t replicates, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.graph = g;
  cfg.instance = inst;
  cfg.params = AlgoConfig::demo(horizon);
  cfg.horizon = horizon;
  cfg.replicates = replicates;
  cfg.master_seed = seed;
  return cfg;
}

Outcome algorithm_separation() {
  const auto start = std::chrono::steady_clock::now();
  PaperParams p;
  p.k = 64;
  p.delta = 0.05;
  p.seed = 1;
  const auto pi = paper_instance("example1_star", p);
  const auto g = generate(pi.graph);
  const std::size_t T = 100000, R = 30;
  auto cfg = base_config(g, pi.instance, T, R, 2024);
  double phased = 0.0, ucbn = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    cfg.algo = Algorithm::phased_lp;
    auto t = run_replicate(cfg, r);
    phased += t.final_regret();
    g_runs.traces.push_back(std::move(t));
    g_runs.horizons.push_back(T);
    cfg.algo = Algorithm::ucbn;
    ucbn += run_replicate(cfg, r).final_regret();
  }
  phased /= R;
  ucbn /= R;
  const double ratio = phased / ucbn;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool regression = std::abs(ratio - kPinnedSeparationRatio) <= kPinnedRatioTol * kPinnedSeparationRatio;
  return {ratio <= kSeparationRatio && secs < 300.0,
          "mean Reg(T): phased_lp " + fmt(phased) + ", ucbn " + fmt(ucbn) + ", ratio " + fmt(ratio, 10) +
              " (target <= " + fmt(kSeparationRatio) + ", pinned " + fmt(kPinnedSeparationRatio, 10) +
              (regression ? " matches" : " MISMATCH") + "), " + fmt(secs, 3) + " s"};
}

Outcome per_phase_regret() {
  const auto g = bandit_graph(2);
  const Instance inst({0.75, 0.5});
  const std::size_t T = 250000, R = 50;
  auto cfg = base_config(g, inst, T, R, 77);
  const double c = c_star(g, inst).value;
  const double cap = 16.0 * cfg.params.alpha_prime * c;
  int inside = 0, total = 0;
  double worst = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    auto t = run_replicate(cfg, r);
    for (const auto& ph : t.phases) {
      if (!(phase_scale(ph.s) < *inst.delta_min())) continue;
      ++total;
      if (ph.regret <= cap) ++inside;
      worst = std::max(worst, ph.regret);
    }
    g_runs.traces.push_back(std::move(t));
    g_runs.horizons.push_back(T);
  }
  const double share = total ? static_cast<double>(inside) / total : 0.0;
  return {total > 0 && share >= kPhaseRegretShare,
          std::to_string(inside) + "/" + std::to_string(total) + " phase-replicate pairs within 16*a'*c* = " +
              fmt(cap) + " (share " + fmt(share) + ", worst " + fmt(worst) + ")"};
}

Outcome determinism(const std::string& cli) {
  const auto dir = fs::temp_directory_path() / "fgb_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string args =
      " simulate --graph star_like_ex2:k=8 --instance means:0.3,0.55,0.6,0.55,0.55,0.55,0.55,0.55"
      " --T 20000 --replicates 4 --seed 5 --workers 2 --format both --out ";
  for (const char* name : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\"" + args + "\"" + (dir / name).string() + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "simulate failed: " + cmd};
  }
  const bool csv = read_text_file(dir / "a.csv") == read_text_file(dir / "b.csv");
  const bool js = read_text_file(dir / "a.json") == read_text_file(dir / "b.json");
  const auto bytes = fs::file_size(dir / "a.csv") + fs::file_size(dir / "a.json");
  fs::remove_all(dir);
  return {csv && js, std::string("csv ") + (csv ? "identical" : "differ") + ", json " + (js ? "identical" : "differ") +
                         " (" + std::to_string(bytes) + " bytes)"};
}

Outcome rounding_discipline() {
  int violations = 0, arms = 0;
  double worst = 0.0;
  for (std::size_t r = 0; r < g_runs.traces.size(); ++r) {
    const auto& t = g_runs.traces[r];
    const double slack = std::ceil(std::log2(static_cast<double>(g_runs.horizons[r])));
    for (Arm i = 0; i < t.plays.size(); ++i) {
      double mass = 0.0;
      std::uint64_t plays = 0;
      for (const auto& ph : t.phases) {
        if (ph.initialization) continue;
        mass += ph.mass[i];
        plays += ph.played[i];
      }
      ++arms;
      const double excess = static_cast<double>(plays) - 3.0 * mass - slack;
      worst = std::max(worst, excess);
      if (excess > 0.0) ++violations;
    }
  }
  return {!g_runs.traces.empty() && violations == 0,
          std::to_string(g_runs.traces.size()) + " runs, " + std::to_string(arms) +
              " arm checks, violations " + std::to_string(violations) + ", max plays - (3*mass + ceil(log2 T)) " +
              fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = FGB_CLI_PATH;
  if (argc > 1) cli = argv[1];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"lp_oracle_equivalence", lp_oracle_equivalence},
      {"bandit_closed_form", bandit_closed_form},
      {"full_information_zero", full_information},
      {"independent_set_bound", independent_set_bound_holds},
      {"star_condition_bound", star_condition_bound},
      {"non_monotonic_profile", non_monotonic_profile},
      {"cube_table", cube_table},
      {"clipping_factor", clipping_factor},
      {"reinforced_wheel_scaling", wheel_scaling},
      {"algorithm_separation", algorithm_separation},
      {"per_phase_regret", per_phase_regret},
      {"determinism", [&] { return determinism(cli); }},
      {"rounding_discipline", rounding_discipline},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %-26s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
