#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fgb/algo.hpp"

using namespace fgb;

namespace {

// n_i predicted from per-arm play totals.
std::vector<std::uint64_t> observations_from_plays(const FeedbackGraph& g, const std::vector<std::uint64_t>& plays) {
  std::vector<std::uint64_t> n(g.size(), 0);
  for (Arm j = 0; j < g.size(); ++j)
    for (Arm i : g.neighbors(j)) n[i] += plays[j];
  return n;
}

double lp_mass(const RegretTrace& t, Arm i) {
  double m = 0.0;
  for (const auto& p : t.phases)
    if (!p.initialization) m += p.mass[i];
  return m;
}

std::uint64_t lp_plays(const RegretTrace& t, Arm i) {
  std::uint64_t n = 0;
  for (const auto& p : t.phases)
    if (!p.initialization) n += p.played[i];
  return n;
}

}  // namespace

TEST(Bonus, Value) {
  EXPECT_NEAR(confidence_log(8, 3), std::log(128.0), 1e-12);
  EXPECT_NEAR(confidence_bonus(1000, 3, 8, 4.0), 0.24129, 1e-5);
  EXPECT_NEAR(confidence_bonus(1000, 3, 8, 4.0), std::sqrt(12.0 * std::log(128.0) / 1000.0), 1e-15);
}

TEST(Bonus, Scaling) {
  EXPECT_NEAR(confidence_bonus(4000, 2, 5, 3.0), 0.5 * confidence_bonus(1000, 2, 5, 3.0), 1e-15);
  EXPECT_NEAR(confidence_bonus(50, 2, 5, 4.0), 2.0 * confidence_bonus(50, 2, 5, 1.0), 1e-15);
}

TEST(EmpiricalGaps, EqualMeansClipToScale) {
  auto d = empirical_gaps({0.5, 0.5, 0.5}, {0.1, 0.1, 0.1}, 2);
  for (double x : d) EXPECT_EQ(x, 0.25);
}

TEST(EmpiricalGaps, Formula) {
  auto d = empirical_gaps({0.9, 0.5}, {0.05, 0.05}, 3);
  EXPECT_DOUBLE_EQ(d[0], 0.125);
  EXPECT_NEAR(d[1], 0.3, 1e-12);
}

TEST(EmpiricalGaps, MonotoneInOwnBonus) {
  double previous = 1.0;
  for (double b = 0.0; b < 0.5; b += 0.05) {
    auto d = empirical_gaps({0.9, 0.5}, {0.05, b}, 4);
    EXPECT_LE(d[1], previous);
    EXPECT_GE(d[1], phase_scale(4));
    previous = d[1];
  }
}

TEST(EmpiricalGaps, UnobservedArmIsStateError) {
  AlgoState st(2);
  st.observe({0, 0.5});
  EXPECT_THROW(empirical_gaps(st, 1, 4.0), StateError);
  EXPECT_THROW(st.mean(1), StateError);
}

TEST(ActiveSet, BoundaryIsInclusive) {
  EXPECT_EQ(active_set({0.5, 0.5, 0.5}, 2), (VertexSet{0, 1, 2}));
  EXPECT_EQ(active_set({0.5, 0.5 + 1e-9, 0.25}, 2), (VertexSet{0, 2}));
}

TEST(BuildLP3, Thresholds) {
  auto lp = build_lp3(bandit_graph(2), {0.25, 0.25}, {0, 1}, 2, 3072.0);
  ASSERT_EQ(lp.rows.size(), 2u);
  const double expected = 3072.0 * std::log(16.0) * 16.0;
  EXPECT_NEAR(lp.rows[0].threshold, expected, 1e-6);
  EXPECT_NEAR(lp.rows[0].threshold, 136278.28, 0.01);
  EXPECT_NEAR(lp.rows[1].threshold, expected, 1e-6);

  auto excluded = build_lp3(bandit_graph(2), {0.125, 0.5}, {0}, 2, 3072.0);
  EXPECT_NEAR(excluded.rows[1].threshold, 12288.0, 1e-9);
  EXPECT_EQ(excluded.costs, (std::vector<double>{0.125, 0.5}));
}

TEST(BuildLP3, CompleteGraphRowsCoverEverything) {
  auto lp = build_lp3(complete_graph(4), {0.5, 0.5, 0.5, 0.5}, {0, 1, 2, 3}, 1, 8.0);
  for (const auto& row : lp.rows) EXPECT_EQ(row.vars, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(PhasePlan, CeilingForLargeEntries) {
  std::vector<double> buffer{0.7};
  EXPECT_EQ(phase_plan({2.3}, buffer), (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(buffer[0], 0.7);
}

TEST(PhasePlan, FirstFractionalPlays) {
  std::vector<double> buffer{0.0};
  EXPECT_EQ(phase_plan({0.4}, buffer), (std::vector<std::uint64_t>{1}));
  EXPECT_DOUBLE_EQ(buffer[0], 0.4);
}

TEST(PhasePlan, BufferCrossingTrace) {
  std::vector<double> buffer{0.0};
  std::vector<std::uint64_t> plays;
  for (int phase = 0; phase < 3; ++phase) plays.push_back(phase_plan({0.4}, buffer)[0]);
  EXPECT_EQ(plays, (std::vector<std::uint64_t>{1, 0, 1}));
  EXPECT_NEAR(buffer[0], 1.2, 1e-12);
}

TEST(PhasePlan, ZeroAndNegative) {
  std::vector<double> buffer{0.0, 0.0};
  EXPECT_EQ(phase_plan({0.0, 0.0}, buffer), (std::vector<std::uint64_t>{0, 0}));
  EXPECT_EQ(buffer, (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(phase_plan({-0.1, 0.0}, buffer), ParameterError);
  EXPECT_THROW(phase_plan({0.1}, buffer), ParameterError);
}

TEST(PhasePlan, ThreefoldBound) {
  std::vector<double> buffer{0.0};
  double mass = 0.0;
  std::uint64_t plays = 0;
  for (int phase = 0; phase < 200; ++phase) {
    const double x = 0.05 + 0.9 * std::fabs(std::sin(phase * 1.7));
    mass += x;
    plays += phase_plan({x}, buffer)[0];
    EXPECT_LE(static_cast<double>(plays), 3.0 * mass + 1.0);  // one play for the empty buffer
  }
}

TEST(Config, Checks) {
  EXPECT_NO_THROW(AlgoConfig::demo(10).check());
  EXPECT_TRUE(AlgoConfig::paper(10).theoretical());
  EXPECT_FALSE(AlgoConfig::demo(10).theoretical());
  AlgoConfig bad = AlgoConfig::demo(10);
  bad.alpha = 0.0;
  EXPECT_THROW(bad.check(), ConfigError);
  bad = AlgoConfig::demo(0);
  EXPECT_THROW(bad.check(), ConfigError);
}

TEST(RunAlgorithm, EqualMeansGiveZeroRegret) {
  auto t = run_algorithm(star_graph(5), Instance({0.5, 0.5, 0.5, 0.5, 0.5}), AlgoConfig::demo(3000), 1);
  ASSERT_EQ(t.cumulative.size(), 3000u);
  EXPECT_EQ(t.final_regret(), 0.0);
}

TEST(RunAlgorithm, Deterministic) {
  const auto g = erdos_renyi(6, 0.4, 2);
  const Instance inst({0.5, 0.4, 0.3, 0.45, 0.2, 0.35});
  auto a = run_algorithm(g, inst, AlgoConfig::demo(20000), 99);
  auto b = run_algorithm(g, inst, AlgoConfig::demo(20000), 99);
  EXPECT_EQ(a.cumulative, b.cumulative);
  EXPECT_EQ(a.plays, b.plays);
  auto c = run_algorithm(g, inst, AlgoConfig::demo(20000), 100);
  EXPECT_EQ(c.cumulative.size(), 20000u);
}

TEST(RunAlgorithm, TraceInvariants) {
  const auto g = star_like_graph(6);
  const Instance inst({0.3, 0.55, 0.6, 0.55, 0.55, 0.55});
  const std::size_t T = 50000;
  auto t = run_algorithm(g, inst, AlgoConfig::demo(T), 5);
  ASSERT_EQ(t.cumulative.size(), T);
  for (std::size_t i = 1; i < T; ++i) ASSERT_GE(t.cumulative[i], t.cumulative[i - 1]);
  EXPECT_LE(t.final_regret(), static_cast<double>(T) * inst.delta_max() + 1e-9);

  // counting identity
  EXPECT_EQ(t.observations, observations_from_plays(g, t.plays));

  // phases tile [1, T]; only the last may be truncated
  std::uint64_t next = 1;
  for (std::size_t p = 0; p < t.phases.size(); ++p) {
    EXPECT_EQ(t.phases[p].start, next);
    next = t.phases[p].end + 1;
    if (p + 1 < t.phases.size()) {
      EXPECT_FALSE(t.phases[p].truncated);
    }
  }
  EXPECT_EQ(next, T + 1);

  // initialisation phases come first and use the dominating set
  const auto dom = greedy_dominating_set(g);
  int init = 0;
  for (const auto& p : t.phases) init += p.initialization ? 1 : 0;
  EXPECT_GE(init, 1);
  EXPECT_LE(init, 4);  // s = 0..ceil(log2 6)
  for (Arm i = 0; i < g.size(); ++i)
    if (std::find(dom.begin(), dom.end(), i) == dom.end()) {
      EXPECT_EQ(t.phases[0].played[i], 0u);
    }

  // rounding discipline over the LP phases
  const double log_t = std::ceil(std::log2(static_cast<double>(T)));
  for (Arm i = 0; i < g.size(); ++i)
    EXPECT_LE(static_cast<double>(lp_plays(t, i)), 3.0 * lp_mass(t, i) + log_t);

  // estimates never fall below the phase scale
  for (const auto& p : t.phases)
    for (double d : p.gap_estimates) EXPECT_GE(d, phase_scale(p.s));
}

TEST(RunAlgorithm, InitialisationLength) {
  const auto g = bandit_graph(2);
  auto cfg = AlgoConfig::demo(1000000);
  auto t = run_algorithm(g, Instance({0.5, 0.25}), cfg, 3);
  ASSERT_GE(t.phases.size(), 3u);
  for (int s = 0; s <= 1; ++s) {
    const double expect = std::ceil(cfg.alpha_prime * std::log(2.0 * std::ldexp(1.0, s + 1)) * std::ldexp(1.0, 2 * s));
    EXPECT_TRUE(t.phases[s].initialization);
    EXPECT_EQ(t.phases[s].played[0], static_cast<std::uint64_t>(expect));
  }
  EXPECT_FALSE(t.phases[2].initialization);
}

TEST(RunAlgorithm, TruncatesAtHorizon) {
  auto t = run_algorithm(star_graph(4), Instance({0.3, 0.5, 0.4, 0.4}), AlgoConfig::paper(100), 1);
  ASSERT_EQ(t.cumulative.size(), 100u);
  ASSERT_EQ(t.phases.size(), 1u);
  EXPECT_TRUE(t.phases[0].truncated);
}

TEST(RunAlgorithm, InputErrors) {
  EXPECT_THROW(run_algorithm(bandit_graph(2), Instance({0.5, 0.4, 0.3}), AlgoConfig::demo(10), 0),
               ParameterError);
  EXPECT_THROW(run_algorithm(bandit_graph(2), Instance({0.5, 0.4}), AlgoConfig::demo(0), 0), ConfigError);
}

TEST(RunAlgorithm, GapSandwich) {
  // Two-arm bandit, gap 0.25: after every completed phase, with high
  // probability gap/2 v 2^-s <= estimate <= gap v 2^-s.
  const auto g = bandit_graph(2);
  const Instance inst({0.75, 0.5});
  AlgoConfig cfg{4.0, 64.0, 100000};
  std::map<int, std::pair<int, int>> hits;  // s -> (inside, total)
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto t = run_algorithm(g, inst, cfg, derive_seed(17, 0, seed));
    for (const auto& p : t.phases) {
      if (p.gap_estimates.empty()) continue;
      bool inside = true;
      for (Arm i = 0; i < 2; ++i) {
        const double lo = std::max(inst.gap(i) / 2.0, phase_scale(p.s));
        const double hi = std::max(inst.gap(i), phase_scale(p.s));
        inside = inside && p.gap_estimates[i] >= lo - 1e-12 && p.gap_estimates[i] <= hi + 1e-12;
      }
      hits[p.s].first += inside ? 1 : 0;
      hits[p.s].second += 1;
    }
  }
  ASSERT_GE(hits.size(), 3u);
  for (const auto& [s, h] : hits) {
    const double floor = 1.0 - 3.0 * std::pow(phase_scale(s / 2 + 1) / 2.0, cfg.alpha - 2.0) - 0.05;
    EXPECT_GE(static_cast<double>(h.first) / h.second, floor) << "phase " << s;
  }
}

TEST(UCBN, EqualMeansGiveZeroRegret) {
  auto t = run_ucbn(bandit_graph(4), Instance({0.4, 0.4, 0.4, 0.4}), 2000, 1);
  EXPECT_EQ(t.final_regret(), 0.0);
}

TEST(UCBN, UnobservedArmsFirst) {
  auto t = run_ucbn(bandit_graph(3), Instance({0.1, 0.2, 0.9}), 3, 1);
  EXPECT_EQ(t.plays, (std::vector<std::uint64_t>{1, 1, 1}));
  auto star = run_ucbn(star_graph(5), Instance({0.1, 0.2, 0.9, 0.3, 0.3}), 1, 1);
  EXPECT_EQ(star.plays[0], 1u);  // arm 0 is first and reveals every arm
}

TEST(UCBN, DeterministicAndCounting) {
  const auto g = erdos_renyi(7, 0.3, 4);
  const Instance inst({0.5, 0.4, 0.3, 0.45, 0.2, 0.35, 0.6});
  auto a = run_ucbn(g, inst, 5000, 8);
  auto b = run_ucbn(g, inst, 5000, 8);
  EXPECT_EQ(a.cumulative, b.cumulative);
  EXPECT_EQ(a.observations, observations_from_plays(g, a.plays));
}

TEST(UCBN, LearnsTheBestArm) {
  auto t = run_ucbn(bandit_graph(2), Instance({0.8, 0.3}), 20000, 2);
  EXPECT_GT(t.plays[0], 19000u);
}
