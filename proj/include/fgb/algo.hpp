#pragma once

// Phased LP learner with buffered rounding, plus the UCB-N baseline.
//
// Phases are indexed by s with scale 2^-s. Initialisation phases
// s = 0..ceil(log2 K) play a greedy dominating set; every later phase solves
// the empirical covering program built from the previous phase's gap
// estimates and plays its rounded solution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fgb/complexity.hpp"
#include "fgb/env.hpp"
#include "fgb/errors.hpp"
#include "fgb/graph.hpp"
#include "fgb/lp.hpp"

namespace fgb {

struct AlgoConfig {
  double alpha = 4.0;
  double alpha_prime = 3072.0;
  std::size_t horizon = 1;
  double lp_tol = kDefaultLPTolerance;
  // Round gap estimates down to powers of two before building each program.
  bool clip_gaps = false;

  // Constants under which the regret guarantee is stated.
  static AlgoConfig paper(std::size_t horizon) { return {4.0, 768.0 * 4.0, horizon}; }

  // Small constants for desk-scale runs. Not covered by any guarantee.
  static AlgoConfig demo(std::size_t horizon) { return {1.5, 8.0, horizon}; }

  bool theoretical() const { return alpha >= 3.0 && alpha_prime >= alpha; }

  void check() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha: must be positive");
    if (!(alpha_prime > 0.0) || !std::isfinite(alpha_prime))
      throw ConfigError("alpha_prime: must be positive");
    if (horizon < 1) throw ConfigError("T: horizon must be >= 1");
    if (!(lp_tol > 0.0)) throw ConfigError("lp_tol: must be positive");
  }
};

// log(K / 2^-(s+1)), natural log.
inline double confidence_log(std::size_t k, int s) {
  return std::log(static_cast<double>(k)) + static_cast<double>(s + 1) * std::log(2.0);
}

// sqrt(3 alpha log(K / 2^-(s+1)) / n). n must be positive.
inline double confidence_bonus(std::uint64_t n, int s, std::size_t k, double alpha) {
  return std::sqrt(3.0 * alpha * confidence_log(k, s) / static_cast<double>(n));
}

// Gap lower estimates from empirical means and bonuses:
//   max(2^-s, max_j (r_j - b_j) - r_i - b_i).
inline std::vector<double> empirical_gaps(const std::vector<double>& means,
                                          const std::vector<double>& bonuses, int s) {
  double lcb = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < means.size(); ++j) lcb = std::max(lcb, means[j] - bonuses[j]);
  std::vector<double> out(means.size());
  for (std::size_t i = 0; i < means.size(); ++i)
    out[i] = std::max(phase_scale(s), lcb - means[i] - bonuses[i]);
  return out;
}

// Per-run learner state.
struct AlgoState {
  int phase = 0;
  std::vector<std::uint64_t> counts;  // n_i: observations so far
  std::vector<double> sums;           // summed observed rewards
  std::vector<double> buffer;         // rounding buffer B
  std::vector<double> gap_estimates;  // estimates at the end of `phase`
  std::uint64_t t = 0;                // rounds played

  explicit AlgoState(std::size_t k = 0) : counts(k, 0), sums(k, 0.0), buffer(k, 0.0) {}

  std::size_t size() const { return counts.size(); }

  double mean(Arm i) const {
    if (counts[i] == 0) throw StateError("arm " + std::to_string(i) + " has not been observed");
    return sums[i] / static_cast<double>(counts[i]);
  }

  void observe(const Observation& o) {
    ++counts[o.arm];
    sums[o.arm] += o.reward;
  }
};

inline std::vector<double> bonuses(const AlgoState& st, int s, double alpha) {
  std::vector<double> out(st.size());
  for (Arm i = 0; i < st.size(); ++i) {
    if (st.counts[i] == 0) throw StateError("arm " + std::to_string(i) + " has not been observed");
    out[i] = confidence_bonus(st.counts[i], s, st.size(), alpha);
  }
  return out;
}

inline std::vector<double> empirical_gaps(const AlgoState& st, int s, double alpha) {
  std::vector<double> means(st.size());
  for (Arm i = 0; i < st.size(); ++i) means[i] = st.mean(i);
  return empirical_gaps(means, bonuses(st, s, alpha), s);
}

// Arms whose previous-phase estimate is at most 2 * 2^-s.
inline VertexSet active_set(const std::vector<double>& previous_gaps, int s) {
  VertexSet out;
  for (Arm i = 0; i < previous_gaps.size(); ++i)
    if (previous_gaps[i] <= 2.0 * phase_scale(s)) out.push_back(i);
  return out;
}

// Empirical phase program: costs are the previous estimates; active arms
// need alpha' log(K / 2^-(s+1)) / 4^-s observations, the others
// alpha' / estimate^2.
inline CoveringLP build_lp3(const FeedbackGraph& g, const std::vector<double>& previous_gaps,
                            const VertexSet& active, int s, double alpha_prime) {
  if (previous_gaps.size() != g.size()) throw ParameterError("gaps: size must equal vertex count");
  CoveringLP lp;
  lp.costs = previous_gaps;
  const double scale = phase_scale(s);
  const double active_threshold = alpha_prime * confidence_log(g.size(), s) / (scale * scale);
  std::vector<bool> is_active(g.size(), false);
  for (Arm i : active) is_active[i] = true;
  for (Arm i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    const double threshold =
        is_active[i] ? active_threshold : alpha_prime / (previous_gaps[i] * previous_gaps[i]);
    lp.rows.push_back({{nb.begin(), nb.end()}, threshold});
  }
  return lp;
}

// Integer play counts for one phase. Entries of at least one are rounded up.
// A fractional entry plays once when the buffer is empty or when adding it
// carries the buffer across an integer; it is then added to the buffer.
inline std::vector<std::uint64_t> phase_plan(const std::vector<double>& x, std::vector<double>& buffer) {
  if (buffer.size() != x.size()) throw ParameterError("buffer: size must match the solution");
  std::vector<std::uint64_t> plays(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0)) throw ParameterError("x[" + std::to_string(i) + "]: negative play mass");
    if (x[i] >= 1.0) {
      plays[i] = static_cast<std::uint64_t>(std::ceil(x[i]));
    } else if (x[i] > 0.0) {
      const double before = buffer[i];
      if (before == 0.0 || std::floor(before + x[i]) > std::floor(before)) plays[i] = 1;
      buffer[i] = before + x[i];
    }
  }
  return plays;
}

struct PhaseRecord {
  int s = 0;
  bool initialization = false;
  bool truncated = false;
  std::uint64_t start = 0;  // first round (1-based)
  std::uint64_t end = 0;    // last round played (tau_s); start-1 if none
  double lp_value = 0.0;
  double duality_gap = 0.0;
  LPStatus lp_status = LPStatus::optimal;
  std::vector<double> mass;              // LP solution (empty for init phases)
  std::vector<std::uint64_t> planned;    // planned plays per arm
  std::vector<std::uint64_t> played;     // executed plays per arm
  double regret = 0.0;                   // pseudo-regret accrued in the phase
  std::vector<double> gap_estimates;     // estimates at phase end; empty if truncated
};

struct RegretTrace {
  std::uint64_t seed = 0;
  std::vector<double> cumulative;        // cumulative[t-1] = Reg(t)
  std::vector<PhaseRecord> phases;
  std::vector<std::uint64_t> plays;      // per arm, whole run
  std::vector<std::uint64_t> observations;  // n_i at the end of the run

  double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

namespace detail {

// Plays one arm for one round, updating the state and the trace.
class Runner {
 public:
  Runner(const FeedbackGraph& g, const Instance& inst, std::uint64_t horizon, std::uint64_t seed,
         RegretTrace& trace)
      : g_(g), inst_(inst), horizon_(horizon), stream_(seed), trace_(trace) {
    trace_.seed = seed;
    trace_.cumulative.reserve(horizon);
    trace_.plays.assign(g.size(), 0);
  }

  bool done() const { return trace_.cumulative.size() >= horizon_; }

  template <typename Observe>
  void play(Arm arm, Observe&& observe) {
    buffer_.clear();
    sample_round(g_, inst_, arm, stream_, buffer_);
    for (const auto& o : buffer_) observe(o);
    regret_ += inst_.gap(arm);
    trace_.cumulative.push_back(regret_);
    ++trace_.plays[arm];
  }

  std::uint64_t t() const { return trace_.cumulative.size(); }

 private:
  const FeedbackGraph& g_;
  const Instance& inst_;
  std::uint64_t horizon_;
  RewardStream stream_;
  RegretTrace& trace_;
  std::vector<Observation> buffer_;
  double regret_ = 0.0;
};

inline void check_run_inputs(const FeedbackGraph& g, const Instance& inst) {
  if (g.size() != inst.size()) throw ParameterError("instance: arm count does not match graph size");
  auto problems = validate(g);
  if (!problems.empty()) throw ParameterError("graph: " + problems.front());
}

inline int ceil_log2(std::size_t k) {
  int s = 0;
  while ((std::size_t{1} << s) < k) ++s;
  return s;
}

}  // namespace detail

inline RegretTrace run_algorithm(const FeedbackGraph& g, const Instance& inst,
                                 const AlgoConfig& cfg, std::uint64_t seed) {
  detail::check_run_inputs(g, inst);
  cfg.check();
  const std::size_t k = g.size();
  RegretTrace trace;
  detail::Runner runner(g, inst, cfg.horizon, seed, trace);
  AlgoState st(k);
  auto observe = [&st](const Observation& o) { st.observe(o); };

  auto run_phase = [&](PhaseRecord& rec) {
    rec.start = runner.t() + 1;
    rec.played.assign(k, 0);
    const double before = runner.t() ? trace.cumulative.back() : 0.0;
    for (Arm i = 0; i < k && !rec.truncated; ++i) {
      for (std::uint64_t n = 0; n < rec.planned[i]; ++n) {
        if (runner.done()) {
          rec.truncated = true;
          break;
        }
        runner.play(i, observe);
        ++rec.played[i];
      }
    }
    rec.end = runner.t();
    rec.regret = (runner.t() ? trace.cumulative.back() : 0.0) - before;
  };

  auto finish_phase = [&](int s) {
    st.phase = s;
    st.t = runner.t();
    st.gap_estimates = empirical_gaps(st, s, cfg.alpha);
    if (cfg.clip_gaps) st.gap_estimates = clip_to_powers_of_two(st.gap_estimates);
    trace.phases.back().gap_estimates = st.gap_estimates;
  };

  const VertexSet dominating = greedy_dominating_set(g);
  const int init_last = detail::ceil_log2(k);
  int s = 0;
  for (; s <= init_last && !runner.done(); ++s) {
    PhaseRecord rec;
    rec.s = s;
    rec.initialization = true;
    rec.planned.assign(k, 0);
    const double scale = phase_scale(s);
    const auto rounds = static_cast<std::uint64_t>(
        std::ceil(cfg.alpha_prime * confidence_log(k, s) / (scale * scale)));
    for (Arm v : dominating) rec.planned[v] = rounds;
    run_phase(rec);
    trace.phases.push_back(std::move(rec));
    if (!runner.done()) finish_phase(s);
  }

  CoveringLPSolver solver;
  for (; !runner.done(); ++s) {
    // The dominating set has revealed every arm at least once by now.
    const auto active = active_set(st.gap_estimates, s);
    const auto lp = build_lp3(g, st.gap_estimates, active, s, cfg.alpha_prime);
    const auto sol = solver.solve(lp, cfg.lp_tol);

    PhaseRecord rec;
    rec.s = s;
    rec.lp_value = sol.value;
    rec.duality_gap = sol.gap();
    rec.lp_status = sol.status;
    rec.mass = sol.primal;
    rec.planned = phase_plan(sol.primal, st.buffer);
    run_phase(rec);
    trace.phases.push_back(std::move(rec));
    if (!runner.done()) finish_phase(s);
  }

  trace.observations = st.counts;
  return trace;
}

// UCB-N: index mean + sqrt(2 ln t / n); every neighbour of the played arm
// is updated. Unobserved arms go first, ties to the smallest index.
inline RegretTrace run_ucbn(const FeedbackGraph& g, const Instance& inst, std::size_t horizon,
                            std::uint64_t seed) {
  detail::check_run_inputs(g, inst);
  if (horizon < 1) throw ConfigError("T: horizon must be >= 1");
  const std::size_t k = g.size();
  RegretTrace trace;
  detail::Runner runner(g, inst, horizon, seed, trace);
  AlgoState st(k);
  auto observe = [&st](const Observation& o) { st.observe(o); };

  while (!runner.done()) {
    const double log_t = std::log(static_cast<double>(runner.t() + 1));
    Arm pick = k;
    double best = -std::numeric_limits<double>::infinity();
    for (Arm i = 0; i < k; ++i) {
      if (st.counts[i] == 0) {
        pick = i;
        break;
      }
      const double n = static_cast<double>(st.counts[i]);
      const double index = st.sums[i] / n + std::sqrt(2.0 * log_t / n);
      if (index > best) {
        best = index;
        pick = i;
      }
    }
    runner.play(pick, observe);
  }
  trace.observations = st.counts;
  return trace;
}

}  // namespace fgb
