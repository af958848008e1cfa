#pragma once

// Instance complexities: the asymptotic constant c*, the per-phase values
// D(s) of the phase program, their maximum d* over the early phases, and the
// independent-set upper bound on d*.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fgb/env.hpp"
#include "fgb/errors.hpp"
#include "fgb/graph.hpp"
#include "fgb/lp.hpp"

namespace fgb {

// Largest power of two not exceeding each positive gap; zeros stay zero.
inline std::vector<double> clip_to_powers_of_two(const std::vector<double>& gaps) {
  std::vector<double> out(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] <= 0.0) continue;
    int e = 0;
    std::frexp(gaps[i], &e);  // gaps[i] = m * 2^e, m in [0.5, 1)
    out[i] = std::ldexp(1.0, e - 1);
  }
  return out;
}

// The gap vector a computation should use.
inline std::vector<double> working_gaps(const Instance& inst, bool clip) {
  return clip ? clip_to_powers_of_two(inst.gaps()) : inst.gaps();
}

// Phase grid over a horizon: scale 2^-s, clipped gaps, and the set of arms
// still indistinguishable from optimal at that scale.
struct PhaseSchedule {
  std::size_t horizon = 1;

  int phase_count() const {
    int s = 0;
    while (std::ldexp(1.0, s) < static_cast<double>(horizon)) ++s;
    return s;
  }

  static double scale(int s) { return phase_scale(s); }

  static std::vector<double> clipped(const std::vector<double>& gaps, int s) {
    std::vector<double> out(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) out[i] = std::max(scale(s), gaps[i]);
    return out;
  }

  static VertexSet active(const std::vector<double>& gaps, int s) {
    VertexSet out;
    for (Arm i = 0; i < gaps.size(); ++i)
      if (gaps[i] <= 2.0 * scale(s)) out.push_back(i);
    return out;
  }
};

struct ProgramValue {
  double value = 0.0;
  std::vector<double> primal;
  double dual_value = 0.0;
  LPStatus status = LPStatus::optimal;

  double duality_gap() const { return value - dual_value; }
};

namespace detail {

inline ProgramValue solve_program(const CoveringLP& lp, double tol) {
  ProgramValue out;
  if (lp.rows.empty()) {
    out.primal.assign(lp.variables(), 0.0);
    return out;
  }
  auto sol = solve_covering_lp(lp, tol);
  out.value = sol.value;
  out.primal = std::move(sol.primal);
  out.dual_value = sol.dual_value;
  out.status = sol.status;
  return out;
}

inline void check_sizes(const FeedbackGraph& g, const Instance& inst) {
  if (g.size() != inst.size())
    throw ParameterError("instance: arm count " + std::to_string(inst.size()) +
                         " does not match graph size " + std::to_string(g.size()));
}

}  // namespace detail

// min <x, gaps> s.t. sum_{j in N_i} x_j >= 1/gap_i^2 for every suboptimal i.
inline CoveringLP asymptotic_program(const FeedbackGraph& g, const std::vector<double>& gaps) {
  CoveringLP lp;
  lp.costs = gaps;
  for (Arm i = 0; i < g.size(); ++i) {
    if (gaps[i] <= 0.0) continue;
    const auto nb = g.neighbors(i);
    lp.rows.push_back({{nb.begin(), nb.end()}, 1.0 / (gaps[i] * gaps[i])});
  }
  return lp;
}

// min <x, clipped gaps> s.t. sum_{j in N_i} x_j >= 4^s for every i with
// gap_i <= 2 * 2^-s.
inline CoveringLP phase_program(const FeedbackGraph& g, const std::vector<double>& gaps, int s) {
  CoveringLP lp;
  lp.costs = PhaseSchedule::clipped(gaps, s);
  const double threshold = 1.0 / (PhaseSchedule::scale(s) * PhaseSchedule::scale(s));
  for (Arm i : PhaseSchedule::active(gaps, s)) {
    const auto nb = g.neighbors(i);
    lp.rows.push_back({{nb.begin(), nb.end()}, threshold});
  }
  return lp;
}

inline ProgramValue c_star(const FeedbackGraph& g, const Instance& inst, bool clip_gaps = false,
                           double tol = kDefaultLPTolerance) {
  detail::check_sizes(g, inst);
  return detail::solve_program(asymptotic_program(g, working_gaps(inst, clip_gaps)), tol);
}

inline ProgramValue d_lp2(const FeedbackGraph& g, const Instance& inst, int s,
                          bool clip_gaps = false, double tol = kDefaultLPTolerance) {
  detail::check_sizes(g, inst);
  if (s < 1) throw ParameterError("s: phase index must be >= 1");
  return detail::solve_program(phase_program(g, working_gaps(inst, clip_gaps), s), tol);
}

// floor(log2(|I*| / gap_min)), at least 1. Zero when no arm is suboptimal.
inline int dstar_last_phase(std::size_t optimal_count, std::optional<double> gap_min) {
  if (!gap_min) return 0;
  const double ratio = static_cast<double>(optimal_count) / *gap_min;
  int s = static_cast<int>(std::floor(std::log2(ratio)));
  while (std::ldexp(1.0, s + 1) <= ratio) ++s;
  while (s > 0 && std::ldexp(1.0, s) > ratio) --s;
  return std::max(1, s);
}

struct DStarResult {
  double value = 0.0;
  int argmax_s = 0;                 // 0 when no phase is evaluated
  std::vector<double> profile;      // profile[s-1] = D(s)
  std::vector<double> duality_gaps; // one per evaluated phase
};

inline DStarResult d_star(const FeedbackGraph& g, const Instance& inst, bool clip_gaps = false,
                          double tol = kDefaultLPTolerance) {
  detail::check_sizes(g, inst);
  const auto gaps = working_gaps(inst, clip_gaps);
  std::optional<double> gap_min;
  for (double x : gaps)
    if (x > 0.0 && (!gap_min || x < *gap_min)) gap_min = x;
  DStarResult out;
  const int last = dstar_last_phase(inst.optimal_arms().size(), gap_min);
  for (int s = 1; s <= last; ++s) {
    const auto v = detail::solve_program(phase_program(g, gaps, s), tol);
    out.profile.push_back(v.value);
    out.duality_gaps.push_back(v.duality_gap());
    if (s == 1 || v.value > out.value) {
      out.value = v.value;
      out.argmax_s = s;
    }
  }
  return out;
}

struct IndependentSetBound {
  double value = 0.0;
  VertexSet set;
  bool exact = true;
};

// Max over independent sets of the summed inverse gaps; optimal arms weigh 0.
inline IndependentSetBound independent_set_bound(const FeedbackGraph& g, const Instance& inst,
                                                 bool clip_gaps = false) {
  detail::check_sizes(g, inst);
  const auto gaps = working_gaps(inst, clip_gaps);
  std::vector<double> weights(gaps.size(), 0.0);
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] > 0.0) weights[i] = 1.0 / gaps[i];
  auto mis = max_weight_independent_set(g, weights);
  return {mis.weight, std::move(mis.vertices), mis.exact};
}

// Lower-bound value over the perturbation class around `inst` at phase s.
// Requires every optimal mean to be at most 1 - 2 * 2^-s.
inline ProgramValue confusing_value(const FeedbackGraph& g, const Instance& inst, int s,
                                    bool clip_gaps = false, double tol = kDefaultLPTolerance) {
  if (s < 1) throw ParameterError("s: phase index must be >= 1");
  const double limit = 1.0 - 2.0 * phase_scale(s);
  for (Arm i : inst.optimal_arms())
    if (inst.mean(i) > limit + kOptimalTolerance)
      throw PreconditionError("means[" + std::to_string(i) + "]: optimal mean " +
                              std::to_string(inst.mean(i)) + " exceeds 1 - 2*2^-s = " +
                              std::to_string(limit));
  return d_lp2(g, inst, s, clip_gaps, tol);
}

// Expected regret of the two canonical strategies in the two cube
// environments.
struct CubeTable {
  double a_env_a = 0.0;
  double a_env_b = 0.0;
  double b_env_a = 0.0;
  double b_env_b = 0.0;
};

inline CubeTable cube_scenario_table(std::size_t n, double delta, double eps) {
  if (n < 1) throw ParameterError("n: needs at least one cube copy");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta: must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps: must lie in (0,1)");
  const double nd = static_cast<double>(n);
  const double onep = 1.0 + eps;
  return {nd / (3.0 * delta), nd / (onep * delta), 4.0 * nd / (9.0 * delta),
          4.0 * nd * eps / (onep * onep * delta)};
}

struct ComplexityReport {
  ProgramValue c_star;
  DStarResult d_star;
  IndependentSetBound is_bound;
  bool star_condition = false;
  bool clip_gaps = false;
};

inline ComplexityReport analyze(const FeedbackGraph& g, const Instance& inst, bool clip_gaps = false,
                                double tol = kDefaultLPTolerance) {
  ComplexityReport r;
  r.clip_gaps = clip_gaps;
  r.c_star = c_star(g, inst, clip_gaps, tol);
  r.d_star = d_star(g, inst, clip_gaps, tol);
  r.is_bound = independent_set_bound(g, inst, clip_gaps);
  r.star_condition = check_dstar_condition(g);
  return r;
}

}  // namespace fgb
