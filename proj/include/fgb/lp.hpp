#pragma once

// Nonnegative covering programs
//
//     min  <c, x>   s.t.  sum_{j in S_r} x_j >= b_r  for every row r,  x >= 0
//
// with c >= 0 and b > 0. The solver runs a dense simplex on the dual packing
// program (max <b, y> s.t. sum_{r : j in S_r} y_r <= c_j, y >= 0), whose slack
// basis is feasible from the start, and reads the covering solution off the
// simplex multipliers. Every solution therefore carries its own lower-bound
// certificate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fgb/errors.hpp"

namespace fgb {

struct CoveringRow {
  std::vector<std::size_t> vars;  // S_r, nonempty
  double threshold = 1.0;         // b_r, finite and > 0
};

struct CoveringLP {
  std::vector<double> costs;  // c, one per variable
  std::vector<CoveringRow> rows;

  std::size_t variables() const { return costs.size(); }
};

enum class LPStatus { optimal, approximate };

struct LPSolution {
  std::vector<double> primal;  // x
  double value = 0.0;          // <c, x>
  std::vector<double> dual;    // y, one per row
  double dual_value = 0.0;     // <b, y>
  LPStatus status = LPStatus::optimal;
  std::size_t iterations = 0;

  double gap() const { return value - dual_value; }
};

inline constexpr double kDefaultLPTolerance = 1e-7;

inline void check_model(const CoveringLP& lp) {
  const std::size_t k = lp.variables();
  if (k == 0) throw ModelError("costs: a covering LP needs at least one variable");
  for (std::size_t j = 0; j < k; ++j)
    if (!std::isfinite(lp.costs[j]) || lp.costs[j] < 0.0)
      throw ModelError("costs[" + std::to_string(j) + "]: must be finite and nonnegative");
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    if (row.vars.empty()) throw ModelError("rows[" + std::to_string(r) + "]: empty index set");
    if (!std::isfinite(row.threshold) || row.threshold <= 0.0)
      throw ModelError("rows[" + std::to_string(r) + "]: threshold must be finite and positive");
    for (std::size_t j : row.vars)
      if (j >= k) throw ModelError("rows[" + std::to_string(r) + "]: variable index out of range");
  }
}

inline double row_coverage(const CoveringRow& row, std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t j : row.vars) sum += x[j];
  return sum;
}

// x >= 0 and every row covered up to the multiplicative slack.
inline bool verify_feasible(const CoveringLP& lp, std::span<const double> x, double slack_tol) {
  if (x.size() != lp.variables()) throw ModelError("x: dimension does not match the LP");
  for (double v : x)
    if (!(v >= 0.0)) return false;
  for (const auto& row : lp.rows)
    if (row_coverage(row, x) < row.threshold * (1.0 - slack_tol)) return false;
  return true;
}

// Every variable's dual load stays below its cost up to the relative slack.
inline bool verify_dual_feasible(const CoveringLP& lp, std::span<const double> y, double slack_tol) {
  if (y.size() != lp.rows.size()) throw ModelError("y: dimension does not match the LP rows");
  std::vector<double> load(lp.variables(), 0.0);
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    if (!(y[r] >= 0.0)) return false;
    for (std::size_t j : lp.rows[r].vars) load[j] += y[r];
  }
  for (std::size_t j = 0; j < lp.variables(); ++j)
    if (load[j] > lp.costs[j] * (1.0 + slack_tol)) return false;
  return true;
}

inline double primal_value(const CoveringLP& lp, std::span<const double> x) {
  double v = 0.0;
  for (std::size_t j = 0; j < lp.variables(); ++j) v += lp.costs[j] * x[j];
  return v;
}

inline double dual_objective(const CoveringLP& lp, std::span<const double> y) {
  double v = 0.0;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) v += lp.rows[r].threshold * y[r];
  return v;
}

// value - dual_value for a certified pair. Throws CertificateError when either
// side is infeasible.
inline double weak_duality_gap(const CoveringLP& lp, const LPSolution& sol,
                               double tol = kDefaultLPTolerance) {
  check_model(lp);
  if (!verify_feasible(lp, sol.primal, tol)) throw CertificateError("primal solution is infeasible");
  if (!verify_dual_feasible(lp, sol.dual, tol)) throw CertificateError("dual solution is infeasible");
  return primal_value(lp, sol.primal) - dual_objective(lp, sol.dual);
}

// Holds the tableau between solves; one solve at a time per instance.
class CoveringLPSolver {
 public:
  LPSolution solve(const CoveringLP& lp, double tol = kDefaultLPTolerance) {
    check_model(lp);
    const std::size_t k = lp.variables();
    const std::size_t m = lp.rows.size();

    LPSolution sol;
    sol.primal.assign(k, 0.0);
    sol.dual.assign(m, 0.0);
    if (m == 0) return sol;

    double b_max = 0.0;
    for (const auto& row : lp.rows) b_max = std::max(b_max, row.threshold);
    double c_max = *std::max_element(lp.costs.begin(), lp.costs.end());
    const double c_scale = c_max > 0.0 ? c_max : 1.0;

    // Tableau rows 0..k-1 are the packing constraints (one per covering
    // variable); row k is the objective. Columns 0..m-1 are y, m..m+k-1 the
    // slacks, the last one the right-hand side.
    rows_ = k + 1;
    cols_ = m + k + 1;
    tab_.assign(rows_ * cols_, 0.0);
    basis_.resize(k);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j : lp.rows[r].vars) at(j, r) = 1.0;
      at(k, r) = -lp.rows[r].threshold / b_max;
    }
    for (std::size_t j = 0; j < k; ++j) {
      at(j, m + j) = 1.0;
      at(j, cols_ - 1) = lp.costs[j] / c_scale;
      basis_[j] = m + j;
    }

    const std::size_t cap = 50 * (k + m) * (k + m);
    const bool converged = run(cap, sol.iterations);

    // Covering solution: simplex multipliers sit under the slack columns.
    std::vector<double> x(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double pi = at(k, m + j);
      x[j] = pi > kZero ? pi * b_max : 0.0;
    }
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      if (basis_[i] < m) y[basis_[i]] = std::max(0.0, at(i, cols_ - 1)) * c_scale;

    repair_primal(lp, x);
    repair_dual(lp, y);

    sol.primal = std::move(x);
    sol.dual = std::move(y);
    sol.value = primal_value(lp, sol.primal);
    sol.dual_value = dual_objective(lp, sol.dual);
    const double gap = sol.value - sol.dual_value;
    const double scale = std::max(std::abs(sol.value), std::numeric_limits<double>::min());
    sol.status = (converged && gap <= tol * scale) ? LPStatus::optimal : LPStatus::approximate;
    return sol;
  }

 private:
  static constexpr double kZero = 1e-12;
  static constexpr double kPivotTol = 1e-10;
  static constexpr std::size_t kDegenerateStreak = 50;

  double& at(std::size_t r, std::size_t c) { return tab_[r * cols_ + c]; }

  // Dantzig pricing, switching to Bland's rule while the objective stalls.
  bool run(std::size_t cap, std::size_t& iterations) {
    const std::size_t k = rows_ - 1;
    const std::size_t rhs = cols_ - 1;
    std::size_t stall = 0;
    for (iterations = 0; iterations < cap; ++iterations) {
      const bool bland = stall >= kDegenerateStreak;
      std::size_t enter = cols_;
      double most_negative = -kZero;
      for (std::size_t c = 0; c < rhs; ++c) {
        const double d = at(k, c);
        if (d < most_negative) {
          enter = c;
          if (bland) break;
          most_negative = d;
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = k;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(0.0, at(i, rhs)) / a;
        if (leave == k) {
          best_ratio = ratio;
          leave = i;
          continue;
        }
        const bool tie = std::abs(ratio - best_ratio) <= 1e-12 * std::max(1.0, best_ratio);
        if (ratio < best_ratio && !tie) {
          best_ratio = ratio;
          leave = i;
        } else if (tie && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      // Packing programs here are bounded, so a missing pivot row only shows
      // up through round-off; stop and let the caller flag the result.
      if (leave == k) return false;

      stall = best_ratio <= kZero ? stall + 1 : 0;
      pivot(leave, enter);
    }
    return false;
  }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    double* prow = &tab_[pr * cols_];
    for (std::size_t c = 0; c < cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* row = &tab_[r * cols_];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c)
        if (prow[c] != 0.0) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Removes round-off shortfalls; a larger deficit (iteration cap hit) is
  // topped up on the cheapest variable of the row.
  static void repair_primal(const CoveringLP& lp, std::vector<double>& x) {
    double worst = 1.0;
    for (const auto& row : lp.rows) {
      const double cov = row_coverage(row, x);
      if (cov > 0.0) worst = std::max(worst, row.threshold / cov);
      else worst = std::numeric_limits<double>::infinity();
    }
    if (worst <= 1.0) return;
    if (worst <= 1.0 + 1e-9) {
      for (double& v : x) v *= worst;
      return;
    }
    for (const auto& row : lp.rows) {
      const double cov = row_coverage(row, x);
      if (cov >= row.threshold) continue;
      const std::size_t cheapest = *std::min_element(
          row.vars.begin(), row.vars.end(),
          [&](std::size_t a, std::size_t b) { return lp.costs[a] < lp.costs[b]; });
      x[cheapest] += row.threshold - cov;
    }
  }

  // Rows touching a free variable cannot carry dual mass; the rest is scaled
  // into the feasible region if round-off pushed it out.
  static void repair_dual(const CoveringLP& lp, std::vector<double>& y) {
    std::vector<double> load(lp.variables(), 0.0);
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
      for (std::size_t j : lp.rows[r].vars)
        if (lp.costs[j] == 0.0) y[r] = 0.0;
      for (std::size_t j : lp.rows[r].vars) load[j] += y[r];
    }
    double shrink = 1.0;
    for (std::size_t j = 0; j < lp.variables(); ++j)
      if (load[j] > lp.costs[j]) shrink = std::min(shrink, lp.costs[j] / load[j]);
    if (shrink < 1.0)
      for (double& v : y) v *= shrink;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> tab_;
  std::vector<std::size_t> basis_;
};

inline LPSolution solve_covering_lp(const CoveringLP& lp, double tol = kDefaultLPTolerance) {
  CoveringLPSolver solver;
  return solver.solve(lp, tol);
}

}  // namespace fgb
