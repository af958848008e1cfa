#pragma once

// Gaussian reward environments over a feedback graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fgb/errors.hpp"
#include "fgb/graph.hpp"

namespace fgb {

// Standard deviation giving reward variance 1/sqrt(2).
inline const double kDefaultSigma = std::sqrt(1.0 / std::sqrt(2.0));

// Arms whose mean is within this of the best mean count as optimal.
inline constexpr double kOptimalTolerance = 1e-12;

// Mean-reward vector plus the quantities derived from it.
class Instance {
 public:
  Instance() = default;

  explicit Instance(std::vector<double> means, double sigma = kDefaultSigma)
      : means_(std::move(means)), sigma_(sigma) {
    if (means_.empty()) throw ParameterError("means: an instance needs at least one arm");
    for (std::size_t i = 0; i < means_.size(); ++i)
      if (!(means_[i] >= 0.0 && means_[i] <= 1.0))
        throw RangeError("means[" + std::to_string(i) + "]: must lie in [0,1]");
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_))
      throw ParameterError("sigma: must be finite and nonnegative");
    best_ = *std::max_element(means_.begin(), means_.end());
    gaps_.resize(means_.size());
    for (std::size_t i = 0; i < means_.size(); ++i) {
      const bool optimal = best_ - means_[i] <= kOptimalTolerance;
      gaps_[i] = optimal ? 0.0 : best_ - means_[i];
      if (optimal) optimal_.push_back(i);
    }
  }

  std::size_t size() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  double mean(Arm i) const { return means_[i]; }
  double sigma() const { return sigma_; }
  double best_mean() const { return best_; }

  const std::vector<double>& gaps() const { return gaps_; }
  double gap(Arm i) const { return gaps_[i]; }

  // I*, sorted.
  const VertexSet& optimal_arms() const { return optimal_; }
  bool is_optimal(Arm i) const { return gaps_[i] == 0.0; }
  bool has_suboptimal() const { return optimal_.size() < means_.size(); }

  // Smallest positive gap; empty when every arm is optimal.
  std::optional<double> delta_min() const {
    std::optional<double> out;
    for (double g : gaps_)
      if (g > 0.0 && (!out || g < *out)) out = g;
    return out;
  }

  double delta_max() const { return *std::max_element(gaps_.begin(), gaps_.end()); }

 private:
  std::vector<double> means_;
  double sigma_ = kDefaultSigma;
  double best_ = 0.0;
  std::vector<double> gaps_;
  VertexSet optimal_;
};

struct Observation {
  Arm arm = 0;
  double reward = 0.0;
};

// ---------------------------------------------------------------------------
// Seeding

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of replicate `replicate` in experiment `experiment`. Depends only on
// the triple, never on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t experiment,
                                 std::uint64_t replicate) {
  return splitmix64(splitmix64(splitmix64(master) ^ experiment) ^ replicate);
}

// Private random state of one replicate.
class RewardStream {
 public:
  explicit RewardStream(std::uint64_t seed) : rng_(seed) {}

  double standard_normal() { return normal_(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Appends one Gaussian draw per neighbour of the played arm.
inline void sample_round(const FeedbackGraph& g, const Instance& inst, Arm played,
                         RewardStream& stream, std::vector<Observation>& out) {
  if (played >= g.size()) throw RangeError("played: arm " + std::to_string(played) + " out of range");
  const double sigma = inst.sigma();
  for (Arm j : g.neighbors(played)) {
    const double z = stream.standard_normal();
    out.push_back({j, inst.mean(j) + sigma * z});
  }
}

inline std::vector<Observation> sample_round(const FeedbackGraph& g, const Instance& inst,
                                             Arm played, RewardStream& stream) {
  std::vector<Observation> out;
  sample_round(g, inst, played, stream, out);
  return out;
}

// ---------------------------------------------------------------------------
// Perturbations and named constructions

inline double phase_scale(int s) { return std::ldexp(1.0, -s); }

// Raises the target's mean by exactly 2 * 2^-s.
inline Instance make_confusing_instance(const Instance& inst, int s, Arm target) {
  if (target >= inst.size()) throw RangeError("target: arm out of range");
  const double lift = 2.0 * phase_scale(s);
  for (Arm i : inst.optimal_arms())
    if (inst.mean(i) > 1.0 - lift + kOptimalTolerance)
      throw RangeError("means[" + std::to_string(i) + "]: optimal mean exceeds 1 - 2*2^-s");
  if (inst.mean(target) + lift > 1.0 + kOptimalTolerance)
    throw RangeError("target: raised mean would exceed 1");
  auto means = inst.means();
  means[target] = std::min(1.0, means[target] + lift);
  return Instance(std::move(means), inst.sigma());
}

struct PaperParams {
  std::size_t k = 0;
  std::size_t n = 1;
  double delta = 0.1;
  double delta_max = 0.4;
  double mu_star = 0.6;
  double nu = 0.9;
  double eps = 0.1;
  std::uint64_t seed = 0;
  // Explicit optimal arm for the randomised constructions (overrides seed).
  std::optional<Arm> optimal;
  // Reinforced wheel: 0 = base, 1 = one rim arm lifted to nu + K^{1/4} delta,
  // 2 = one rim arm lifted to nu.
  int variant = 0;
  Arm lifted = 1;
};

struct PaperInstance {
  GraphSpec graph;
  Instance instance;
};

namespace detail {

inline std::size_t seeded_pick(std::uint64_t seed, std::size_t count) {
  return static_cast<std::size_t>(derive_seed(seed, 0x70617065ULL, 0) % count);
}

}  // namespace detail

inline PaperInstance paper_instance(std::string_view name, const PaperParams& p,
                                    double sigma = kDefaultSigma) {
  PaperInstance out;
  if (name == "example1_star") {
    if (p.k < 3) throw ParameterError("k: example1_star needs k >= 3");
    out.graph = {GraphKind::star, p.k};
    const Arm leaf = p.optimal ? *p.optimal : 1 + detail::seeded_pick(p.seed, p.k - 1);
    if (leaf == 0 || leaf >= p.k) throw ParameterError("optimal: must be a leaf");
    std::vector<double> means(p.k, p.mu_star - p.delta);
    means[leaf] = p.mu_star;
    out.instance = Instance(std::move(means), sigma);
  } else if (name == "example2_starlike") {
    if (p.k < 4) throw ParameterError("k: example2_starlike needs k >= 4");
    out.graph = {GraphKind::star_like_ex2, p.k};
    const Arm leaf = p.optimal ? *p.optimal : 2 + detail::seeded_pick(p.seed, p.k - 2);
    if (leaf < 2 || leaf >= p.k) throw ParameterError("optimal: must be a leaf");
    std::vector<double> means(p.k, p.mu_star - p.delta);
    means[0] = p.mu_star - p.delta_max;
    means[leaf] = p.mu_star;
    out.instance = Instance(std::move(means), sigma);
  } else if (name == "reinforced_wheel_base") {
    if (p.k < 2) throw ParameterError("k: reinforced_wheel_base needs k >= 2");
    out.graph = {GraphKind::reinforced_wheel, p.k};
    const double kd = static_cast<double>(p.k);
    const double rim_gap = std::pow(kd, 0.25) * p.delta;
    std::vector<double> means(2 * p.k + 1);
    means[0] = p.nu - std::sqrt(kd) * p.delta;
    for (Arm v : wheel_spokes(p.k)) means[v] = p.nu - p.delta;
    for (Arm v : wheel_rim(p.k)) means[v] = p.nu - rim_gap;
    if (p.variant != 0) {
      if (p.lifted % 2 == 0 || p.lifted >= 2 * p.k) throw ParameterError("lifted: must be a rim vertex");
      means[p.lifted] = p.variant == 1 ? p.nu + rim_gap : p.nu;
    }
    out.instance = Instance(std::move(means), sigma);
  } else if (name == "cube_env_A" || name == "cube_env_B") {
    if (p.n < 1) throw ParameterError("n: cube environments need n >= 1");
    out.graph = {GraphKind::cube_copies, 1, p.n};
    std::vector<double> means(8 * p.n, 0.5);
    const auto v1 = cube_side(p.n, true);
    for (Arm v : v1) means[v] = 0.5 - p.delta;
    const Arm best = p.optimal ? *p.optimal : v1[detail::seeded_pick(p.seed, v1.size())];
    if (std::find(v1.begin(), v1.end(), best) == v1.end())
      throw ParameterError("optimal: must lie in V1");
    means[best] = name == "cube_env_A" ? 0.5 + 2.0 * p.delta : 0.5 + p.eps * p.delta;
    out.instance = Instance(std::move(means), sigma);
  } else {
    throw ParameterError("name: unknown named instance '" + std::string(name) + "'");
  }
  return out;
}

inline bool is_paper_instance_name(std::string_view name) {
  return name == "example1_star" || name == "example2_starlike" ||
         name == "reinforced_wheel_base" || name == "cube_env_A" || name == "cube_env_B";
}

// "name:key=value,...", keys k, n, delta, delta_max, mu_star, nu, eps, seed,
// optimal, variant, lifted.
inline PaperParams parse_paper_params(std::string_view text) {
  PaperParams p;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParameterError("params: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string v = item.substr(eq + 1);
    try {
      if (key == "k") p.k = std::stoul(v);
      else if (key == "n") p.n = std::stoul(v);
      else if (key == "delta") p.delta = std::stod(v);
      else if (key == "delta_max") p.delta_max = std::stod(v);
      else if (key == "mu_star") p.mu_star = std::stod(v);
      else if (key == "nu") p.nu = std::stod(v);
      else if (key == "eps") p.eps = std::stod(v);
      else if (key == "seed") p.seed = std::stoull(v);
      else if (key == "optimal") p.optimal = std::stoul(v);
      else if (key == "variant") p.variant = std::stoi(v);
      else if (key == "lifted") p.lifted = std::stoul(v);
      else throw ParameterError(key + ": unknown parameter");
    } catch (const ParameterError&) {
      throw;
    } catch (const std::logic_error&) {
      throw ParameterError(key + ": cannot parse '" + v + "'");
    }
  }
  return p;
}

}  // namespace fgb
