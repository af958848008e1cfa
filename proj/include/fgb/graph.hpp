#pragma once

// Undirected feedback graphs with mandatory self-loops, the generators for
// every named construction, and the structural routines (domination,
// independence, collapse) the complexity computations rely on.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgb/errors.hpp"

namespace fgb {

using Arm = std::size_t;
using VertexSet = std::vector<Arm>;

class FeedbackGraph {
 public:
  FeedbackGraph() = default;

  // Builds from closed neighbourhoods and throws ParameterError listing every
  // violation when the lists are not symmetric, reflexive and in range.
  static FeedbackGraph from_adjacency(std::vector<VertexSet> adj);

  // Same, but keeps whatever it is given. Only validate() should look at the
  // result of this.
  static FeedbackGraph unchecked(std::vector<VertexSet> adj) {
    FeedbackGraph g;
    g.adj_ = std::move(adj);
    for (auto& row : g.adj_) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    g.build_matrix();
    return g;
  }

  // Undirected edge list; self-loops and the reverse direction are added.
  static FeedbackGraph from_edges(std::size_t k, std::span<const std::pair<Arm, Arm>> edges) {
    if (k == 0) throw ParameterError("k: a feedback graph needs at least one vertex");
    std::vector<VertexSet> adj(k);
    for (Arm i = 0; i < k; ++i) adj[i].push_back(i);
    for (auto [u, v] : edges) {
      if (u >= k || v >= k) throw ParameterError("edges: endpoint out of range");
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    return from_adjacency(std::move(adj));
  }

  std::size_t size() const { return adj_.size(); }

  // Closed neighbourhood N_i, sorted, containing i.
  std::span<const Arm> neighbors(Arm i) const { return adj_[i]; }

  bool adjacent(Arm i, Arm j) const { return matrix_[i * adj_.size() + j] != 0; }

  // Number of neighbours other than i itself.
  std::size_t degree(Arm i) const {
    return adj_[i].size() - (adjacent(i, i) ? 1 : 0);
  }

  const std::vector<VertexSet>& adjacency() const { return adj_; }

  friend bool operator==(const FeedbackGraph& a, const FeedbackGraph& b) {
    return a.adj_ == b.adj_;
  }

 private:
  void build_matrix() {
    const std::size_t k = adj_.size();
    matrix_.assign(k * k, 0);
    for (Arm i = 0; i < k; ++i)
      for (Arm j : adj_[i])
        if (j < k) matrix_[i * k + j] = 1;
  }

  std::vector<VertexSet> adj_;
  std::vector<std::uint8_t> matrix_;
};

// Symmetry, reflexivity and range violations. Empty means valid.
inline std::vector<std::string> validate(const FeedbackGraph& g) {
  std::vector<std::string> out;
  const std::size_t k = g.size();
  if (k == 0) out.emplace_back("empty graph");
  for (Arm i = 0; i < k; ++i) {
    bool self = false;
    for (Arm j : g.neighbors(i)) {
      if (j >= k) {
        out.push_back("neighbor out of range (" + std::to_string(i) + "," + std::to_string(j) + ")");
        continue;
      }
      if (j == i) self = true;
      if (j != i && !g.adjacent(j, i))
        out.push_back("asymmetric pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    if (!self) out.push_back("missing self-loop " + std::to_string(i));
  }
  return out;
}

inline FeedbackGraph FeedbackGraph::from_adjacency(std::vector<VertexSet> adj) {
  FeedbackGraph g = unchecked(std::move(adj));
  auto problems = validate(g);
  if (!problems.empty()) {
    std::string msg = "adj: invalid feedback graph:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ParameterError(msg);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Generators

enum class GraphKind {
  bandit,
  complete,
  star,
  star_like_ex2,
  reinforced_wheel,
  cube_copies,
  erdos_renyi,
};

struct GraphSpec {
  GraphKind kind = GraphKind::bandit;
  std::size_t k = 1;       // vertices; wheel: spoke count (graph has 2k+1)
  std::size_t n = 1;       // cube_copies only
  double p = 0.5;          // erdos_renyi only
  std::uint64_t seed = 0;  // erdos_renyi only
};

inline std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::bandit: return "bandit";
    case GraphKind::complete: return "complete";
    case GraphKind::star: return "star";
    case GraphKind::star_like_ex2: return "star_like_ex2";
    case GraphKind::reinforced_wheel: return "reinforced_wheel";
    case GraphKind::cube_copies: return "cube_copies";
    case GraphKind::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

inline GraphKind parse_graph_kind(std::string_view name) {
  for (auto kind : {GraphKind::bandit, GraphKind::complete, GraphKind::star,
                    GraphKind::star_like_ex2, GraphKind::reinforced_wheel,
                    GraphKind::cube_copies, GraphKind::erdos_renyi}) {
    if (to_string(kind) == name) return kind;
  }
  throw ParameterError("kind: unknown graph kind '" + std::string(name) + "'");
}

// "kind:key=value,key=value", e.g. "erdos_renyi:k=10,p=0.3,seed=7".
inline GraphSpec parse_graph_spec(std::string_view text) {
  GraphSpec spec;
  const auto colon = text.find(':');
  spec.kind = parse_graph_kind(text.substr(0, colon));
  if (colon == std::string_view::npos) return spec;
  std::stringstream ss{std::string(text.substr(colon + 1))};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParameterError("spec: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "k") spec.k = std::stoul(value);
      else if (key == "n") spec.n = std::stoul(value);
      else if (key == "p") spec.p = std::stod(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else throw ParameterError(key + ": unknown graph parameter");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ParameterError*>(&e)) throw;
      throw ParameterError(key + ": cannot parse '" + value + "'");
    }
  }
  return spec;
}

inline std::string to_string(const GraphSpec& spec) {
  std::string out(to_string(spec.kind));
  switch (spec.kind) {
    case GraphKind::cube_copies: return out + ":n=" + std::to_string(spec.n);
    case GraphKind::erdos_renyi: {
      std::ostringstream os;
      os.precision(17);
      os << out << ":k=" << spec.k << ",p=" << spec.p << ",seed=" << spec.seed;
      return os.str();
    }
    default: return out + ":k=" + std::to_string(spec.k);
  }
}

inline FeedbackGraph bandit_graph(std::size_t k) {
  if (k < 1) throw ParameterError("k: bandit graph needs k >= 1");
  return FeedbackGraph::from_edges(k, {});
}

inline FeedbackGraph complete_graph(std::size_t k) {
  if (k < 1) throw ParameterError("k: complete graph needs k >= 1");
  std::vector<VertexSet> adj(k, VertexSet(k));
  for (auto& row : adj) std::iota(row.begin(), row.end(), Arm{0});
  return FeedbackGraph::from_adjacency(std::move(adj));
}

// Root is vertex 0; leaves are 1..k-1.
inline FeedbackGraph star_graph(std::size_t k) {
  if (k < 2) throw ParameterError("k: star graph needs k >= 2");
  std::vector<std::pair<Arm, Arm>> edges;
  for (Arm leaf = 1; leaf < k; ++leaf) edges.emplace_back(0, leaf);
  return FeedbackGraph::from_edges(k, edges);
}

// Vertex 0 reveals everything; vertex 1 reveals everything except the last
// leaf k-1. Leaves are 2..k-1.
inline FeedbackGraph star_like_graph(std::size_t k) {
  if (k < 4) throw ParameterError("k: star_like_ex2 needs k >= 4");
  std::vector<std::pair<Arm, Arm>> edges;
  for (Arm v = 1; v < k; ++v) edges.emplace_back(0, v);
  for (Arm leaf = 2; leaf + 1 < k; ++leaf) edges.emplace_back(1, leaf);
  return FeedbackGraph::from_edges(k, edges);
}

// Smallest m with m^8 >= k, i.e. ceil(k^(1/8)) without floating point.
inline std::size_t wheel_chord_count(std::size_t k) {
  std::size_t m = 1;
  auto pow8 = [](std::size_t v) {
    std::size_t r = 1;
    for (int i = 0; i < 8; ++i) r *= v;
    return r;
  };
  while (pow8(m) < k) ++m;
  return m;
}

// Hub 0, spokes 2,4,..,2k and rim 1,3,..,2k-1 (k vertices each).
inline VertexSet wheel_spokes(std::size_t k) {
  VertexSet out;
  for (Arm i = 1; i <= k; ++i) out.push_back(2 * i);
  return out;
}

inline VertexSet wheel_rim(std::size_t k) {
  VertexSet out;
  for (Arm i = 0; i < k; ++i) out.push_back(2 * i + 1);
  return out;
}

// 2k+1 vertices. Each spoke 2i touches the hub and its rim neighbours 2i-1
// and 2i+1, where index arithmetic on the rim wraps over odd vertices only
// (2k+1 is the hub, so spoke 2k closes the ring at 1). Each rim vertex is
// further joined to the next ceil(k^(1/8)) rim vertices.
inline FeedbackGraph reinforced_wheel(std::size_t k) {
  if (k < 2) throw ParameterError("k: reinforced_wheel needs k >= 2");
  const auto rim = [k](std::size_t j) { return 2 * (j % k) + 1; };
  std::vector<std::pair<Arm, Arm>> edges;
  for (std::size_t i = 1; i <= k; ++i) {
    const Arm spoke = 2 * i;
    edges.emplace_back(spoke, 0);
    edges.emplace_back(spoke, rim(i - 1));
    edges.emplace_back(spoke, rim(i));
  }
  const std::size_t chords = wheel_chord_count(k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t step = 1; step <= chords; ++step)
      if (rim(j + step) != rim(j)) edges.emplace_back(rim(j), rim(j + step));
  return FeedbackGraph::from_edges(2 * k + 1, edges);
}

// n disjoint 3-cubes. Copy c uses vertices 8c..8c+7; 8c..8c+3 form the
// even-parity side V1 and 8c+4..8c+7 the odd side V2.
inline FeedbackGraph cube_copies(std::size_t n) {
  if (n < 1) throw ParameterError("n: cube_copies needs n >= 1");
  // Local index of each corner bit pattern 0..7.
  constexpr std::size_t local[8] = {0, 4, 5, 1, 6, 2, 3, 7};
  std::vector<std::pair<Arm, Arm>> edges;
  for (std::size_t c = 0; c < n; ++c)
    for (unsigned corner = 0; corner < 8; ++corner)
      for (unsigned bit = 1; bit < 8; bit <<= 1)
        if ((corner & bit) == 0)
          edges.emplace_back(8 * c + local[corner], 8 * c + local[corner | bit]);
  return FeedbackGraph::from_edges(8 * n, edges);
}

inline VertexSet cube_side(std::size_t n, bool v1) {
  VertexSet out;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < 4; ++i) out.push_back(8 * c + (v1 ? 0 : 4) + i);
  return out;
}

inline FeedbackGraph erdos_renyi(std::size_t k, double p, std::uint64_t seed) {
  if (k < 1) throw ParameterError("k: erdos_renyi needs k >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p: edge probability must lie in [0,1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<Arm, Arm>> edges;
  for (Arm i = 0; i < k; ++i)
    for (Arm j = i + 1; j < k; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return FeedbackGraph::from_edges(k, edges);
}

inline FeedbackGraph path_graph(std::size_t k) {
  std::vector<std::pair<Arm, Arm>> edges;
  for (Arm i = 0; i + 1 < k; ++i) edges.emplace_back(i, i + 1);
  return FeedbackGraph::from_edges(k, edges);
}

inline FeedbackGraph disjoint_cliques(std::span<const std::size_t> sizes) {
  std::size_t k = 0;
  std::vector<std::pair<Arm, Arm>> edges;
  for (std::size_t s : sizes) {
    for (Arm i = k; i < k + s; ++i)
      for (Arm j = i + 1; j < k + s; ++j) edges.emplace_back(i, j);
    k += s;
  }
  return FeedbackGraph::from_edges(k, edges);
}

inline FeedbackGraph generate(const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphKind::bandit: return bandit_graph(spec.k);
    case GraphKind::complete: return complete_graph(spec.k);
    case GraphKind::star: return star_graph(spec.k);
    case GraphKind::star_like_ex2: return star_like_graph(spec.k);
    case GraphKind::reinforced_wheel: return reinforced_wheel(spec.k);
    case GraphKind::cube_copies: return cube_copies(spec.n);
    case GraphKind::erdos_renyi: return erdos_renyi(spec.k, spec.p, spec.seed);
  }
  throw ParameterError("kind: unhandled graph kind");
}

// ---------------------------------------------------------------------------
// Domination

inline bool is_dominating(const FeedbackGraph& g, std::span<const Arm> set) {
  std::vector<bool> covered(g.size(), false);
  for (Arm v : set)
    for (Arm u : g.neighbors(v)) covered[u] = true;
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

// Repeatedly takes the vertex covering the most uncovered vertices; ties go
// to the smallest index. Result is sorted.
inline VertexSet greedy_dominating_set(const FeedbackGraph& g) {
  const std::size_t k = g.size();
  std::vector<bool> covered(k, false);
  std::size_t remaining = k;
  VertexSet chosen;
  while (remaining > 0) {
    Arm best = 0;
    std::size_t best_gain = 0;
    for (Arm v = 0; v < k; ++v) {
      std::size_t gain = 0;
      for (Arm u : g.neighbors(v)) gain += covered[u] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    chosen.push_back(best);
    for (Arm u : g.neighbors(best)) {
      if (!covered[u]) {
        covered[u] = true;
        --remaining;
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// ---------------------------------------------------------------------------
// Independence

struct IndependentSetResult {
  VertexSet vertices;
  double weight = 0.0;
  bool exact = true;  // false: greedy lower bound on some component
};

inline constexpr std::size_t kExactIndependenceLimit = 40;

namespace detail {

class MaxWeightIndependentSet {
 public:
  MaxWeightIndependentSet(std::vector<std::uint64_t> nbr, std::vector<double> w)
      : nbr_(std::move(nbr)), w_(std::move(w)) {}

  std::uint64_t solve(std::uint64_t initial_best_set) {
    best_set_ = initial_best_set;
    best_ = weight_of(initial_best_set);
    const std::uint64_t all = nbr_.size() == 64 ? ~0ULL : ((1ULL << nbr_.size()) - 1);
    search(all, 0, 0.0);
    return best_set_;
  }

  double weight_of(std::uint64_t set) const {
    double total = 0.0;
    for (; set; set &= set - 1) total += w_[std::countr_zero(set)];
    return total;
  }

 private:
  void search(std::uint64_t cand, std::uint64_t cur, double cur_w) {
    // Candidates with no neighbour among the candidates are always taken.
    for (std::uint64_t scan = cand; scan; scan &= scan - 1) {
      const int v = std::countr_zero(scan);
      if ((nbr_[v] & cand) == 0) {
        cur |= 1ULL << v;
        cur_w += w_[v];
        cand &= ~(1ULL << v);
      }
    }
    if (cand == 0) {
      if (cur_w > best_) {
        best_ = cur_w;
        best_set_ = cur;
      }
      return;
    }
    if (cur_w + weight_of(cand) <= best_) return;

    int pivot = -1;
    int pivot_deg = -1;
    for (std::uint64_t scan = cand; scan; scan &= scan - 1) {
      const int v = std::countr_zero(scan);
      const int deg = std::popcount(nbr_[v] & cand);
      if (deg > pivot_deg) {
        pivot_deg = deg;
        pivot = v;
      }
    }
    const std::uint64_t bit = 1ULL << pivot;
    search(cand & ~nbr_[pivot] & ~bit, cur | bit, cur_w + w_[pivot]);
    search(cand & ~bit, cur, cur_w);
  }

  std::vector<std::uint64_t> nbr_;
  std::vector<double> w_;
  std::uint64_t best_set_ = 0;
  double best_ = 0.0;
};

// Greedy by weight / (remaining degree + 1) on the given vertex subset.
inline VertexSet greedy_independent(const FeedbackGraph& g, std::span<const double> weights,
                                    const VertexSet& component) {
  std::vector<bool> alive(g.size(), false);
  for (Arm v : component) alive[v] = true;
  VertexSet out;
  while (true) {
    double best_score = -1.0;
    Arm best = 0;
    bool found = false;
    for (Arm v : component) {
      if (!alive[v]) continue;
      std::size_t deg = 0;
      for (Arm u : g.neighbors(v)) deg += (u != v && alive[u]) ? 1 : 0;
      const double score = weights[v] / static_cast<double>(deg + 1);
      if (!found || score > best_score) {
        best_score = score;
        best = v;
        found = true;
      }
    }
    if (!found) break;
    out.push_back(best);
    for (Arm u : g.neighbors(best)) alive[u] = false;
  }
  return out;
}

inline std::vector<VertexSet> connected_components(const FeedbackGraph& g) {
  std::vector<VertexSet> comps;
  std::vector<bool> seen(g.size(), false);
  for (Arm s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    VertexSet comp{s};
    seen[s] = true;
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (Arm u : g.neighbors(comp[head]))
        if (!seen[u]) {
          seen[u] = true;
          comp.push_back(u);
        }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace detail

// Maximum-weight set of pairwise non-adjacent vertices (self-loops ignored).
// Solved exactly per connected component of at most 40 vertices by
// branch-and-bound; larger components fall back to a greedy lower bound and
// the result is flagged inexact.
inline IndependentSetResult max_weight_independent_set(const FeedbackGraph& g,
                                                       std::span<const double> weights) {
  if (weights.size() != g.size()) throw ParameterError("weights: size must equal vertex count");
  for (double w : weights)
    if (!std::isfinite(w) || w < 0.0) throw ParameterError("weights: must be finite and nonnegative");

  IndependentSetResult result;
  for (const auto& comp : detail::connected_components(g)) {
    VertexSet picked;
    if (comp.size() <= kExactIndependenceLimit) {
      std::vector<std::size_t> local(g.size(), 0);
      for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = i;
      std::vector<std::uint64_t> nbr(comp.size(), 0);
      std::vector<double> w(comp.size());
      for (std::size_t i = 0; i < comp.size(); ++i) {
        w[i] = weights[comp[i]];
        for (Arm u : g.neighbors(comp[i]))
          if (u != comp[i]) nbr[i] |= 1ULL << local[u];
      }
      std::uint64_t seed_set = 0;
      for (Arm v : detail::greedy_independent(g, weights, comp)) seed_set |= 1ULL << local[v];
      detail::MaxWeightIndependentSet solver(std::move(nbr), std::move(w));
      for (std::uint64_t set = solver.solve(seed_set); set; set &= set - 1)
        picked.push_back(comp[std::countr_zero(set)]);
    } else {
      picked = detail::greedy_independent(g, weights, comp);
      result.exact = false;
    }
    result.vertices.insert(result.vertices.end(), picked.begin(), picked.end());
  }
  std::sort(result.vertices.begin(), result.vertices.end());
  for (Arm v : result.vertices) result.weight += weights[v];
  return result;
}

// ---------------------------------------------------------------------------
// Collapse

struct CollapseResult {
  FeedbackGraph quotient;
  std::vector<std::size_t> class_of;   // vertex -> class index
  std::vector<VertexSet> members;      // class index -> sorted members
};

// Merges vertices with identical closed neighbourhoods. Classes are numbered
// by their smallest member.
inline CollapseResult collapse(const FeedbackGraph& g) {
  CollapseResult out;
  out.class_of.resize(g.size());
  std::map<VertexSet, std::size_t> index;
  for (Arm v = 0; v < g.size(); ++v) {
    const auto& key = g.adjacency()[v];
    auto [it, inserted] = index.try_emplace(key, out.members.size());
    if (inserted) out.members.emplace_back();
    out.members[it->second].push_back(v);
    out.class_of[v] = it->second;
  }
  std::vector<VertexSet> adj(out.members.size());
  for (std::size_t c = 0; c < out.members.size(); ++c) {
    for (Arm u : g.neighbors(out.members[c].front())) adj[c].push_back(out.class_of[u]);
  }
  out.quotient = FeedbackGraph::from_adjacency(std::move(adj));
  return out;
}

// True iff the graph has a simple path with three edges over distinct
// vertices. Self-loops never count.
inline bool has_three_edge_path(const FeedbackGraph& g) {
  for (Arm a = 0; a < g.size(); ++a)
    for (Arm b : g.neighbors(a)) {
      if (b == a) continue;
      for (Arm c : g.neighbors(b)) {
        if (c == a || c == b) continue;
        for (Arm d : g.neighbors(c))
          if (d != a && d != b && d != c) return true;
      }
    }
  return false;
}

// True iff the collapsed graph has no simple path longer than two edges.
inline bool check_dstar_condition(const FeedbackGraph& g) {
  return !has_three_edge_path(collapse(g).quotient);
}

}  // namespace fgb
