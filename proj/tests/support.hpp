#pragma once

// Independent oracles and hand-rolled generators shared by the test suites.
// Nothing here calls into the library's own cycle checks, regressions or
// scores; the point is to check the library against a second route.

#include "dagbag/bootstrap.hpp"
#include "dagbag/dataset.hpp"
#include "dagbag/graph.hpp"
#include "dagbag/score.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace support {

using namespace dagbag;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_); }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  bool coin(double p) { return uniform(0.0, 1.0) < p; }
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(v.begin(), v.end(), eng_);
    return v;
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline Dag make_dag(std::size_t p, std::vector<Edge> edges) { return Dag::from_edges(p, edges); }

// Three-colour DFS.
inline bool dfs_acyclic(const AdjacencyMatrix& a) {
  const std::size_t p = a.size();
  std::vector<int> colour(p, 0);
  std::function<bool(std::size_t)> visit = [&](std::size_t u) {
    colour[u] = 1;
    for (std::size_t v = 0; v < p; ++v) {
      if (!a(u, v)) continue;
      if (colour[v] == 1) return false;
      if (colour[v] == 0 && !visit(v)) return false;
    }
    colour[u] = 2;
    return true;
  };
  for (std::size_t u = 0; u < p; ++u)
    if (colour[u] == 0 && !visit(u)) return false;
  return true;
}

inline std::vector<bool> dfs_reach(const AdjacencyMatrix& a, std::size_t start, bool forward) {
  const std::size_t p = a.size();
  std::vector<bool> seen(p, false);
  std::vector<std::size_t> stack = {start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < p; ++v) {
      const bool edge = forward ? a(u, v) : a(v, u);
      if (edge && !seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

inline Dag random_dag(Gen& gen, std::size_t p, double density) {
  const auto order = gen.permutation(p);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b)
      if (gen.coin(density)) edges.push_back({order[a], order[b]});
  return Dag::from_edges(p, edges);
}

// Linear Gaussian data along g (or independent columns without one).
inline Eigen::MatrixXd random_raw(Gen& gen, std::size_t n, std::size_t p, const Dag* g = nullptr) {
  Eigen::MatrixXd x(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) x(i, j) = gen.normal();
  if (g) {
    for (NodeId v : g->topological_order()) {
      for (NodeId u : g->parents(v)) {
        const double beta = gen.uniform(0.4, 1.0) * (gen.coin(0.5) ? 1.0 : -1.0);
        x.col(v) += beta * x.col(u);
      }
    }
  }
  return x;
}

inline Dataset random_data(Gen& gen, std::size_t n, std::size_t p, const Dag* g = nullptr) {
  return Dataset::from_raw(random_raw(gen, n, p, g));
}

inline double oracle_penalty(ScoreKind kind, std::size_t n, std::size_t p) {
  const double ln = std::log(static_cast<double>(n));
  const double lp = std::log(static_cast<double>(p));
  switch (kind) {
    case ScoreKind::LogLik: return 0.0;
    case ScoreKind::Aic: return 2.0;
    case ScoreKind::Bic: return ln;
    case ScoreKind::Ebic: return ln + 2.0 * lp;
    case ScoreKind::Gic: return std::log(ln) * lp;
  }
  return 0.0;
}

// Least squares through a full SVD of the design.
inline double oracle_rss(const Dataset& data, NodeId node, const std::vector<NodeId>& parents) {
  const auto& x = data.values();
  const Eigen::VectorXd y = x.col(static_cast<Eigen::Index>(node));
  if (parents.empty()) return y.squaredNorm();
  Eigen::MatrixXd design(x.rows(), static_cast<Eigen::Index>(parents.size()));
  for (std::size_t k = 0; k < parents.size(); ++k)
    design.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(parents[k]));
  const Eigen::VectorXd beta = design.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
  return (y - design * beta).squaredNorm();
}

inline double oracle_score(const Dataset& data, NodeId node, const std::vector<NodeId>& parents,
                           ScoreKind kind) {
  const double n = static_cast<double>(data.n());
  const double rss = std::max(oracle_rss(data, node, parents), 1e-10);
  return n * std::log(rss / n) +
         static_cast<double>(parents.size()) * oracle_penalty(kind, data.n(), data.p());
}

inline std::vector<NodeId> parents_of(const AdjacencyMatrix& a, NodeId node) {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < a.size(); ++u)
    if (a(u, node)) out.push_back(u);
  return out;
}

inline double oracle_total(const Dataset& data, const AdjacencyMatrix& a, ScoreKind kind) {
  double total = 0.0;
  for (NodeId v = 0; v < a.size(); ++v) total += oracle_score(data, v, parents_of(a, v), kind);
  return total;
}

// Every DAG on p nodes: each unordered pair is absent, forward or backward.
inline std::vector<Dag> all_dags(std::size_t p) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < p; ++i)
    for (NodeId j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  std::size_t states = 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) states *= 3;
  std::vector<Dag> out;
  for (std::size_t code = 0; code < states; ++code) {
    AdjacencyMatrix a(p);
    std::size_t c = code;
    for (const auto& [i, j] : pairs) {
      const std::size_t s = c % 3;
      c /= 3;
      if (s == 1) a.set(i, j, true);
      if (s == 2) a.set(j, i, true);
    }
    if (dfs_acyclic(a)) out.push_back(Dag::from_adjacency(a));
  }
  return out;
}

// Direct pairwise GSHD by the case table: 1 for a one-sided edge, alpha for
// opposite orientations.
inline double oracle_gshd(const Dag& g1, const Dag& g2, double alpha) {
  double d = 0.0;
  const std::size_t p = g1.size();
  for (NodeId i = 0; i < p; ++i) {
    for (NodeId j = i + 1; j < p; ++j) {
      const int s1 = g1.has_edge(i, j) ? 1 : g1.has_edge(j, i) ? 2 : 0;
      const int s2 = g2.has_edge(i, j) ? 1 : g2.has_edge(j, i) ? 2 : 0;
      if (s1 == s2) continue;
      d += (s1 == 0 || s2 == 0) ? 1.0 : alpha;
    }
  }
  return d;
}

inline Ensemble ensemble_of(std::size_t p, std::vector<Dag> graphs) {
  Ensemble e;
  e.p = p;
  e.graphs = std::move(graphs);
  e.provenance.boot = e.graphs.size();
  return e;
}

// Members scattered around a random base graph, so that many edges clear 1/2.
inline Ensemble random_ensemble(Gen& gen, std::size_t p, std::size_t boot) {
  const Dag base = random_dag(gen, p, gen.uniform(0.2, 0.8));
  std::vector<Dag> graphs;
  for (std::size_t b = 0; b < boot; ++b) {
    Dag g = base;
    const std::size_t edits = gen.between(0, p + 1);
    for (std::size_t t = 0; t < edits; ++t) {
      const NodeId a = gen.below(p);
      NodeId c = gen.below(p - 1);
      if (c >= a) ++c;
      Operation op{OpKind::Add, a, c};
      if (g.has_edge(a, c)) op.kind = gen.coin(0.5) ? OpKind::Delete : OpKind::Reverse;
      else if (g.has_edge(c, a)) continue;
      if (!g.creates_cycle(op)) g.apply(op);
    }
    graphs.push_back(g);
  }
  return ensemble_of(p, graphs);
}

inline double direct_average(const Dag& g, const Ensemble& e, double alpha) {
  double sum = 0.0;
  for (const Dag& member : e.graphs) sum += oracle_gshd(g, member, alpha);
  return sum / static_cast<double>(e.graphs.size());
}

}  // namespace support
