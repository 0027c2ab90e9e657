#pragma once

#include "dagbag/dataset.hpp"
#include "dagbag/graph.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>

namespace dagbag {

enum class ScoreKind { LogLik, Aic, Bic, Ebic, Gic };

std::string to_string(ScoreKind kind);
ScoreKind score_kind_from_string(const std::string& text);

// Per-edge complexity penalty: 0, 2, log n, log n + 2 log p, log(log n) log p.
double penalty_per_edge(ScoreKind kind, std::size_t n, std::size_t p);

// RSS values are clamped to this floor before taking the logarithm.
inline constexpr double kRssFloor = 1e-10;
// A parent set is singular when some pivot of its design, squared and
// divided by n, falls below this value.
inline constexpr double kSingularTolerance = 1e-9;

// n log(rss / n) + parent_count * penalty, with rss clamped to kRssFloor.
double neighborhood_score_from_rss(double rss, std::size_t n, std::size_t parent_count,
                                   double penalty);

// RSS of regressing `node` on `parents` (no intercept), solved by a
// column-pivoted Householder QR on the data columns. Throws SingularDesign.
double neighborhood_rss(const Dataset& data, NodeId node, std::span<const NodeId> parents);

double neighborhood_score(const Dataset& data, NodeId node, std::span<const NodeId> parents,
                          ScoreKind kind);

double total_score(const Dataset& data, const Dag& g, ScoreKind kind);

// Score evaluation from the cached Gram matrix X'X. Every regression's
// normal equations are a submatrix of it, so a neighborhood costs
// O(k^3) for k parents instead of O(n k^2).
class GramScorer {
 public:
  GramScorer(const Dataset& data, ScoreKind kind);

  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return static_cast<std::size_t>(gram_.rows()); }
  double penalty() const noexcept { return penalty_; }
  ScoreKind kind() const noexcept { return kind_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }

  // Throws SingularDesign.
  double rss(NodeId node, std::span<const NodeId> parents) const;
  double score(NodeId node, std::span<const NodeId> parents) const;

  // Score changes for every single-parent edit of `node`'s neighborhood.
  // `parents` is the current sorted parent set. On return out[k] holds
  //   score(parents + k) - score(parents)   for k not in parents, k != node
  //   score(parents - k) - score(parents)   for k in parents
  // and +infinity where the edited set is singular or for k == node.
  // Returns the current neighborhood score.
  double column_deltas(NodeId node, std::span<const NodeId> parents, std::span<double> out) const;

 private:
  std::size_t n_;
  ScoreKind kind_;
  double penalty_;
  Eigen::MatrixXd gram_;
};

}  // namespace dagbag
