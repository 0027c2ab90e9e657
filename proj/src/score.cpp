#include "dagbag/score.hpp"

#include "dagbag/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dagbag {

std::string to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::LogLik:
      return "loglik";
    case ScoreKind::Aic:
      return "aic";
    case ScoreKind::Bic:
      return "bic";
    case ScoreKind::Ebic:
      return "ebic";
    case ScoreKind::Gic:
      return "gic";
  }
  return "?";
}

ScoreKind score_kind_from_string(const std::string& text) {
  if (text == "loglik" || text == "like") return ScoreKind::LogLik;
  if (text == "aic") return ScoreKind::Aic;
  if (text == "bic") return ScoreKind::Bic;
  if (text == "ebic") return ScoreKind::Ebic;
  if (text == "gic") return ScoreKind::Gic;
  throw Error("unknown score '" + text + "' (expected loglik, aic, bic, ebic or gic)");
}

double penalty_per_edge(ScoreKind kind, std::size_t n, std::size_t p) {
  const double log_n = std::log(static_cast<double>(n));
  const double log_p = std::log(static_cast<double>(p));
  switch (kind) {
    case ScoreKind::LogLik:
      return 0.0;
    case ScoreKind::Aic:
      return 2.0;
    case ScoreKind::Bic:
      return log_n;
    case ScoreKind::Ebic:
      return log_n + 2.0 * log_p;
    case ScoreKind::Gic:
      return std::log(log_n) * log_p;
  }
  return 0.0;
}

double neighborhood_score_from_rss(double rss, std::size_t n, std::size_t parent_count,
                                   double penalty) {
  const double nd = static_cast<double>(n);
  return nd * std::log(std::max(rss, kRssFloor) / nd) + static_cast<double>(parent_count) * penalty;
}

namespace {

void check_parents(std::size_t n, std::size_t p, NodeId node, std::span<const NodeId> parents) {
  if (node >= p) throw InvalidNode("node " + std::to_string(node) + " out of range");
  for (NodeId k : parents) {
    if (k >= p) throw InvalidNode("parent " + std::to_string(k) + " out of range");
    if (k == node) throw Error("node " + std::to_string(node) + " listed as its own parent");
  }
  if (parents.size() >= n) {
    throw SingularDesign(std::to_string(parents.size()) + " parents for " + std::to_string(n) +
                         " samples");
  }
}

[[noreturn]] void throw_singular(NodeId node) {
  throw SingularDesign("parents of node " + std::to_string(node) + " are collinear");
}

}  // namespace

double neighborhood_rss(const Dataset& data, NodeId node, std::span<const NodeId> parents) {
  check_parents(data.n(), data.p(), node, parents);
  const auto& x = data.values();
  const Eigen::VectorXd y = x.col(static_cast<Eigen::Index>(node));
  if (parents.empty()) return std::max(y.squaredNorm(), kRssFloor);

  Eigen::MatrixXd design(x.rows(), static_cast<Eigen::Index>(parents.size()));
  for (std::size_t c = 0; c < parents.size(); ++c) design.col(c) = x.col(parents[c]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const auto& r = qr.matrixR();
  const double nd = static_cast<double>(data.n());
  for (Eigen::Index i = 0; i < design.cols(); ++i)
    if (r(i, i) * r(i, i) / nd < kSingularTolerance) throw_singular(node);

  // Residual lives in the trailing n - k coordinates of Q'y.
  const Eigen::VectorXd qty = qr.householderQ().transpose() * y;
  const double rss = qty.tail(x.rows() - design.cols()).squaredNorm();
  return std::max(rss, kRssFloor);
}

double neighborhood_score(const Dataset& data, NodeId node, std::span<const NodeId> parents,
                          ScoreKind kind) {
  const double rss = neighborhood_rss(data, node, parents);
  return neighborhood_score_from_rss(rss, data.n(), parents.size(),
                                     penalty_per_edge(kind, data.n(), data.p()));
}

double total_score(const Dataset& data, const Dag& g, ScoreKind kind) {
  if (g.size() != data.p()) {
    throw DimensionMismatch("graph has " + std::to_string(g.size()) + " nodes, data has " +
                            std::to_string(data.p()) + " columns");
  }
  double total = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) total += neighborhood_score(data, i, g.parents(i), kind);
  return total;
}

GramScorer::GramScorer(const Dataset& data, ScoreKind kind)
    : n_(data.n()), kind_(kind), penalty_(penalty_per_edge(kind, data.n(), data.p())) {
  const auto& x = data.values();
  gram_ = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram_ = gram_.selfadjointView<Eigen::Lower>();
}

namespace {

// Cholesky factor of G[S, S]; false when a pivot falls under tolerance.
bool factor(const Eigen::MatrixXd& gram, std::span<const NodeId> set, double nd,
            Eigen::MatrixXd& lower) {
  const auto s = static_cast<Eigen::Index>(set.size());
  lower.setZero(s, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    double pivot = gram(set[j], set[j]);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (pivot / nd < kSingularTolerance) return false;
    const double root = std::sqrt(pivot);
    lower(j, j) = root;
    for (Eigen::Index i = j + 1; i < s; ++i) {
      double v = gram(set[i], set[j]);
      for (Eigen::Index k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
      lower(i, j) = v / root;
    }
  }
  return true;
}

}  // namespace

double GramScorer::rss(NodeId node, std::span<const NodeId> parents) const {
  check_parents(n_, p(), node, parents);
  const double nd = static_cast<double>(n_);
  const double syy = gram_(node, node);
  if (parents.empty()) return std::max(syy, kRssFloor);
  Eigen::MatrixXd lower;
  if (!factor(gram_, parents, nd, lower)) throw_singular(node);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(parents.size()));
  for (std::size_t i = 0; i < parents.size(); ++i) rhs(i) = gram_(parents[i], node);
  lower.triangularView<Eigen::Lower>().solveInPlace(rhs);
  return std::max(syy - rhs.squaredNorm(), kRssFloor);
}

double GramScorer::score(NodeId node, std::span<const NodeId> parents) const {
  return neighborhood_score_from_rss(rss(node, parents), n_, parents.size(), penalty_);
}

double GramScorer::column_deltas(NodeId node, std::span<const NodeId> parents,
                                 std::span<double> out) const {
  const std::size_t pn = p();
  const double nd = static_cast<double>(n_);
  const double inf = std::numeric_limits<double>::infinity();
  const auto s = static_cast<Eigen::Index>(parents.size());
  check_parents(n_, pn, node, parents);

  Eigen::MatrixXd lower;
  if (!factor(gram_, parents, nd, lower)) throw_singular(node);

  // z = L^{-1} G[S, y];  W = L^{-1} G[S, :]
  Eigen::VectorXd z(s);
  Eigen::MatrixXd w(s, static_cast<Eigen::Index>(pn));
  for (Eigen::Index i = 0; i < s; ++i) {
    z(i) = gram_(parents[i], node);
    w.row(i) = gram_.row(parents[i]);
  }
  if (s > 0) {
    lower.triangularView<Eigen::Lower>().solveInPlace(z);
    lower.triangularView<Eigen::Lower>().solveInPlace(w);
  }
  const double base_rss = gram_(node, node) - z.squaredNorm();
  const double base = neighborhood_score_from_rss(base_rss, n_, parents.size(), penalty_);

  std::vector<std::uint8_t> is_parent(pn, 0);
  for (NodeId k : parents) is_parent[k] = 1;

  const bool room = parents.size() + 1 < n_;
  for (NodeId k = 0; k < pn; ++k) {
    if (k == node || is_parent[k]) {
      out[k] = inf;
      continue;
    }
    const auto kc = static_cast<Eigen::Index>(k);
    const double schur = s > 0 ? gram_(k, k) - w.col(kc).squaredNorm() : gram_(k, k);
    if (!room || schur / nd < kSingularTolerance) {
      out[k] = inf;
      continue;
    }
    const double cross = s > 0 ? gram_(k, node) - w.col(kc).dot(z) : gram_(k, node);
    const double rss = base_rss - cross * cross / schur;
    out[k] = neighborhood_score_from_rss(rss, n_, parents.size() + 1, penalty_) - base;
  }

  std::vector<NodeId> reduced(parents.size() > 0 ? parents.size() - 1 : 0);
  for (std::size_t drop = 0; drop < parents.size(); ++drop) {
    std::size_t at = 0;
    for (std::size_t i = 0; i < parents.size(); ++i)
      if (i != drop) reduced[at++] = parents[i];
    out[parents[drop]] = score(node, reduced) - base;
  }
  return base;
}

}  // namespace dagbag
