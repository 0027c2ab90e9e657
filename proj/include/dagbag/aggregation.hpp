#pragma once

#include "dagbag/bootstrap.hpp"
#include "dagbag/graph.hpp"

#include <cstddef>
#include <vector>

namespace dagbag {

// Directed-edge selection counts over an ensemble of B graphs.
class SelectionTable {
 public:
  SelectionTable() = default;
  SelectionTable(std::size_t p, std::size_t boot);

  std::size_t p() const noexcept { return p_; }
  std::size_t boot() const noexcept { return boot_; }

  void record(const Dag& g);

  std::size_t count(NodeId i, NodeId j) const noexcept { return counts_[i * p_ + j]; }
  double sf(NodeId i, NodeId j) const noexcept {
    return static_cast<double>(count(i, j)) / static_cast<double>(boot_);
  }
  // p_e + (1 - alpha/2) p_{e*}
  double gsf(NodeId i, NodeId j, double alpha) const;
  // 2 B gsf = 2 c_e + (2 - alpha) c_{e*}; exact for alpha a multiple of 1/2.
  double gsf_numerator(NodeId i, NodeId j, double alpha) const noexcept {
    return 2.0 * static_cast<double>(count(i, j)) + (2.0 - alpha) * static_cast<double>(count(j, i));
  }
  // gsf > 1/2, compared as 2 B gsf > B.
  bool selected(NodeId i, NodeId j, double alpha) const noexcept {
    return gsf_numerator(i, j, alpha) > static_cast<double>(boot_);
  }

  // C = sum of all selection frequencies.
  double constant() const noexcept;
  std::size_t total_count() const noexcept;

 private:
  std::size_t p_ = 0;
  std::size_t boot_ = 0;
  std::vector<std::size_t> counts_;
};

SelectionTable selection_frequencies(const Ensemble& e);

// Sum over unordered pairs: 0 when the pair agrees, 1 when one graph has an
// edge the other lacks, alpha when both have it in opposite directions.
double gshd_distance(const Dag& g1, const Dag& g2, double alpha);

// Closed form sum_{e in g} (1 - 2 gsf_e) + C of the mean GSHD(alpha)
// distance from g to the ensemble.
double aggregation_score(const Dag& g, const SelectionTable& table, double alpha);

// 2 B times aggregation_score, accumulated from integer counts; exact for
// alpha a multiple of 1/2 and suitable for equality comparisons.
double scaled_aggregation_score(const Dag& g, const SelectionTable& table, double alpha);

struct AggregationResult {
  Dag graph;
  std::vector<Edge> additions;     // edges kept, in the order added
  std::vector<Edge> cyclic_edges;  // edges over threshold that failed the acyclic check
  double alpha = 1.0;
  bool certified_optimal = true;   // |cyclic_edges| <= 1
};

// Greedy minimizer of the GSHD(alpha) aggregation score: edges with gsf > 1/2
// in descending gsf order (ties by (source, target)), each added unless it
// would close a cycle.
AggregationResult aggregate(const SelectionTable& table, double alpha);
AggregationResult aggregate(const Ensemble& e, double alpha);

// SHD aggregation, i.e. aggregate with alpha = 2 where gsf reduces to sf.
AggregationResult shd_aggregate(const Ensemble& e);

}  // namespace dagbag
