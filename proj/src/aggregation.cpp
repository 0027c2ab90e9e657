#include "dagbag/aggregation.hpp"

#include "dagbag/error.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dagbag {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0)) throw Error("alpha must be positive, got " + std::to_string(alpha));
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionMismatch("node counts differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

SelectionTable::SelectionTable(std::size_t p, std::size_t boot)
    : p_(p), boot_(boot), counts_(p * p, 0) {}

void SelectionTable::record(const Dag& g) {
  require_same_size(g.size(), p_);
  for (const Edge& e : g.edges()) ++counts_[e.source * p_ + e.target];
}

double SelectionTable::gsf(NodeId i, NodeId j, double alpha) const {
  const double value = gsf_numerator(i, j, alpha) / (2.0 * static_cast<double>(boot_));
  if (value > 1.0 + 1e-12) throw std::logic_error("generalized selection frequency above 1");
  return value;
}

double SelectionTable::constant() const noexcept {
  return static_cast<double>(total_count()) / static_cast<double>(boot_);
}

std::size_t SelectionTable::total_count() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

SelectionTable selection_frequencies(const Ensemble& e) {
  if (e.graphs.empty()) throw Error("empty ensemble");
  SelectionTable table(e.p, e.graphs.size());
  for (const Dag& g : e.graphs) table.record(g);
  return table;
}

double gshd_distance(const Dag& g1, const Dag& g2, double alpha) {
  require_alpha(alpha);
  require_same_size(g1.size(), g2.size());
  const auto& a = g1.adjacency();
  const auto& b = g2.adjacency();
  double total = 0.0;
  for (NodeId i = 0; i < g1.size(); ++i) {
    for (NodeId j = i + 1; j < g1.size(); ++j) {
      const int diff = (a(i, j) != b(i, j)) + (a(j, i) != b(j, i));
      if (diff == 1) total += 1.0;
      if (diff == 2) total += alpha;
    }
  }
  return total;
}

double aggregation_score(const Dag& g, const SelectionTable& table, double alpha) {
  require_alpha(alpha);
  require_same_size(g.size(), table.p());
  double total = table.constant();
  for (const Edge& e : g.edges()) total += 1.0 - 2.0 * table.gsf(e.source, e.target, alpha);
  return total;
}

double scaled_aggregation_score(const Dag& g, const SelectionTable& table, double alpha) {
  require_alpha(alpha);
  require_same_size(g.size(), table.p());
  const double twice_boot = 2.0 * static_cast<double>(table.boot());
  double total = 2.0 * static_cast<double>(table.total_count());
  for (const Edge& e : g.edges())
    total += twice_boot - 2.0 * table.gsf_numerator(e.source, e.target, alpha);
  return total;
}

AggregationResult aggregate(const SelectionTable& table, double alpha) {
  require_alpha(alpha);
  const std::size_t p = table.p();
  struct Candidate {
    double weight;
    Edge edge;
  };
  std::vector<Candidate> candidates;
  for (NodeId i = 0; i < p; ++i) {
    for (NodeId j = 0; j < p; ++j) {
      if (i == j || !table.selected(i, j, alpha)) continue;
      (void)table.gsf(i, j, alpha);  // consistency check: gsf <= 1
      candidates.push_back({table.gsf_numerator(i, j, alpha), {i, j}});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.edge < b.edge;
  });

  AggregationResult out;
  out.alpha = alpha;
  out.graph = Dag(p);
  for (const Candidate& c : candidates) {
    const Operation add{OpKind::Add, c.edge.source, c.edge.target};
    if (out.graph.adjacent(c.edge.source, c.edge.target) || out.graph.creates_cycle(add)) {
      out.cyclic_edges.push_back(c.edge);
      continue;
    }
    out.graph.apply(add);
    out.additions.push_back(c.edge);
  }
  out.certified_optimal = out.cyclic_edges.size() <= 1;
  return out;
}

AggregationResult aggregate(const Ensemble& e, double alpha) {
  return aggregate(selection_frequencies(e), alpha);
}

AggregationResult shd_aggregate(const Ensemble& e) { return aggregate(e, 2.0); }

}  // namespace dagbag
