#pragma once

#include <boost/dynamic_bitset.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dagbag {

using NodeId = std::size_t;
using NodeSet = boost::dynamic_bitset<std::uint64_t>;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  auto operator<=>(const Edge&) const = default;
};

// Declaration order is the tie-break order used by the search.
enum class OpKind : std::uint8_t { Add = 0, Delete = 1, Reverse = 2 };

struct Operation {
  OpKind kind = OpKind::Add;
  NodeId source = 0;
  NodeId target = 0;
  auto operator<=>(const Operation&) const = default;
};

std::string to_string(OpKind kind);
OpKind op_kind_from_string(const std::string& text);
std::string to_string(const Operation& op);

// Dense p x p boolean matrix, A(i, j) = 1 iff i -> j.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t p) : p_(p), cells_(p * p, 0) {}

  std::size_t size() const noexcept { return p_; }
  bool operator()(NodeId i, NodeId j) const noexcept { return cells_[i * p_ + j] != 0; }
  void set(NodeId i, NodeId j, bool value) noexcept { cells_[i * p_ + j] = value ? 1 : 0; }

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t p_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Directed acyclic graph over nodes 0..p-1.
//
// Parent and child lists are kept sorted. Ancestor and descendant sets are
// reflexive (each contains the node itself) and are maintained as a cache
// with an explicit validity flag: mutation keeps them valid by default, and
// callers that batch edits may defer the refresh.
class Dag {
 public:
  Dag() = default;
  explicit Dag(std::size_t p);

  // Throws CycleError, DuplicateEdge (either direction repeated) or InvalidNode.
  static Dag from_edges(std::size_t p, std::span<const Edge> edges);
  static Dag from_adjacency(const AdjacencyMatrix& adjacency);

  std::size_t size() const noexcept { return parents_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  bool has_edge(NodeId source, NodeId target) const noexcept { return adjacency_(source, target); }
  bool adjacent(NodeId a, NodeId b) const noexcept {
    return adjacency_(a, b) || adjacency_(b, a);
  }

  const std::vector<NodeId>& parents(NodeId node) const { return parents_[node]; }
  const std::vector<NodeId>& children(NodeId node) const { return children_[node]; }
  const AdjacencyMatrix& adjacency() const noexcept { return adjacency_; }

  // Edges in (source, target) lexicographic order.
  std::vector<Edge> edges() const;

  bool reachability_valid() const noexcept { return reach_valid_; }
  // Throws std::logic_error when the cache is stale.
  const NodeSet& ancestors(NodeId node) const;
  const NodeSet& descendants(NodeId node) const;
  void refresh_reachability();

  // Would applying `op` leave the graph acyclic? Preconditions are not checked.
  bool creates_cycle(const Operation& op) const;

  // In-place edit. Throws MissingEdge / DuplicateEdge / CycleError / InvalidNode
  // and leaves the graph untouched on failure.
  void apply(const Operation& op, bool refresh = true);

  std::vector<NodeId> topological_order() const;

  bool operator==(const Dag& other) const { return adjacency_ == other.adjacency_; }

 private:
  void check_node(NodeId node) const;
  void insert_edge(NodeId source, NodeId target);
  void erase_edge(NodeId source, NodeId target);
  void extend_reachability(NodeId source, NodeId target);
  bool path_exists(NodeId from, NodeId to, const Edge* skip) const;

  AdjacencyMatrix adjacency_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeSet> anc_;
  std::vector<NodeSet> desc_;
  std::size_t edge_count_ = 0;
  bool reach_valid_ = true;
};

Dag apply_operation(const Dag& g, const Operation& op);

// Cache-free check by repeated removal of sources.
bool is_acyclic(const AdjacencyMatrix& adjacency);

// Reflexive closures recomputed by graph traversal, ignoring any cache.
NodeSet traverse_descendants(const AdjacencyMatrix& adjacency, NodeId node);
NodeSet traverse_ancestors(const AdjacencyMatrix& adjacency, NodeId node);

// Unordered pairs stored canonically as (min, max).
struct SkeletonGraph {
  std::size_t p = 0;
  std::set<std::pair<NodeId, NodeId>> edges;
  bool operator==(const SkeletonGraph&) const = default;
};

struct VStructure {
  NodeId collider = 0;
  std::pair<NodeId, NodeId> parents;  // canonical, first < second
  auto operator<=>(const VStructure&) const = default;
};

SkeletonGraph skeleton(const Dag& g);
std::set<VStructure> v_structures(const Dag& g);
SkeletonGraph moral_graph(const Dag& g);
bool is_i_equivalent(const Dag& g1, const Dag& g2);

inline std::pair<NodeId, NodeId> canonical_pair(NodeId a, NodeId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace dagbag
