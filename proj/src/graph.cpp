#include "dagbag/graph.hpp"

#include "dagbag/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace dagbag {

std::string to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Add:
      return "add";
    case OpKind::Delete:
      return "delete";
    case OpKind::Reverse:
      return "reverse";
  }
  return "?";
}

OpKind op_kind_from_string(const std::string& text) {
  if (text == "add") return OpKind::Add;
  if (text == "delete") return OpKind::Delete;
  if (text == "reverse") return OpKind::Reverse;
  throw Error("unknown operation kind '" + text + "'");
}

std::string to_string(const Operation& op) {
  return to_string(op.kind) + " " + std::to_string(op.source) + "->" + std::to_string(op.target);
}

Dag::Dag(std::size_t p)
    : adjacency_(p), parents_(p), children_(p), anc_(p, NodeSet(p)), desc_(p, NodeSet(p)) {
  for (NodeId i = 0; i < p; ++i) {
    anc_[i].set(i);
    desc_[i].set(i);
  }
}

Dag Dag::from_edges(std::size_t p, std::span<const Edge> edges) {
  Dag g(p);
  for (const Edge& e : edges) {
    g.check_node(e.source);
    g.check_node(e.target);
    if (e.source == e.target) throw CycleError("self-loop on node " + std::to_string(e.source));
    if (g.adjacent(e.source, e.target)) {
      throw DuplicateEdge("edge between " + std::to_string(e.source) + " and " +
                          std::to_string(e.target) + " given twice");
    }
    g.insert_edge(e.source, e.target);
  }
  if (!is_acyclic(g.adjacency_)) throw CycleError("edge list contains a directed cycle");
  g.refresh_reachability();
  return g;
}

Dag Dag::from_adjacency(const AdjacencyMatrix& adjacency) {
  const std::size_t p = adjacency.size();
  std::vector<Edge> edges;
  for (NodeId i = 0; i < p; ++i)
    for (NodeId j = 0; j < p; ++j)
      if (adjacency(i, j)) edges.push_back({i, j});
  return from_edges(p, edges);
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId i = 0; i < size(); ++i)
    for (NodeId j : children_[i]) out.push_back({i, j});
  return out;
}

const NodeSet& Dag::ancestors(NodeId node) const {
  if (!reach_valid_) throw std::logic_error("reachability cache is stale");
  return anc_.at(node);
}

const NodeSet& Dag::descendants(NodeId node) const {
  if (!reach_valid_) throw std::logic_error("reachability cache is stale");
  return desc_.at(node);
}

void Dag::refresh_reachability() {
  const std::size_t p = size();
  const std::vector<NodeId> order = topological_order();
  for (NodeId i = 0; i < p; ++i) {
    anc_[i].reset();
    anc_[i].set(i);
    desc_[i].reset();
    desc_[i].set(i);
  }
  for (NodeId v : order)
    for (NodeId pa : parents_[v]) anc_[v] |= anc_[pa];
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (NodeId ch : children_[*it]) desc_[*it] |= desc_[ch];
  reach_valid_ = true;
}

std::vector<NodeId> Dag::topological_order() const {
  const std::size_t p = size();
  std::vector<std::size_t> indegree(p);
  for (NodeId i = 0; i < p; ++i) indegree[i] = parents_[i].size();
  std::vector<NodeId> order;
  order.reserve(p);
  for (NodeId i = 0; i < p; ++i)
    if (indegree[i] == 0) order.push_back(i);
  for (std::size_t head = 0; head < order.size(); ++head)
    for (NodeId ch : children_[order[head]])
      if (--indegree[ch] == 0) order.push_back(ch);
  return order;
}

void Dag::check_node(NodeId node) const {
  if (node >= size()) {
    throw InvalidNode("node " + std::to_string(node) + " out of range for " +
                      std::to_string(size()) + " nodes");
  }
}

void Dag::insert_edge(NodeId source, NodeId target) {
  adjacency_.set(source, target, true);
  auto& pa = parents_[target];
  pa.insert(std::lower_bound(pa.begin(), pa.end(), source), source);
  auto& ch = children_[source];
  ch.insert(std::lower_bound(ch.begin(), ch.end(), target), target);
  ++edge_count_;
}

void Dag::erase_edge(NodeId source, NodeId target) {
  adjacency_.set(source, target, false);
  auto& pa = parents_[target];
  pa.erase(std::lower_bound(pa.begin(), pa.end(), source));
  auto& ch = children_[source];
  ch.erase(std::lower_bound(ch.begin(), ch.end(), target));
  --edge_count_;
}

void Dag::extend_reachability(NodeId source, NodeId target) {
  const NodeSet up = anc_[source];
  const NodeSet down = desc_[target];
  for (auto a = up.find_first(); a != NodeSet::npos; a = up.find_next(a)) desc_[a] |= down;
  for (auto d = down.find_first(); d != NodeSet::npos; d = down.find_next(d)) anc_[d] |= up;
}

bool Dag::path_exists(NodeId from, NodeId to, const Edge* skip) const {
  std::vector<std::uint8_t> seen(size(), 0);
  std::vector<NodeId> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId ch : children_[v]) {
      if (skip != nullptr && v == skip->source && ch == skip->target) continue;
      if (ch == to) return true;
      if (!seen[ch]) {
        seen[ch] = 1;
        stack.push_back(ch);
      }
    }
  }
  return false;
}

bool Dag::creates_cycle(const Operation& op) const {
  switch (op.kind) {
    case OpKind::Add:
      if (reach_valid_) return desc_[op.target].test(op.source);
      return path_exists(op.target, op.source, nullptr);
    case OpKind::Delete:
      return false;
    case OpKind::Reverse: {
      if (reach_valid_) {
        for (NodeId k : parents_[op.target])
          if (k != op.source && desc_[op.source].test(k)) return true;
        return false;
      }
      const Edge skip{op.source, op.target};
      return path_exists(op.source, op.target, &skip);
    }
  }
  return false;
}

void Dag::apply(const Operation& op, bool refresh) {
  check_node(op.source);
  check_node(op.target);
  if (op.source == op.target) throw CycleError("self-loop on node " + std::to_string(op.source));
  const std::string label = to_string(op);
  switch (op.kind) {
    case OpKind::Add:
      if (adjacent(op.source, op.target)) throw DuplicateEdge(label + ": pair already adjacent");
      if (creates_cycle(op)) throw CycleError(label + " creates a directed cycle");
      insert_edge(op.source, op.target);
      if (reach_valid_) extend_reachability(op.source, op.target);
      break;
    case OpKind::Delete:
      if (!has_edge(op.source, op.target)) throw MissingEdge(label + ": edge absent");
      erase_edge(op.source, op.target);
      reach_valid_ = false;
      break;
    case OpKind::Reverse:
      if (!has_edge(op.source, op.target)) throw MissingEdge(label + ": edge absent");
      if (creates_cycle(op)) throw CycleError(label + " creates a directed cycle");
      erase_edge(op.source, op.target);
      insert_edge(op.target, op.source);
      reach_valid_ = false;
      break;
  }
  if (refresh && !reach_valid_) refresh_reachability();
}

Dag apply_operation(const Dag& g, const Operation& op) {
  Dag out = g;
  out.apply(op);
  return out;
}

bool is_acyclic(const AdjacencyMatrix& adjacency) {
  const std::size_t p = adjacency.size();
  std::vector<std::size_t> indegree(p, 0);
  for (NodeId i = 0; i < p; ++i)
    for (NodeId j = 0; j < p; ++j)
      if (adjacency(i, j)) ++indegree[j];
  std::vector<NodeId> ready;
  for (NodeId i = 0; i < p; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t removed = 0;
  while (!ready.empty()) {
    const NodeId v = ready.back();
    ready.pop_back();
    ++removed;
    for (NodeId j = 0; j < p; ++j)
      if (adjacency(v, j) && --indegree[j] == 0) ready.push_back(j);
  }
  return removed == p;
}

namespace {

NodeSet traverse(const AdjacencyMatrix& adjacency, NodeId node, bool forward) {
  const std::size_t p = adjacency.size();
  NodeSet seen(p);
  seen.set(node);
  std::vector<NodeId> stack{node};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u = 0; u < p; ++u) {
      const bool linked = forward ? adjacency(v, u) : adjacency(u, v);
      if (linked && !seen.test(u)) {
        seen.set(u);
        stack.push_back(u);
      }
    }
  }
  return seen;
}

}  // namespace

NodeSet traverse_descendants(const AdjacencyMatrix& adjacency, NodeId node) {
  return traverse(adjacency, node, true);
}

NodeSet traverse_ancestors(const AdjacencyMatrix& adjacency, NodeId node) {
  return traverse(adjacency, node, false);
}

SkeletonGraph skeleton(const Dag& g) {
  SkeletonGraph s{g.size(), {}};
  for (const Edge& e : g.edges()) s.edges.insert(canonical_pair(e.source, e.target));
  return s;
}

std::set<VStructure> v_structures(const Dag& g) {
  std::set<VStructure> out;
  for (NodeId k = 0; k < g.size(); ++k) {
    const auto& pa = g.parents(k);
    for (std::size_t a = 0; a < pa.size(); ++a)
      for (std::size_t b = a + 1; b < pa.size(); ++b)
        if (!g.adjacent(pa[a], pa[b])) out.insert({k, {pa[a], pa[b]}});
  }
  return out;
}

SkeletonGraph moral_graph(const Dag& g) {
  SkeletonGraph m = skeleton(g);
  for (NodeId k = 0; k < g.size(); ++k) {
    const auto& pa = g.parents(k);
    for (std::size_t a = 0; a < pa.size(); ++a)
      for (std::size_t b = a + 1; b < pa.size(); ++b) m.edges.insert({pa[a], pa[b]});
  }
  return m;
}

bool is_i_equivalent(const Dag& g1, const Dag& g2) {
  if (g1.size() != g2.size()) {
    throw DimensionMismatch("graphs have " + std::to_string(g1.size()) + " and " +
                            std::to_string(g2.size()) + " nodes");
  }
  return skeleton(g1) == skeleton(g2) && v_structures(g1) == v_structures(g2);
}

}  // namespace dagbag
