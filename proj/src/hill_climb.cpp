#include "dagbag/hill_climb.hpp"

#include "dagbag/error.hpp"
#include "dagbag/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dagbag {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged:
      return "converged";
    case StopReason::EarlyStopped:
      return "early_stopped";
    case StopReason::MaxSteps:
      return "max_steps";
  }
  return "?";
}

std::vector<NodeId> touched_nodes(const Operation& op) {
  if (op.kind == OpKind::Reverse) return {op.source, op.target};
  return {op.target};
}

std::vector<Operation> refresh_deltas(const Dag& current, const Operation& last_op) {
  std::vector<Operation> out;
  const std::size_t p = current.size();
  for (NodeId c : touched_nodes(last_op)) {
    for (NodeId k = 0; k < p; ++k) {
      if (k == c) continue;
      if (current.has_edge(k, c)) {
        out.push_back({OpKind::Delete, k, c});
        out.push_back({OpKind::Reverse, k, c});
      } else if (current.has_edge(c, k)) {
        out.push_back({OpKind::Reverse, c, k});
      } else {
        out.push_back({OpKind::Add, k, c});
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PreOpReachability PreOpReachability::capture(const Dag& g, const Operation& op) {
  return {g.ancestors(op.source), g.descendants(op.target)};
}

DeltaCache::DeltaCache(std::size_t p)
    : p_(p),
      deltas_(p * p, std::numeric_limits<double>::infinity()),
      status_(p * p, AcyclicStatus::Unknown) {}

void DeltaCache::refresh_column(const GramScorer& scorer, const Dag& g, NodeId l) {
  const auto& pa = g.parents(l);
  std::span<double> column(deltas_.data() + l * p_, p_);
  try {
    scorer.column_deltas(l, pa, column);
  } catch (const SingularDesign&) {
    // unreachable from a search (every visited parent set was scored), but a
    // caller-supplied start graph may carry one: nothing here is eligible.
    std::fill(column.begin(), column.end(), std::numeric_limits<double>::infinity());
  }
}

double DeltaCache::delta(const Operation& op) const noexcept {
  if (op.kind == OpKind::Reverse) return entry(op.source, op.target) + entry(op.target, op.source);
  return entry(op.source, op.target);
}

void DeltaCache::mark_cyclic(const Dag& g, const NodeSet& up, const NodeSet& down) {
  for (auto u = up.find_first(); u != NodeSet::npos; u = up.find_next(u)) {
    for (auto v = down.find_first(); v != NodeSet::npos; v = down.find_next(v)) {
      if (u == v) continue;
      if (!g.adjacent(u, v)) {
        if (status(v, u) == AcyclicStatus::Acyclic) set_status(v, u, AcyclicStatus::Cyclic);
      } else if (g.has_edge(u, v)) {
        if (status(u, v) == AcyclicStatus::Acyclic) set_status(u, v, AcyclicStatus::Cyclic);
      }
    }
  }
}

void DeltaCache::mark_unknown(const Dag& g, const NodeSet& up, const NodeSet& down) {
  for (auto u = up.find_first(); u != NodeSet::npos; u = up.find_next(u)) {
    for (auto v = down.find_first(); v != NodeSet::npos; v = down.find_next(v)) {
      if (u == v) continue;
      if (!g.adjacent(u, v)) {
        if (status(v, u) == AcyclicStatus::Cyclic) set_status(v, u, AcyclicStatus::Unknown);
      } else if (g.has_edge(u, v)) {
        if (status(u, v) == AcyclicStatus::Cyclic) set_status(u, v, AcyclicStatus::Unknown);
      }
    }
  }
}

void DeltaCache::propagate_acyclic_status(const Dag& current, const Operation& last_op,
                                          const PreOpReachability& pre) {
  switch (last_op.kind) {
    case OpKind::Add:
      mark_cyclic(current, pre.anc_source, pre.desc_target);
      break;
    case OpKind::Delete:
      mark_unknown(current, pre.anc_source, pre.desc_target);
      break;
    case OpKind::Reverse:
      mark_unknown(current, pre.anc_source, pre.desc_target);
      mark_cyclic(current, current.ancestors(last_op.target), current.descendants(last_op.source));
      break;
  }
  set_status(last_op.source, last_op.target, AcyclicStatus::Unknown);
  set_status(last_op.target, last_op.source, AcyclicStatus::Unknown);
  last_op_ = last_op;
}

namespace {

AdjacencyMatrix edge_matrix(std::size_t p, const std::vector<Edge>& edges, const char* what) {
  AdjacencyMatrix m(p);
  for (const Edge& e : edges) {
    if (e.source >= p || e.target >= p || e.source == e.target) {
      throw InfeasibleConstraints(std::string(what) + " edge " + std::to_string(e.source) + "->" +
                                  std::to_string(e.target) + " is not a valid edge");
    }
    m.set(e.source, e.target, true);
  }
  return m;
}

}  // namespace

HillClimber::HillClimber(const Dataset& data, SearchSettings settings, std::optional<Dag> init,
                         const Dag* truth)
    : data_(&data),
      settings_(std::move(settings)),
      scorer_(data, settings_.kind),
      truth_(truth) {
  const std::size_t p = data.p();
  const auto& cons = settings_.constraints;
  black_ = edge_matrix(p, cons.blacklist, "blacklist");
  white_ = edge_matrix(p, cons.whitelist, "whitelist");
  for (const Edge& e : cons.whitelist) {
    if (black_(e.source, e.target)) {
      throw InfeasibleConstraints("edge " + std::to_string(e.source) + "->" +
                                  std::to_string(e.target) + " is both black- and whitelisted");
    }
  }
  try {
    (void)Dag::from_edges(p, cons.whitelist);
  } catch (const Error& err) {
    throw InfeasibleConstraints(std::string("whitelist is not a DAG: ") + err.what());
  }
  if (truth_ != nullptr && truth_->size() != p) {
    throw DimensionMismatch("truth graph has " + std::to_string(truth_->size()) + " nodes");
  }

  graph_ = init ? std::move(*init) : Dag(p);
  if (graph_.size() != p) {
    throw DimensionMismatch("initial graph has " + std::to_string(graph_.size()) + " nodes");
  }
  if (!graph_.reachability_valid()) graph_.refresh_reachability();
  for (const Edge& e : graph_.edges()) {
    if (black_(e.source, e.target)) {
      throw InfeasibleConstraints("initial graph contains blacklisted edge " +
                                  std::to_string(e.source) + "->" + std::to_string(e.target));
    }
  }
  for (const Edge& e : cons.whitelist) {
    if (graph_.has_edge(e.source, e.target)) continue;
    try {
      graph_.apply({OpKind::Add, e.source, e.target});
    } catch (const Error& err) {
      throw InfeasibleConstraints(std::string("cannot place whitelist edge: ") + err.what());
    }
  }
  initial_ = graph_;

  cache_ = DeltaCache(p);
  initial_score_ = 0.0;
  for (NodeId l = 0; l < p; ++l) {
    cache_.refresh_column(scorer_, graph_, l);
    initial_score_ += scorer_.score(l, graph_.parents(l));
  }
  score_ = initial_score_;
  rebuild_statuses();
  if (truth_ != nullptr) {
    for (const Edge& e : graph_.edges())
      if (truth_->adjacent(e.source, e.target)) ++correct_;
  }
}

void HillClimber::rebuild_statuses() {
  const std::size_t p = graph_.size();
  for (NodeId k = 0; k < p; ++k) {
    for (NodeId l = 0; l < p; ++l) {
      if (k == l) continue;
      std::optional<Operation> op;
      if (graph_.has_edge(k, l)) {
        op = Operation{OpKind::Reverse, k, l};
      } else if (!graph_.has_edge(l, k)) {
        op = Operation{OpKind::Add, k, l};
      }
      if (!op) continue;
      bool cyclic = false;
      if (settings_.incremental) {
        cyclic = graph_.creates_cycle(*op);
      } else {
        AdjacencyMatrix edited = graph_.adjacency();
        if (op->kind == OpKind::Reverse) {
          edited.set(k, l, false);
          edited.set(l, k, true);
        } else {
          edited.set(k, l, true);
        }
        cyclic = !is_acyclic(edited);
      }
      cache_.set_status(k, l, cyclic ? AcyclicStatus::Cyclic : AcyclicStatus::Acyclic);
    }
  }
}

bool HillClimber::is_valid(const Operation& op) const {
  const std::size_t p = graph_.size();
  if (op.source >= p || op.target >= p || op.source == op.target) return false;
  if (op.kind == OpKind::Add) return !graph_.adjacent(op.source, op.target);
  return graph_.has_edge(op.source, op.target);
}

bool HillClimber::allowed(const Operation& op) const {
  switch (op.kind) {
    case OpKind::Add:
      return !black_(op.source, op.target);
    case OpKind::Delete:
      return !white_(op.source, op.target);
    case OpKind::Reverse:
      return !white_(op.source, op.target) && !black_(op.target, op.source);
  }
  return false;
}

AcyclicStatus HillClimber::resolve(NodeId k, NodeId l) {
  AcyclicStatus s = cache_.status(k, l);
  if (s != AcyclicStatus::Unknown) return s;
  const OpKind kind = graph_.has_edge(k, l) ? OpKind::Reverse : OpKind::Add;
  s = graph_.creates_cycle({kind, k, l}) ? AcyclicStatus::Cyclic : AcyclicStatus::Acyclic;
  cache_.set_status(k, l, s);
  return s;
}

bool HillClimber::eligible(const Operation& op) {
  if (!is_valid(op) || !allowed(op)) return false;
  if (!std::isfinite(cache_.delta(op))) return false;
  if (op.kind == OpKind::Delete) return true;
  return resolve(op.source, op.target) == AcyclicStatus::Acyclic;
}

std::optional<std::pair<Operation, double>> HillClimber::best_operation() {
  const std::size_t p = graph_.size();
  const double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  Operation best_op{};
  bool found = false;

  auto consider = [&](const Operation& op, double value, bool needs_check) {
    if (!(value <= best)) return;
    if (value == best && found && !(op < best_op)) return;
    if (needs_check && resolve(op.source, op.target) != AcyclicStatus::Acyclic) return;
    best = value;
    best_op = op;
    found = true;
  };

  for (NodeId l = 0; l < p; ++l) {
    for (NodeId k = 0; k < p; ++k) {
      if (k == l) continue;
      const double own = cache_.entry(k, l);
      if (graph_.has_edge(k, l)) {
        if (white_(k, l)) continue;
        consider({OpKind::Delete, k, l}, own, false);
        if (!black_(l, k)) consider({OpKind::Reverse, k, l}, own + cache_.entry(l, k), true);
      } else if (!graph_.has_edge(l, k) && !black_(k, l)) {
        consider({OpKind::Add, k, l}, own, true);
      }
    }
  }
  if (!found) return std::nullopt;
  return std::pair{best_op, best};
}

bool HillClimber::step() {
  if (finished_) return false;
  if (trace_.steps.size() >= settings_.max_steps) {
    trace_.stop_reason = StopReason::MaxSteps;
    finished_ = true;
    return false;
  }
  const auto best = best_operation();
  if (!best || best->second >= 0.0) {
    trace_.stop_reason = StopReason::Converged;
    finished_ = true;
    return false;
  }
  if (best->second > -settings_.eps) {
    trace_.stop_reason = StopReason::EarlyStopped;
    finished_ = true;
    return false;
  }

  const auto [op, delta] = *best;
  const PreOpReachability pre = PreOpReachability::capture(graph_, op);
  graph_.apply(op);
  score_ += delta;

  if (settings_.incremental) {
    for (NodeId c : touched_nodes(op)) cache_.refresh_column(scorer_, graph_, c);
    cache_.propagate_acyclic_status(graph_, op, pre);
  } else {
    for (NodeId l = 0; l < graph_.size(); ++l) cache_.refresh_column(scorer_, graph_, l);
    rebuild_statuses();
    cache_.set_last_op(op);
  }

  TraceStep rec;
  rec.step = trace_.steps.size();
  rec.op = op;
  rec.delta = delta;
  rec.total_edges = graph_.edge_count();
  if (truth_ != nullptr) {
    const bool hit = truth_->adjacent(op.source, op.target);
    if (op.kind == OpKind::Add && hit) ++correct_;
    if (op.kind == OpKind::Delete && hit) --correct_;
    rec.correct_edges = correct_;
  }
  trace_.steps.push_back(rec);
  return true;
}

SearchResult HillClimber::run() {
  while (step()) {
  }
  SearchResult out;
  out.initial = initial_;
  out.graph = graph_;
  out.trace = trace_;
  out.initial_score = initial_score_;
  out.final_score = 0.0;
  for (NodeId l = 0; l < graph_.size(); ++l) out.final_score += scorer_.score(l, graph_.parents(l));
  return out;
}

SearchResult hill_climb(const Dataset& data, const SearchSettings& settings, std::optional<Dag> init,
                        const Dag* truth) {
  HillClimber climber(data, settings, std::move(init), truth);
  return climber.run();
}

SearchResult random_restart(const Dataset& data, const SearchSettings& settings,
                            const SearchResult& base, std::size_t restarts, std::size_t perturb,
                            std::uint64_t seed) {
  SearchResult best = base;
  AdjacencyMatrix white = edge_matrix(data.p(), settings.constraints.whitelist, "whitelist");
  AdjacencyMatrix black = edge_matrix(data.p(), settings.constraints.blacklist, "blacklist");
  for (std::size_t round = 1; round <= restarts; ++round) {
    auto engine = make_engine(seed, round);
    Dag g = best.graph;
    for (std::size_t t = 0; t < perturb; ++t) {
      std::vector<Operation> moves;
      for (const Edge& e : g.edges()) {
        if (white(e.source, e.target)) continue;
        moves.push_back({OpKind::Delete, e.source, e.target});
        const Operation rev{OpKind::Reverse, e.source, e.target};
        if (!black(e.target, e.source) && !g.creates_cycle(rev)) moves.push_back(rev);
      }
      if (moves.empty()) break;
      g.apply(moves[uniform_index(engine, moves.size())]);
    }
    SearchResult candidate = hill_climb(data, settings, std::move(g));
    if (candidate.final_score < best.final_score) best = std::move(candidate);
  }
  return best;
}

SearchResult learn(const Dataset& data, const SearchSettings& settings, std::uint64_t seed,
                   const Dag* truth, std::optional<Dag> init) {
  SearchResult result = hill_climb(data, settings, std::move(init), truth);
  if (settings.restarts > 0) {
    result = random_restart(data, settings, result, settings.restarts, settings.perturb, seed);
  }
  return result;
}

}  // namespace dagbag
