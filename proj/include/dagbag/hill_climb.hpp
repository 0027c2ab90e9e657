#pragma once

#include "dagbag/dataset.hpp"
#include "dagbag/graph.hpp"
#include "dagbag/score.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dagbag {

struct Constraints {
  std::vector<Edge> blacklist;  // never present
  std::vector<Edge> whitelist;  // always present, never deleted or reversed
};

struct SearchSettings {
  ScoreKind kind = ScoreKind::Bic;
  double eps = 1e-6;  // stop once the best decrease is smaller than eps
  std::size_t max_steps = 2000;
  Constraints constraints;
  // Random restarts applied by learn(); hill_climb() ignores them.
  std::size_t restarts = 0;
  std::size_t perturb = 0;
  // false recomputes every delta and every acyclic check at each step.
  bool incremental = true;
};

enum class StopReason { Converged, EarlyStopped, MaxSteps };
std::string to_string(StopReason reason);

struct TraceStep {
  std::size_t step = 0;
  Operation op;
  double delta = 0.0;
  std::size_t total_edges = 0;
  std::optional<std::size_t> correct_edges;
};

struct SearchTrace {
  std::vector<TraceStep> steps;
  StopReason stop_reason = StopReason::Converged;
};

struct SearchResult {
  Dag initial;
  Dag graph;
  SearchTrace trace;
  double initial_score = 0.0;
  double final_score = 0.0;
};

enum class AcyclicStatus : std::uint8_t { Acyclic, Cyclic, Unknown };

// Nodes whose parent set an operation rewrites: the target, plus the
// source for a reversal.
std::vector<NodeId> touched_nodes(const Operation& op);

// Operations valid on `current` (the graph after `last_op`) whose score
// change may differ from the previous step: exactly those rewriting a
// parent set that `last_op` rewrote.
std::vector<Operation> refresh_deltas(const Dag& current, const Operation& last_op);

// Reachability of the endpoints of an operation, captured before it is applied.
struct PreOpReachability {
  NodeSet anc_source, desc_target;
  static PreOpReachability capture(const Dag& g, const Operation& op);
};

// Cached score changes and acyclic status of every candidate operation.
//
// Both tables are keyed by an ordered pair (k, l). The delta entry stores the
// change of node l's neighborhood score when k joins (k not a parent) or
// leaves (k a parent) its parent set; a reversal k->l combines entries (k, l)
// and (l, k). The status entry belongs to "add k->l" while the pair is
// non-adjacent and to "reverse k->l" while k->l is present.
class DeltaCache {
 public:
  DeltaCache() = default;
  explicit DeltaCache(std::size_t p);

  std::size_t size() const noexcept { return p_; }

  double entry(NodeId k, NodeId l) const noexcept { return deltas_[l * p_ + k]; }
  void refresh_column(const GramScorer& scorer, const Dag& g, NodeId l);
  // +infinity when the edited parent set is singular.
  double delta(const Operation& op) const noexcept;

  AcyclicStatus status(NodeId k, NodeId l) const noexcept { return status_[k * p_ + l]; }
  void set_status(NodeId k, NodeId l, AcyclicStatus s) noexcept { status_[k * p_ + l] = s; }

  // Updates statuses after `last_op` produced `current`, given the reachability
  // sets of the graph before `last_op` (an, de below) and the fresh ones of
  // `current` (an', de'):
  //  add i*->j*:     acyclic add i->j turns cyclic iff i in de(j*), j in an(i*);
  //                  acyclic reverse i->j turns cyclic iff j in de(j*), i in an(i*).
  //  delete i*->j*:  cyclic entries passing the same membership tests become Unknown.
  //  reverse i*->j*: the delete rule, then the add rule for the new edge j*->i*
  //                  on an'(j*), de'(i*). The pre-op sets would also count paths
  //                  through the edge that was just removed.
  // The two entries of the edited pair change meaning and are set to Unknown.
  void propagate_acyclic_status(const Dag& current, const Operation& last_op,
                                const PreOpReachability& pre);

  const std::optional<Operation>& last_op() const noexcept { return last_op_; }
  void set_last_op(const Operation& op) { last_op_ = op; }

 private:
  void mark_cyclic(const Dag& g, const NodeSet& up, const NodeSet& down);
  void mark_unknown(const Dag& g, const NodeSet& up, const NodeSet& down);

  std::size_t p_ = 0;
  std::vector<double> deltas_;  // column-major: entry(k, l) at l * p + k
  std::vector<AcyclicStatus> status_;
  std::optional<Operation> last_op_;
};

// Greedy score-minimizing search. One instance is single-threaded.
class HillClimber {
 public:
  // Throws InfeasibleConstraints. `truth`, when given, drives the
  // correct-edge column of the trace and must outlive the climber.
  HillClimber(const Dataset& data, SearchSettings settings, std::optional<Dag> init = std::nullopt,
              const Dag* truth = nullptr);

  const Dag& graph() const noexcept { return graph_; }
  const DeltaCache& cache() const noexcept { return cache_; }
  const SearchTrace& trace() const noexcept { return trace_; }
  const GramScorer& scorer() const noexcept { return scorer_; }
  double current_score() const noexcept { return score_; }
  bool finished() const noexcept { return finished_; }

  bool eligible(const Operation& op);
  // Best eligible operation with ties broken by (kind, source, target).
  std::optional<std::pair<Operation, double>> best_operation();

  // Performs one step; false once the search has stopped.
  bool step();
  SearchResult run();

 private:
  void rebuild_statuses();
  bool is_valid(const Operation& op) const;
  bool allowed(const Operation& op) const;
  AcyclicStatus resolve(NodeId k, NodeId l);

  const Dataset* data_;
  SearchSettings settings_;
  GramScorer scorer_;
  AdjacencyMatrix black_;
  AdjacencyMatrix white_;
  Dag initial_;
  Dag graph_;
  DeltaCache cache_;
  SearchTrace trace_;
  const Dag* truth_;
  std::size_t correct_ = 0;
  double initial_score_ = 0.0;
  double score_ = 0.0;
  bool finished_ = false;
};

SearchResult hill_climb(const Dataset& data, const SearchSettings& settings,
                        std::optional<Dag> init = std::nullopt, const Dag* truth = nullptr);

// Best of `base` and `restarts` rounds of: perturb the current best by
// `perturb` random deletions or reversals, then climb again.
SearchResult random_restart(const Dataset& data, const SearchSettings& settings,
                            const SearchResult& base, std::size_t restarts, std::size_t perturb,
                            std::uint64_t seed);

// hill_climb followed by random_restart when settings.restarts > 0.
SearchResult learn(const Dataset& data, const SearchSettings& settings, std::uint64_t seed,
                   const Dag* truth = nullptr, std::optional<Dag> init = std::nullopt);

}  // namespace dagbag
