#include "support.hpp"

#include "dagbag/error.hpp"
#include "dagbag/hill_climb.hpp"
#include "dagbag/score.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace dagbag;
using support::make_dag;

namespace {

struct Move {
  Operation op;
  double delta;
};

AdjacencyMatrix edge_set(std::size_t p, const std::vector<Edge>& edges) {
  AdjacencyMatrix m(p);
  for (const Edge& e : edges) m.set(e.source, e.target, true);
  return m;
}

// Every eligible move on `a` with its score change recomputed from scratch.
std::vector<Move> oracle_moves(const Dataset& d, const AdjacencyMatrix& a, ScoreKind kind,
                               const Constraints& c) {
  const std::size_t p = a.size();
  const AdjacencyMatrix black = edge_set(p, c.blacklist);
  const AdjacencyMatrix white = edge_set(p, c.whitelist);
  std::vector<Move> out;
  for (NodeId k = 0; k < p; ++k) {
    for (NodeId l = 0; l < p; ++l) {
      if (k == l) continue;
      std::vector<Operation> ops;
      if (!a(k, l) && !a(l, k) && !black(k, l)) ops.push_back({OpKind::Add, k, l});
      if (a(k, l) && !white(k, l)) {
        ops.push_back({OpKind::Delete, k, l});
        if (!black(l, k)) ops.push_back({OpKind::Reverse, k, l});
      }
      for (const Operation& op : ops) {
        AdjacencyMatrix b = a;
        b.set(k, l, op.kind == OpKind::Add);
        if (op.kind == OpKind::Reverse) b.set(l, k, true);
        if (!support::dfs_acyclic(b)) continue;
        double delta = 0.0;
        for (NodeId t : touched_nodes(op)) {
          delta += support::oracle_score(d, t, support::parents_of(b, t), kind) -
                   support::oracle_score(d, t, support::parents_of(a, t), kind);
        }
        out.push_back({op, delta});
      }
    }
  }
  return out;
}

bool oracle_cyclic(const AdjacencyMatrix& a, NodeId k, NodeId l) {
  AdjacencyMatrix b = a;
  if (a(k, l)) {
    b.set(k, l, false);
    b.set(l, k, true);
  } else {
    b.set(k, l, true);
  }
  return !support::dfs_acyclic(b);
}

Dataset orthogonal_pair() {
  Eigen::MatrixXd x(4, 2);
  x << 1, 1, 1, -1, -1, 1, -1, -1;
  return Dataset::from_raw(x);
}

Constraints random_constraints(support::Gen& gen, std::size_t p) {
  Constraints c;
  const Dag w = support::random_dag(gen, p, 0.08);
  c.whitelist = w.edges();
  for (NodeId i = 0; i < p; ++i)
    for (NodeId j = 0; j < p; ++j)
      if (i != j && !w.has_edge(i, j) && gen.coin(0.08)) c.blacklist.push_back({i, j});
  return c;
}

}  // namespace

TEST_CASE("max_steps = 0 returns the start graph") {
  support::Gen gen(1);
  const Dataset d = support::random_data(gen, 40, 4);
  SearchSettings s;
  s.max_steps = 0;
  const Dag init = make_dag(4, {{0, 1}});
  const SearchResult r = hill_climb(d, s, init);
  CHECK(r.graph == init);
  CHECK(r.trace.steps.empty());
  CHECK(r.trace.stop_reason == StopReason::MaxSteps);
}

TEST_CASE("orthogonal columns converge to the empty graph") {
  const SearchResult r = hill_climb(orthogonal_pair(), SearchSettings{});
  CHECK(r.graph.edge_count() == 0);
  CHECK(r.trace.stop_reason == StopReason::Converged);
  CHECK(r.final_score == doctest::Approx(0.0));
}

TEST_CASE("two nearly collinear columns get one edge, the exhaustive optimum") {
  support::Gen gen(2);
  Eigen::MatrixXd x(60, 2);
  for (int i = 0; i < 60; ++i) {
    x(i, 0) = gen.normal();
    x(i, 1) = 0.999 * x(i, 0) + 1e-3 * gen.normal();
  }
  const Dataset d = Dataset::from_raw(x);
  const SearchResult r = hill_climb(d, SearchSettings{});
  CHECK(skeleton(r.graph).edges == std::set<std::pair<NodeId, NodeId>>{{0, 1}});

  double best = std::numeric_limits<double>::infinity();
  for (const Dag& g : support::all_dags(2))
    best = std::min(best, support::oracle_total(d, g.adjacency(), ScoreKind::Bic));
  CHECK(r.final_score == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("refresh_deltas lists the operations of touched neighborhoods") {
  Dag g = make_dag(4, {{0, 1}});
  const auto after_add = refresh_deltas(g, {OpKind::Add, 0, 1});
  auto has = [](const std::vector<Operation>& ops, Operation op) {
    return std::find(ops.begin(), ops.end(), op) != ops.end();
  };
  CHECK_FALSE(has(after_add, {OpKind::Add, 2, 3}));
  CHECK(has(after_add, {OpKind::Add, 2, 1}));
  CHECK(has(after_add, {OpKind::Delete, 0, 1}));
  CHECK(has(after_add, {OpKind::Reverse, 0, 1}));
  for (const Operation& op : after_add) {
    const auto t = touched_nodes(op);
    CHECK(std::find(t.begin(), t.end(), 1) != t.end());
  }

  Dag h = make_dag(4, {{1, 0}, {2, 1}});
  const auto after_rev = refresh_deltas(h, {OpKind::Reverse, 0, 1});
  CHECK(has(after_rev, {OpKind::Add, 3, 0}));
  CHECK(has(after_rev, {OpKind::Add, 3, 1}));
  CHECK(has(after_rev, {OpKind::Reverse, 2, 1}));
  CHECK(has(after_rev, {OpKind::Reverse, 1, 0}));
  CHECK_FALSE(has(after_rev, {OpKind::Add, 2, 3}));
  CHECK(std::is_sorted(after_rev.begin(), after_rev.end()));
}

TEST_CASE("acyclic status after an addition") {
  // add 0->1 on {1->2}: add 2->0 closes 0->1->2->0
  Dag g = make_dag(4, {{1, 2}});
  DeltaCache cache(4);
  cache.set_status(2, 0, AcyclicStatus::Acyclic);
  cache.set_status(2, 3, AcyclicStatus::Acyclic);
  const Operation op{OpKind::Add, 0, 1};
  const auto pre = PreOpReachability::capture(g, op);
  g.apply(op);
  cache.propagate_acyclic_status(g, op, pre);
  CHECK(cache.status(2, 0) == AcyclicStatus::Cyclic);
  CHECK(g.creates_cycle({OpKind::Add, 2, 0}));
  CHECK(cache.status(2, 3) == AcyclicStatus::Acyclic);
  CHECK(cache.last_op() == op);

  // on two nodes the back edge is no longer a legal addition at all
  support::Gen gen(3);
  const Dataset d = support::random_data(gen, 30, 2);
  Dag two = make_dag(2, {{0, 1}});
  HillClimber hc(d, SearchSettings{}, two);
  CHECK_FALSE(hc.eligible({OpKind::Add, 1, 0}));
}

TEST_CASE("acyclic status after a deletion needs a recheck") {
  Dag g = make_dag(3, {{0, 1}, {1, 2}});
  DeltaCache cache(3);
  cache.set_status(2, 0, AcyclicStatus::Cyclic);
  const Operation op{OpKind::Delete, 0, 1};
  const auto pre = PreOpReachability::capture(g, op);
  g.apply(op);
  cache.propagate_acyclic_status(g, op, pre);
  CHECK(cache.status(2, 0) == AcyclicStatus::Unknown);
  CHECK_FALSE(g.creates_cycle({OpKind::Add, 2, 0}));
}

TEST_CASE("acyclic status after a reversal uses the new reachability") {
  Dag g = make_dag(3, {{0, 1}, {1, 2}});
  DeltaCache cache(3);
  cache.set_status(2, 0, AcyclicStatus::Cyclic);
  const Operation op{OpKind::Reverse, 0, 1};
  const auto pre = PreOpReachability::capture(g, op);
  g.apply(op);
  cache.propagate_acyclic_status(g, op, pre);
  CHECK(cache.status(2, 0) != AcyclicStatus::Cyclic);
  CHECK_FALSE(g.creates_cycle({OpKind::Add, 2, 0}));


  // {0->1, 0->2}, reverse 0->1: the old an(1) reaches 0 only through the
  // reversed edge, so "reverse 0->2" must stay acyclic; "add 2->1" now closes
  // 1->0->2->1.
  Dag h = make_dag(3, {{0, 1}, {0, 2}});
  DeltaCache c2(3);
  c2.set_status(0, 2, AcyclicStatus::Acyclic);
  c2.set_status(2, 1, AcyclicStatus::Acyclic);
  c2.set_status(1, 2, AcyclicStatus::Acyclic);
  const Operation rev{OpKind::Reverse, 0, 1};
  const auto pre2 = PreOpReachability::capture(h, rev);
  h.apply(rev);
  c2.propagate_acyclic_status(h, rev, pre2);
  CHECK(c2.status(0, 2) == AcyclicStatus::Acyclic);
  CHECK(c2.status(2, 1) == AcyclicStatus::Cyclic);
  CHECK(c2.status(1, 2) == AcyclicStatus::Acyclic);
  CHECK(oracle_cyclic(h.adjacency(), 2, 1));
  CHECK_FALSE(oracle_cyclic(h.adjacency(), 0, 2));
  CHECK_FALSE(oracle_cyclic(h.adjacency(), 1, 2));
}

TEST_CASE("every step takes the best eligible move with exact deltas and statuses") {
  support::Gen gen(4);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t p = gen.between(2, 9);
    const std::size_t n = gen.between(p + 15, 80);
    const Dag truth = support::random_dag(gen, p, gen.uniform(0.1, 0.5));
    const Dataset d = support::random_data(gen, n, p, &truth);
    SearchSettings s;
    s.kind = rep % 3 == 0 ? ScoreKind::Aic : ScoreKind::Bic;
    if (rep % 4 == 1) s.constraints = random_constraints(gen, p);
    HillClimber hc(d, s);
    for (int guard = 0; guard < 200; ++guard) {
      const auto moves = oracle_moves(d, hc.graph().adjacency(), s.kind, s.constraints);
      double best = std::numeric_limits<double>::infinity();
      for (const Move& m : moves) best = std::min(best, m.delta);
      const AdjacencyMatrix a = hc.graph().adjacency();
      for (const Move& m : moves) {
        CHECK(std::abs(hc.cache().delta(m.op) - m.delta) < 1e-8 * n);
      }
      for (NodeId k = 0; k < p; ++k) {
        for (NodeId l = 0; l < p; ++l) {
          if (k == l || a(l, k)) continue;
          const AcyclicStatus st = hc.cache().status(k, l);
          if (st == AcyclicStatus::Unknown) continue;
          CHECK((st == AcyclicStatus::Cyclic) == oracle_cyclic(a, k, l));
        }
      }
      const std::size_t before = hc.trace().steps.size();
      if (!hc.step()) {
        CHECK((moves.empty() || best > -1e-6 - 1e-8));
        break;
      }
      const TraceStep& t = hc.trace().steps.at(before);
      const auto it = std::find_if(moves.begin(), moves.end(), [&](const Move& m) { return m.op == t.op; });
      REQUIRE(it != moves.end());
      CHECK(it->delta <= best + 1e-8 * n);
      CHECK(std::abs(it->delta - t.delta) < 1e-8 * n);
      for (const Edge& e : s.constraints.whitelist) CHECK(hc.graph().has_edge(e.source, e.target));
      for (const Edge& e : s.constraints.blacklist) CHECK_FALSE(hc.graph().has_edge(e.source, e.target));
    }
  }
}

TEST_CASE("incremental and fresh searches are identical") {
  support::Gen gen(5);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t p = gen.between(2, 20);
    const std::size_t n = gen.between(10, 100);
    const Dag truth = support::random_dag(gen, p, gen.uniform(0.05, 0.3));
    const Dataset d = support::random_data(gen, n, p, &truth);
    SearchSettings s;
    s.kind = rep % 2 ? ScoreKind::Bic : ScoreKind::LogLik;
    s.max_steps = 300;
    const SearchResult a = hill_climb(d, s);
    s.incremental = false;
    const SearchResult b = hill_climb(d, s);
    REQUIRE(a.trace.steps.size() == b.trace.steps.size());
    for (std::size_t k = 0; k < a.trace.steps.size(); ++k) {
      CHECK(a.trace.steps[k].op == b.trace.steps[k].op);
      CHECK(a.trace.steps[k].delta == b.trace.steps[k].delta);
    }
    CHECK(a.graph == b.graph);
    CHECK(a.trace.stop_reason == b.trace.stop_reason);
  }
}

TEST_CASE("search trace is monotone and replays to the result") {
  support::Gen gen(6);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t p = gen.between(3, 15);
    const Dag truth = support::random_dag(gen, p, 0.3);
    const Dataset d = support::random_data(gen, gen.between(p + 10, 100), p, &truth);
    SearchSettings s;
    s.eps = rep % 2 ? 1e-6 : 0.5;
    const SearchResult r = hill_climb(d, s, std::nullopt, &truth);
    double sum = r.initial_score;
    Dag replay = r.initial;
    std::size_t correct = 0;
    for (std::size_t k = 0; k < r.trace.steps.size(); ++k) {
      const TraceStep& t = r.trace.steps[k];
      CHECK(t.step == k);
      CHECK(t.delta < -s.eps);
      sum += t.delta;
      replay.apply(t.op);
      CHECK(t.total_edges == replay.edge_count());
      correct = 0;
      for (const Edge& e : replay.edges()) correct += truth.adjacent(e.source, e.target) ? 1 : 0;
      CHECK(t.correct_edges == correct);
    }
    CHECK(replay == r.graph);
    CHECK(r.final_score == doctest::Approx(sum).epsilon(1e-9));
    CHECK(std::abs(r.final_score - support::oracle_total(d, r.graph.adjacency(), s.kind)) < 1e-6);
    CHECK(r.trace.stop_reason != StopReason::MaxSteps);
  }
}

TEST_CASE("early stopping and step limits") {
  support::Gen gen(7);
  const Dag truth = support::random_dag(gen, 8, 0.5);
  const Dataset d = support::random_data(gen, 80, 8, &truth);
  SearchSettings s;
  s.max_steps = 3;
  const SearchResult capped = hill_climb(d, s);
  CHECK(capped.trace.steps.size() == 3);
  CHECK(capped.trace.stop_reason == StopReason::MaxSteps);

  s.max_steps = 2000;
  s.eps = 1e12;
  const SearchResult stopped = hill_climb(d, s);
  CHECK(stopped.trace.steps.empty());
  CHECK(stopped.trace.stop_reason == StopReason::EarlyStopped);
}

TEST_CASE("constraints are validated") {
  support::Gen gen(8);
  const Dataset d = support::random_data(gen, 30, 3);
  SearchSettings s;
  s.constraints.whitelist = {{0, 1}, {1, 2}, {2, 0}};
  CHECK_THROWS_AS(hill_climb(d, s), InfeasibleConstraints);
  s.constraints.whitelist = {{0, 1}};
  s.constraints.blacklist = {{0, 1}};
  CHECK_THROWS_AS(hill_climb(d, s), InfeasibleConstraints);
  s.constraints.whitelist = {{0, 5}};
  s.constraints.blacklist = {};
  CHECK_THROWS_AS(hill_climb(d, s), InfeasibleConstraints);
  s.constraints.whitelist = {};
  s.constraints.blacklist = {{1, 2}};
  CHECK_THROWS_AS(hill_climb(d, s, make_dag(3, {{1, 2}})), InfeasibleConstraints);
  // a start graph that makes the whitelist cyclic
  s.constraints.blacklist = {};
  s.constraints.whitelist = {{1, 0}};
  CHECK_THROWS_AS(hill_climb(d, s, make_dag(3, {{0, 2}, {2, 1}})), InfeasibleConstraints);
}

TEST_CASE("whitelisted edges stay and blacklisted edges never appear") {
  support::Gen gen(9);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t p = gen.between(3, 12);
    const Dag truth = support::random_dag(gen, p, 0.4);
    const Dataset d = support::random_data(gen, 60, p, &truth);
    SearchSettings s;
    s.constraints = random_constraints(gen, p);
    // forbid half the true edges too so the constraint actually binds
    for (const Edge& e : truth.edges()) {
      const bool white = std::find(s.constraints.whitelist.begin(), s.constraints.whitelist.end(), e) !=
                         s.constraints.whitelist.end();
      if (!white && gen.coin(0.5)) s.constraints.blacklist.push_back(e);
    }
    const SearchResult r = hill_climb(d, s);
    Dag g = r.initial;
    auto check = [&](const Dag& h) {
      for (const Edge& e : s.constraints.whitelist) CHECK(h.has_edge(e.source, e.target));
      for (const Edge& e : s.constraints.blacklist) CHECK_FALSE(h.has_edge(e.source, e.target));
    };
    check(g);
    for (const TraceStep& t : r.trace.steps) {
      g.apply(t.op);
      check(g);
    }
  }
}

TEST_CASE("searches are deterministic") {
  support::Gen gen(10);
  const Dag truth = support::random_dag(gen, 12, 0.3);
  const Dataset d = support::random_data(gen, 50, 12, &truth);
  SearchSettings s;
  s.restarts = 3;
  s.perturb = 4;
  const SearchResult a = learn(d, s, 99);
  const SearchResult b = learn(d, s, 99);
  REQUIRE(a.trace.steps.size() == b.trace.steps.size());
  for (std::size_t k = 0; k < a.trace.steps.size(); ++k) {
    CHECK(a.trace.steps[k].op == b.trace.steps[k].op);
    CHECK(a.trace.steps[k].delta == b.trace.steps[k].delta);
  }
  CHECK(a.graph == b.graph);
  CHECK(a.final_score == b.final_score);
}

TEST_CASE("random restarts never lose to the base") {
  support::Gen gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t p = gen.between(4, 12);
    const Dag truth = support::random_dag(gen, p, 0.4);
    const Dataset d = support::random_data(gen, 40, p, &truth);
    SearchSettings s;
    const SearchResult base = hill_climb(d, s);
    const SearchResult none = random_restart(d, s, base, 0, 3, 1);
    CHECK(none.graph == base.graph);
    CHECK(none.final_score == base.final_score);
    const SearchResult r = random_restart(d, s, base, 4, 3, static_cast<std::uint64_t>(rep));
    CHECK(r.final_score <= base.final_score);
    CHECK(support::dfs_acyclic(r.graph.adjacency()));
  }
  const Dataset flat = orthogonal_pair();
  const SearchResult empty = hill_climb(flat, SearchSettings{});
  const SearchResult again = random_restart(flat, SearchSettings{}, empty, 3, 5, 7);
  CHECK(again.graph == empty.graph);
  CHECK(again.final_score == empty.final_score);
}

TEST_CASE("duplicated columns do not break the search") {
  support::Gen gen(12);
  Eigen::MatrixXd x = support::random_raw(gen, 30, 4);
  x.col(3) = x.col(0);
  x.col(2) = x.col(0) - x.col(1);
  const Dataset d = Dataset::from_raw(x);
  const SearchResult r = hill_climb(d, SearchSettings{});
  CHECK(support::dfs_acyclic(r.graph.adjacency()));
  CHECK(std::isfinite(r.final_score));
  CHECK(r.graph.edge_count() >= 2);
}
