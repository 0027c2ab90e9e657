#include "dagbag/evaluation.hpp"

#include "dagbag/error.hpp"

#include <algorithm>
#include <iterator>
#include <string>

namespace dagbag {

namespace {

template <class Set>
std::size_t overlap(const Set& a, const Set& b) {
  std::size_t count = 0;
  for (const auto& x : a) count += b.count(x);
  return count;
}

}  // namespace

EvalReport evaluate(const Dag& learned, const Dag& truth) {
  if (learned.size() != truth.size()) {
    throw DimensionMismatch("learned graph has " + std::to_string(learned.size()) +
                            " nodes, truth has " + std::to_string(truth.size()));
  }
  const auto skel_l = skeleton(learned).edges;
  const auto skel_t = skeleton(truth).edges;
  const auto vs_l = v_structures(learned);
  const auto vs_t = v_structures(truth);
  const auto moral_l = moral_graph(learned).edges;
  const auto moral_t = moral_graph(truth).edges;

  EvalReport r;
  r.total_e = skel_l.size();
  r.correct_e = overlap(skel_l, skel_t);
  r.total_v = vs_l.size();
  r.correct_v = overlap(vs_l, vs_t);
  r.total_m = moral_l.size();
  r.correct_m = overlap(moral_l, moral_t);
  r.truth_e = skel_t.size();
  r.truth_v = vs_t.size();
  r.truth_m = moral_t.size();
  return r;
}

std::vector<CurveRow> learning_curve(const Dag& initial, std::span<const Operation> ops,
                                     const Dag& truth) {
  if (initial.size() != truth.size()) throw DimensionMismatch("curve graphs differ in size");
  const auto vs_t = v_structures(truth);
  Dag g = initial;
  std::vector<CurveRow> rows;
  rows.reserve(ops.size());
  std::size_t correct_e = 0;
  for (const Edge& e : g.edges()) correct_e += truth.adjacent(e.source, e.target) ? 1 : 0;

  for (std::size_t s = 0; s < ops.size(); ++s) {
    const Operation& op = ops[s];
    g.apply(op, false);
    const bool hit = truth.adjacent(op.source, op.target);
    if (op.kind == OpKind::Add && hit) ++correct_e;
    if (op.kind == OpKind::Delete && hit) --correct_e;
    const auto vs = v_structures(g);
    rows.push_back({s, g.edge_count(), correct_e, vs.size(), overlap(vs, vs_t)});
  }
  return rows;
}

std::vector<CurveRow> learning_curve(std::span<const Edge> additions, const Dag& truth) {
  std::vector<Operation> ops;
  ops.reserve(additions.size());
  for (const Edge& e : additions) ops.push_back({OpKind::Add, e.source, e.target});
  return learning_curve(Dag(truth.size()), ops, truth);
}

}  // namespace dagbag
