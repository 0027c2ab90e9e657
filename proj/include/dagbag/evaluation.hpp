#pragma once

#include "dagbag/graph.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dagbag {

// Learned-graph counts of skeleton edges (e), v-structures (v) and moral
// edges (m), with how many of each also appear in the truth's object set.
struct EvalReport {
  std::size_t total_e = 0, correct_e = 0;
  std::size_t total_v = 0, correct_v = 0;
  std::size_t total_m = 0, correct_m = 0;
  std::size_t truth_e = 0, truth_v = 0, truth_m = 0;

  // 0/0 is reported as 0.
  static double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  }
  double precision_e() const { return ratio(correct_e, total_e); }
  double recall_e() const { return ratio(correct_e, truth_e); }
  double precision_v() const { return ratio(correct_v, total_v); }
  double recall_v() const { return ratio(correct_v, truth_v); }
  double precision_m() const { return ratio(correct_m, total_m); }
  double recall_m() const { return ratio(correct_m, truth_m); }
};

EvalReport evaluate(const Dag& learned, const Dag& truth);

struct CurveRow {
  std::size_t step = 0;
  std::size_t total_e = 0, correct_e = 0;
  std::size_t total_v = 0, correct_v = 0;
};

// Replays `ops` from `initial`, one row per operation on the graph it produces.
std::vector<CurveRow> learning_curve(const Dag& initial, std::span<const Operation> ops,
                                     const Dag& truth);

// Curve of an aggregation run: its additions replayed from the empty graph.
std::vector<CurveRow> learning_curve(std::span<const Edge> additions, const Dag& truth);

}  // namespace dagbag
