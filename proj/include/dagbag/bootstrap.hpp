#pragma once

#include "dagbag/dataset.hpp"
#include "dagbag/graph.hpp"
#include "dagbag/hill_climb.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dagbag {

inline constexpr std::size_t kMaxResampleAttempts = 100;

struct EnsembleProvenance {
  std::uint64_t seed = 0;
  std::size_t boot = 0;
  ScoreKind kind = ScoreKind::Bic;
  double eps = 1e-6;
  std::size_t max_steps = 0;
  std::size_t restarts = 0;
  std::size_t perturb = 0;
};

struct Ensemble {
  std::size_t p = 0;
  std::vector<Dag> graphs;
  EnsembleProvenance provenance;
};

// Row indices of one bootstrap draw from substream (seed, index, attempt).
std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed, std::uint64_t index,
                                        std::uint64_t attempt);

// Resample `index` of master `seed`: n rows with replacement, re-standardized.
// A draw with a constant column is retried on the next attempt substream.
// Throws DegenerateResample after kMaxResampleAttempts failures.
Dataset bootstrap_resample(const Dataset& data, std::uint64_t seed, std::uint64_t index = 0);

// Member b is learn(bootstrap_resample(data, seed, b), settings, substream
// seed of (seed, b)). `jobs` worker threads (0 = hardware concurrency); the
// result does not depend on it. Fit failures surface as FitError.
Ensemble learn_ensemble(const Dataset& data, std::size_t boot, const SearchSettings& settings,
                        std::uint64_t seed, std::size_t jobs = 0);

}  // namespace dagbag
