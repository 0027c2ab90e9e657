#include "dagbag/bootstrap.hpp"

#include "dagbag/error.hpp"
#include "dagbag/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace dagbag {

std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed, std::uint64_t index,
                                        std::uint64_t attempt) {
  auto engine = make_engine(seed, index, attempt);
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) r = static_cast<std::size_t>(uniform_index(engine, n));
  return rows;
}

Dataset bootstrap_resample(const Dataset& data, std::uint64_t seed, std::uint64_t index) {
  if (data.n() < 2) throw Error("bootstrap needs at least 2 samples");
  for (std::uint64_t attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    const auto rows = bootstrap_rows(data.n(), seed, index, attempt);
    try {
      return data.select_rows(rows);
    } catch (const ConstantColumn&) {
    }
  }
  throw DegenerateResample("resample " + std::to_string(index) + " has a constant column after " +
                           std::to_string(kMaxResampleAttempts) + " attempts");
}

Ensemble learn_ensemble(const Dataset& data, std::size_t boot, const SearchSettings& settings,
                        std::uint64_t seed, std::size_t jobs) {
  if (boot == 0) throw Error("ensemble size must be at least 1");
  Ensemble ens;
  ens.p = data.p();
  ens.graphs.resize(boot);
  ens.provenance = {seed,         boot, settings.kind, settings.eps, settings.max_steps,
                    settings.restarts, settings.perturb};

  std::vector<std::exception_ptr> failures(boot);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < boot; b = next++) {
      try {
        const Dataset resample = bootstrap_resample(data, seed, b);
        ens.graphs[b] = learn(resample, settings, substream_seed(seed, b, kMaxResampleAttempts)).graph;
      } catch (...) {
        failures[b] = std::current_exception();
      }
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, boot);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  for (std::size_t b = 0; b < boot; ++b) {
    if (!failures[b]) continue;
    try {
      std::rethrow_exception(failures[b]);
    } catch (const std::exception& err) {
      throw FitError(b, err.what());
    }
  }
  return ens;
}

}  // namespace dagbag
