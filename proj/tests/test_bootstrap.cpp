#include "support.hpp"

#include "dagbag/bootstrap.hpp"
#include "dagbag/error.hpp"
#include "dagbag/rng.hpp"

#include <doctest.h>

#include <random>

using namespace dagbag;

namespace {

// Second implementation of the generator contract, written from its
// description rather than from rng.hpp.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<std::size_t> reference_rows(std::size_t n, std::uint64_t master, std::uint64_t stream,
                                        std::uint64_t attempt) {
  const std::uint64_t key = stream * 4294967296ull + attempt + 1;
  std::mt19937_64 eng(mix(mix(master) ^ mix(key)));
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(eng()) * n;
    rows.push_back(static_cast<std::size_t>(wide >> 64));
  }
  return rows;
}

Eigen::MatrixXd restandardize(const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out = rows;
  const double n = static_cast<double>(rows.rows());
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double mean = out.col(j).sum() / n;
    out.col(j).array() -= mean;
    const double sd = std::sqrt(out.col(j).squaredNorm() / n);
    out.col(j) /= sd;
  }
  return out;
}

}  // namespace

TEST_CASE("the engine is the standard 64-bit Mersenne twister") {
  std::mt19937_64 eng;
  eng.discard(9999);
  CHECK(eng() == 9981545732273789042ull);
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
}

TEST_CASE("bootstrap rows follow the generator contract") {
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xdeadbeefull}) {
    for (std::uint64_t b = 0; b < 5; ++b) {
      CHECK(bootstrap_rows(5, seed, b, 0) == reference_rows(5, seed, b, 0));
      CHECK(bootstrap_rows(37, seed, b, 3) == reference_rows(37, seed, b, 3));
    }
  }
}

TEST_CASE("a resample is the drawn rows re-standardized") {
  support::Gen gen(1);
  const Dataset d = support::random_data(gen, 5, 3);
  const Dataset r = bootstrap_resample(d, 17, 2);
  const Dataset again = bootstrap_resample(d, 17, 2);
  CHECK(r.values() == again.values());

  // the first attempt whose draw has no constant column is the one used
  std::uint64_t attempt = 0;
  Eigen::MatrixXd picked;
  for (;; ++attempt) {
    const auto rows = reference_rows(5, 17, 2, attempt);
    picked.resize(5, 3);
    for (int i = 0; i < 5; ++i) picked.row(i) = d.values().row(static_cast<Eigen::Index>(rows[i]));
    bool constant = false;
    for (int j = 0; j < 3; ++j) constant = constant || picked.col(j).maxCoeff() == picked.col(j).minCoeff();
    if (!constant) break;
  }
  CHECK((restandardize(picked) - r.values()).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(std::abs(r.values().col(j).mean()) < 1e-9);
    CHECK(std::abs(r.values().col(j).squaredNorm() / 5.0 - 1.0) < 1e-9);
  }
}

TEST_CASE("constant draws are retried on the next attempt") {
  Eigen::MatrixXd x(2, 1);
  x << 1.0, 2.0;
  const Dataset d = Dataset::from_raw(x);
  int retried = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto first = bootstrap_rows(2, seed, 0, 0);
    const Dataset r = bootstrap_resample(d, seed, 0);
    CHECK(r.values().col(0).maxCoeff() > r.values().col(0).minCoeff());
    if (first[0] == first[1]) ++retried;
  }
  CHECK(retried > 0);
}

TEST_CASE("an exact linear relation survives every resample") {
  support::Gen gen(2);
  Eigen::MatrixXd x(40, 2);
  for (int i = 0; i < 40; ++i) x(i, 0) = gen.normal();
  x.col(1) = x.col(0);
  const Dataset d = Dataset::from_raw(x);
  const Ensemble e = learn_ensemble(d, 10, SearchSettings{}, 5, 1);
  REQUIRE(e.graphs.size() == 10);
  for (const Dag& g : e.graphs) CHECK(skeleton(g).edges == std::set<std::pair<NodeId, NodeId>>{{0, 1}});
}

TEST_CASE("a one-member ensemble is one search on one resample") {
  support::Gen gen(3);
  const Dag truth = support::random_dag(gen, 6, 0.4);
  const Dataset d = support::random_data(gen, 50, 6, &truth);
  SearchSettings s;
  s.restarts = 2;
  s.perturb = 2;
  const Ensemble e = learn_ensemble(d, 1, s, 77);
  REQUIRE(e.graphs.size() == 1);
  const Dag direct = learn(bootstrap_resample(d, 77, 0), s, substream_seed(77, 0, kMaxResampleAttempts)).graph;
  CHECK(e.graphs[0] == direct);
  CHECK(e.provenance.seed == 77);
  CHECK(e.provenance.boot == 1);
  CHECK(e.provenance.restarts == 2);
}

TEST_CASE("the ensemble does not depend on the number of workers") {
  support::Gen gen(4);
  const Dag truth = support::random_dag(gen, 10, 0.3);
  const Dataset d = support::random_data(gen, 60, 10, &truth);
  SearchSettings s;
  const Ensemble one = learn_ensemble(d, 12, s, 9, 1);
  const Ensemble three = learn_ensemble(d, 12, s, 9, 3);
  const Ensemble all = learn_ensemble(d, 12, s, 9, 0);
  for (std::size_t b = 0; b < 12; ++b) {
    CHECK(one.graphs[b] == three.graphs[b]);
    CHECK(one.graphs[b] == all.graphs[b]);
    CHECK(support::dfs_acyclic(one.graphs[b].adjacency()));
  }
  const Ensemble other = learn_ensemble(d, 12, s, 10, 1);
  bool differs = false;
  for (std::size_t b = 0; b < 12; ++b) differs = differs || !(other.graphs[b] == one.graphs[b]);
  CHECK(differs);
}

TEST_CASE("members respect the search constraints") {
  support::Gen gen(5);
  const Dag truth = support::random_dag(gen, 6, 0.5);
  const Dataset d = support::random_data(gen, 40, 6, &truth);
  SearchSettings s;
  s.constraints.whitelist = {{5, 0}};
  s.constraints.blacklist = truth.edges();
  s.constraints.blacklist.erase(
      std::remove(s.constraints.blacklist.begin(), s.constraints.blacklist.end(), Edge{5, 0}),
      s.constraints.blacklist.end());
  const Ensemble e = learn_ensemble(d, 8, s, 3, 2);
  for (const Dag& g : e.graphs) {
    CHECK(g.has_edge(5, 0));
    for (const Edge& b : s.constraints.blacklist) CHECK_FALSE(g.has_edge(b.source, b.target));
  }
}

TEST_CASE("fit failures name the resample") {
  support::Gen gen(6);
  const Dataset d = support::random_data(gen, 20, 3);
  SearchSettings s;
  s.constraints.whitelist = {{0, 1}, {1, 0}};
  try {
    learn_ensemble(d, 4, s, 1, 2);
    FAIL("expected a fit error");
  } catch (const FitError& err) {
    CHECK(err.index() == 0);
  }
  CHECK_THROWS_AS(learn_ensemble(d, 0, s, 1), Error);
}
