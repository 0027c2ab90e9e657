#include "dagbag/simulator.hpp"

#include "dagbag/error.hpp"
#include "dagbag/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace dagbag {

Dag generate_random_dag(std::size_t p, std::size_t m, std::uint64_t seed) {
  const std::size_t pairs = p < 2 ? 0 : p * (p - 1) / 2;
  if (m > pairs) {
    throw TooManyEdges(std::to_string(m) + " edges requested but " + std::to_string(p) +
                       " nodes allow at most " + std::to_string(pairs));
  }
  auto engine = make_engine(seed, 0);
  std::vector<NodeId> order(p);
  std::iota(order.begin(), order.end(), NodeId{0});
  for (std::size_t i = p; i > 1; --i) std::swap(order[i - 1], order[uniform_index(engine, i)]);

  // partial Fisher-Yates over pair indices (a, b), a < b positions in order
  std::vector<std::size_t> slots(pairs);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t pick = t + uniform_index(engine, pairs - t);
    std::swap(slots[t], slots[pick]);
    // decode slot -> (a, b) with 0 <= a < b < p
    std::size_t s = slots[t];
    std::size_t a = 0;
    while (s >= p - 1 - a) {
      s -= p - 1 - a;
      ++a;
    }
    const std::size_t b = a + 1 + s;
    edges.push_back({order[a], order[b]});
  }
  return Dag::from_edges(p, edges);
}

NoiseModel parse_noise(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw Error("bad number '" + s + "' in noise spec '" + text + "'");
    }
    return v;
  };
  NoiseModel noise;
  if (parts.size() == 1 && parts[0] == "gaussian") return noise;
  if (parts.size() == 2 && parts[0] == "t") {
    noise.kind = NoiseKind::StudentT;
    noise.df = number(parts[1]);
    if (!(noise.df > 2.0)) throw Error("student t noise needs df > 2 for a finite variance");
    return noise;
  }
  if (parts.size() == 3 && parts[0] == "gamma") {
    noise.kind = NoiseKind::Gamma;
    noise.shape = number(parts[1]);
    noise.scale = number(parts[2]);
    if (!(noise.shape > 0.0) || !(noise.scale > 0.0)) throw Error("gamma noise needs positive parameters");
    return noise;
  }
  throw Error("unknown noise spec '" + text + "' (expected gaussian, t:DF or gamma:SHAPE:SCALE)");
}

std::string to_string(const NoiseModel& noise) {
  std::ostringstream out;
  switch (noise.kind) {
    case NoiseKind::Gaussian:
      out << "gaussian";
      break;
    case NoiseKind::StudentT:
      out << "t:" << noise.df;
      break;
    case NoiseKind::Gamma:
      out << "gamma:" << noise.shape << ":" << noise.scale;
      break;
  }
  return out.str();
}

double population_sd(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().mean());
}

namespace {

void validate(const SimConfig& c) {
  if (c.n < 2) throw Error("simulation needs n >= 2");
  if (!(c.coef_low > 0.0) || !(c.coef_low <= c.coef_high)) {
    throw Error("coefficient range must satisfy 0 < low <= high");
  }
  if (!(c.snr_low > 0.0) || !(c.snr_low <= c.snr_high)) {
    throw Error("snr range must satisfy 0 < low <= high");
  }
}

// Unit-variance, mean-zero residual draw.
struct NoiseSampler {
  explicit NoiseSampler(const NoiseModel& m)
      : model(m), t(m.kind == NoiseKind::StudentT ? m.df : 3.0), gamma(m.shape, m.scale) {}

  double operator()(std::mt19937_64& engine) {
    switch (model.kind) {
      case NoiseKind::Gaussian:
        return normal(engine);
      case NoiseKind::StudentT:
        return t(engine) / std::sqrt(model.df / (model.df - 2.0));
      case NoiseKind::Gamma:
        return (gamma(engine) - model.shape * model.scale) / (std::sqrt(model.shape) * model.scale);
    }
    return 0.0;
  }

  NoiseModel model;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::student_t_distribution<double> t;
  std::gamma_distribution<double> gamma;
};

}  // namespace

Simulation simulate(const SimConfig& config) {
  validate(config);
  const Dag& g = config.graph;
  const std::size_t p = g.size();
  const auto n = static_cast<Eigen::Index>(config.n);

  auto params = make_engine(config.seed, 0);
  auto draws = make_engine(config.seed, 1);
  std::uniform_real_distribution<double> magnitude(config.coef_low, config.coef_high);
  std::uniform_real_distribution<double> snr(config.snr_low, config.snr_high);
  NoiseSampler sampler(config.noise);

  Simulation sim;
  sim.raw = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(p));
  sim.noise = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(p));
  sim.nodes.resize(p);

  for (NodeId v : g.topological_order()) {
    NodeRecord& rec = sim.nodes[v];
    rec.parents = g.parents(v);
    Eigen::VectorXd signal = Eigen::VectorXd::Zero(n);
    for (NodeId pa : rec.parents) {
      const double sign = (params() >> 63) != 0 ? -1.0 : 1.0;
      const double beta = sign * magnitude(params);
      rec.coefficients.push_back(beta);
      signal += beta * sim.raw.col(static_cast<Eigen::Index>(pa));
    }
    if (!rec.parents.empty()) {
      rec.target_snr = snr(params);
      const double sd = population_sd(signal);
      rec.sigma = sd > 0.0 ? sd / rec.target_snr : 1.0;
      rec.achieved_snr = sd / rec.sigma;
    }
    auto eps = sim.noise.col(static_cast<Eigen::Index>(v));
    for (Eigen::Index r = 0; r < n; ++r) eps(r) = rec.sigma * sampler(draws);
    sim.raw.col(static_cast<Eigen::Index>(v)) = signal + eps;
  }
  sim.data = Dataset::from_raw(sim.raw);
  return sim;
}

}  // namespace dagbag
