#pragma once

#include "dagbag/dataset.hpp"
#include "dagbag/graph.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dagbag {

// Uniform random topological order, then m distinct forward edges drawn
// uniformly among the p(p-1)/2 ordered pairs. Throws TooManyEdges.
Dag generate_random_dag(std::size_t p, std::size_t m, std::uint64_t seed);

enum class NoiseKind { Gaussian, StudentT, Gamma };

struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  double df = 3.0;     // StudentT, must exceed 2
  double shape = 1.0;  // Gamma
  double scale = 2.0;  // Gamma
};

// "gaussian", "t:DF", "gamma:SHAPE:SCALE"
NoiseModel parse_noise(const std::string& text);
std::string to_string(const NoiseModel& noise);

struct SimConfig {
  Dag graph;
  std::size_t n = 100;
  double coef_low = 0.3;
  double coef_high = 0.5;
  double snr_low = 0.5;
  double snr_high = 1.5;
  NoiseModel noise;
  std::uint64_t seed = 0;
};

struct NodeRecord {
  std::vector<NodeId> parents;
  std::vector<double> coefficients;  // aligned with parents
  double sigma = 1.0;                // noise standard deviation
  double target_snr = 0.0;           // 0 for root nodes
  double achieved_snr = 0.0;         // empirical sd(signal) / sigma, 0 for roots
};

struct Simulation {
  Dataset data;            // standardized
  Eigen::MatrixXd raw;     // before standardization
  Eigen::MatrixXd noise;   // realized residual columns
  std::vector<NodeRecord> nodes;
};

// Gaussian linear mechanism x_i = sum_j beta_ij x_j + eps_i in topological
// order. Coefficient magnitudes are uniform on [coef_low, coef_high] with a
// random sign; each non-root node draws its SNR uniformly on
// [snr_low, snr_high] and sets sigma_i = sd(signal) / SNR from the realized
// signal column (population sd). Roots have sigma 1. Non-Gaussian residuals
// are centered and scaled by their theoretical moments.
Simulation simulate(const SimConfig& config);

// Population (1/n) standard deviation.
double population_sd(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace dagbag
