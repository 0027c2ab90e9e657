#include "dagbag/dataset.hpp"

#include "dagbag/error.hpp"

#include <cmath>

namespace dagbag {

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

long standardize_columns(Eigen::MatrixXd& values) {
  const double n = static_cast<double>(values.rows());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    auto col = values.col(j);
    if (col.maxCoeff() == col.minCoeff()) return static_cast<long>(j);
    col.array() -= col.sum() / n;
    // second pass removes the residual rounding left in the first mean
    col.array() -= col.sum() / n;
    const double sd = std::sqrt(col.squaredNorm() / n);
    col /= sd;
  }
  return -1;
}

Dataset Dataset::from_raw(Eigen::MatrixXd raw, std::vector<std::string> names) {
  if (raw.rows() < 2) throw Error("dataset needs at least 2 samples, got " + std::to_string(raw.rows()));
  if (names.empty()) names = default_names(static_cast<std::size_t>(raw.cols()));
  if (names.size() != static_cast<std::size_t>(raw.cols())) {
    throw DimensionMismatch(std::to_string(names.size()) + " names for " +
                            std::to_string(raw.cols()) + " columns");
  }
  const long constant = standardize_columns(raw);
  if (constant >= 0) throw ConstantColumn("column '" + names[constant] + "' is constant");
  Dataset d;
  d.values_ = std::move(raw);
  d.names_ = std::move(names);
  return d;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd picked(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) picked.row(r) = values_.row(rows[r]);
  return from_raw(std::move(picked), names_);
}

}  // namespace dagbag
