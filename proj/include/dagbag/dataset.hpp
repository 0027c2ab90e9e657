#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dagbag {

// n x p sample matrix, always stored standardized: every column has mean 0
// and biased (1/n) variance 1, so the empty-parent RSS of any node is n.
class Dataset {
 public:
  Dataset() = default;

  // Standardizes `raw`. Throws Error when n < 2 and ConstantColumn for a
  // column whose values are all identical. Missing names become x1..xp.
  static Dataset from_raw(Eigen::MatrixXd raw, std::vector<std::string> names = {});

  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  // Rows `rows` of this dataset, re-standardized.
  Dataset select_rows(std::span<const std::size_t> rows) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
};

std::vector<std::string> default_names(std::size_t p);

// Standardizes columns in place; returns the index of the first constant
// column or -1.
long standardize_columns(Eigen::MatrixXd& values);

}  // namespace dagbag
