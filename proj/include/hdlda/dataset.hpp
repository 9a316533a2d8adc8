#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hdlda {

/// Labelled training or test sample: one row per observation, labels in {0,1}.
struct Dataset {
  Eigen::MatrixXd rows;     // n x p
  std::vector<int> labels;  // length n

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
  std::size_t count(int label) const;

  /// Row indices carrying the given label, in row order.
  std::vector<std::size_t> indices_of(int label) const;

  /// Sub-sample made of the listed rows, in the listed order.
  Dataset subset(const std::vector<std::size_t>& row_indices) const;

  /// Throws ContractViolation unless labels match rows, labels are binary,
  /// p >= 1 and every entry is finite.
  void validate() const;
};

}  // namespace hdlda
