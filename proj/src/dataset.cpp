#include "hdlda/dataset.hpp"

#include <cmath>
#include <string>

#include "hdlda/errors.hpp"

namespace hdlda {

std::size_t Dataset::count(int label) const {
  std::size_t c = 0;
  for (int y : labels) c += (y == label);
  return c;
}

std::vector<std::size_t> Dataset::indices_of(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& row_indices) const {
  Dataset out;
  out.rows.resize(static_cast<Eigen::Index>(row_indices.size()), rows.cols());
  out.labels.reserve(row_indices.size());
  for (std::size_t k = 0; k < row_indices.size(); ++k) {
    out.rows.row(static_cast<Eigen::Index>(k)) = rows.row(static_cast<Eigen::Index>(row_indices[k]));
    out.labels.push_back(labels[row_indices[k]]);
  }
  return out;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(rows.rows()) != labels.size()) {
    throw ContractViolation("Dataset: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(rows.rows()) + " rows");
  }
  if (rows.cols() < 1) throw ContractViolation("Dataset: need at least one feature");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw ContractViolation("Dataset: label of row " + std::to_string(i) + " is not 0/1");
    }
  }
  if (!rows.allFinite()) throw ContractViolation("Dataset: non-finite entry");
}

}  // namespace hdlda
