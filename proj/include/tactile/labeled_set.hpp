#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace tactile {

/// Observations with class labels; one row per observation.
struct LabeledSet {
  Eigen::MatrixXd x;        // N x d
  std::vector<int> labels;  // length N

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }

  /// Sorted distinct class ids.
  std::vector<int> class_ids() const;

  LabeledSet subset(const std::vector<std::size_t>& indices) const;
};

}  // namespace tactile
