#pragma once

#include <vector>

#include <Eigen/Core>

#include "specseg/model.hpp"
#include "specseg/segmentation.hpp"

namespace specseg {

struct SubspaceReport {
  /// M^2 of each estimated group against its matched true group, in the order
  /// of the estimated groups. When the group counts differ each estimated
  /// group is scored against its nearest true group.
  std::vector<double> per_group_m2;
  /// matching[i] is the true group paired with estimated group i.
  std::vector<std::size_t> matching;
  double max_m2 = 0.0;
  double avg_m2 = 0.0;
  bool correct = false;
  Eigen::Index m_hat = 0;
  Eigen::Index m_true = 0;
};

/// M = sqrt(1 - tr(B1 B1' B2 B2') / r) for p x r matrices with orthonormal
/// columns (checked to 1e-8). Clipped to [0, 1].
double subspace_distance(const Eigen::MatrixXd& b1, const Eigen::MatrixXd& b2);

/// M^2 between column spaces of possibly different ranks r1, r2, normalized
/// by max(r1, r2). Coincides with subspace_distance^2 when r1 == r2.
double subspace_distance_sq(const Eigen::MatrixXd& b1, const Eigen::MatrixXd& b2);

/// Minimum-cost assignment on a square cost matrix; result[i] is the column
/// assigned to row i. Exhaustive for n <= 8, Hungarian algorithm otherwise.
std::vector<std::size_t> min_cost_matching(const Eigen::MatrixXd& cost);

/// Correct-segmentation classification and M^2 summaries.
SubspaceReport evaluate_segmentation(const SegmentationResult& result,
                                     const LatentModelSpec& truth);

/// Blocks of the estimated mixing matrix, one per estimated group.
std::vector<Eigen::MatrixXd> estimated_blocks(const SegmentationResult& result);

/// Smallest absolute difference between eigenvalues of distinct diagonal
/// blocks of S (consecutive blocks of the given sizes). Infinity for a single
/// block.
double eigengap(const Eigen::MatrixXd& s, const std::vector<Eigen::Index>& group_sizes);

}  // namespace specseg
