#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "specseg/segmentation.hpp"

namespace specseg {

/// x_t = sum_i ar[i] x_{t-1-i} + e_t + sum_j ma[j] e_{t-1-j}, e_t ~ N(0, sd^2).
struct ArmaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  double innovation_sd = 1.0;

  /// Throws InvalidArgument unless every root of 1 - ar_1 z - ... lies
  /// outside the unit circle (modulus > 1 + 1e-8) and the sd is nonnegative.
  void validate() const;
};

/// Latent coordinate k is weight * z_{stream, t + offset} plus optional
/// independent Gaussian noise with standard deviation noise_sd.
struct ComponentRecipe {
  std::size_t stream = 0;
  Eigen::Index offset = 0;
  double weight = 1.0;
  double noise_sd = 0.0;
};

/// X_t = A Y_t with Y partitioned into consecutive groups of the given sizes.
/// Components of different groups must draw on different streams, so the
/// groups are mutually incoherent by construction.
struct LatentModelSpec {
  Eigen::Index p = 0;
  std::vector<Eigen::Index> group_sizes;
  std::vector<ArmaSpec> streams;
  std::vector<ComponentRecipe> components;
  Eigen::MatrixXd mixing;
  std::uint64_t seed = 0;

  void validate() const;

  /// Consecutive index groups implied by group_sizes.
  std::vector<Group> groups() const;

  /// Columns of `mixing` belonging to group k.
  Eigen::MatrixXd block(std::size_t k) const;
};

}  // namespace specseg
