#include "specseg/model.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "specseg/error.hpp"

namespace specseg {

void ArmaSpec::validate() const {
  if (!(innovation_sd >= 0.0) || !std::isfinite(innovation_sd)) {
    throw InvalidArgument("innovation sd must be finite and nonnegative");
  }
  for (double c : ar) {
    if (!std::isfinite(c)) throw InvalidArgument("AR coefficients must be finite");
  }
  for (double c : ma) {
    if (!std::isfinite(c)) throw InvalidArgument("MA coefficients must be finite");
  }
  const auto q = static_cast<Eigen::Index>(ar.size());
  if (q == 0) return;
  // Roots of 1 - ar_1 z - ... - ar_q z^q are the reciprocals of the companion
  // matrix eigenvalues.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index i = 0; i < q; ++i) companion(0, i) = ar[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < q; ++i) companion(i, i - 1) = 1.0;
  const double radius = companion.eigenvalues().cwiseAbs().maxCoeff();
  if (radius * (1.0 + 1e-8) >= 1.0) {
    throw InvalidArgument("AR polynomial is not stationary (largest inverse root modulus " +
                          std::to_string(radius) + ")");
  }
}

void LatentModelSpec::validate() const {
  if (p <= 0) throw InvalidArgument("model dimension must be positive");
  if (group_sizes.empty()) throw InvalidArgument("model needs at least one group");
  Eigen::Index total = 0;
  for (Eigen::Index d : group_sizes) {
    if (d <= 0) throw InvalidArgument("group sizes must be positive");
    total += d;
  }
  if (total != p) throw InvalidArgument("group sizes do not sum to p");
  if (static_cast<Eigen::Index>(components.size()) != p) {
    throw InvalidArgument("need one component recipe per coordinate");
  }
  for (const auto& s : streams) s.validate();

  std::vector<Eigen::Index> stream_group(streams.size(), -1);
  Eigen::Index k = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    for (Eigen::Index i = 0; i < group_sizes[g]; ++i, ++k) {
      const auto& c = components[static_cast<std::size_t>(k)];
      if (c.stream >= streams.size()) throw InvalidArgument("component refers to unknown stream");
      if (c.offset < 0) throw InvalidArgument("component offsets must be nonnegative");
      if (!(c.noise_sd >= 0.0)) throw InvalidArgument("component noise sd must be nonnegative");
      auto& owner = stream_group[c.stream];
      if (owner >= 0 && owner != static_cast<Eigen::Index>(g)) {
        throw InvalidArgument("a stream is shared across groups");
      }
      owner = static_cast<Eigen::Index>(g);
    }
  }

  if (mixing.size() != 0) {
    if (mixing.rows() != p || mixing.cols() != p) throw InvalidArgument("mixing must be p x p");
    const double dev =
        (mixing.transpose() * mixing - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
    if (dev > 1e-10) throw InvalidArgument("mixing matrix is not orthogonal");
  }
}

std::vector<Group> LatentModelSpec::groups() const {
  std::vector<Group> out;
  Eigen::Index start = 0;
  for (Eigen::Index d : group_sizes) {
    Group g(static_cast<std::size_t>(d));
    std::iota(g.begin(), g.end(), start);
    out.push_back(std::move(g));
    start += d;
  }
  return out;
}

Eigen::MatrixXd LatentModelSpec::block(std::size_t k) const {
  const Eigen::Index start = std::accumulate(group_sizes.begin(),
                                             group_sizes.begin() + static_cast<std::ptrdiff_t>(k),
                                             Eigen::Index{0});
  return mixing.middleCols(start, group_sizes.at(k));
}

}  // namespace specseg
