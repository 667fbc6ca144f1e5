#include "specseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "specseg/error.hpp"

namespace specseg {

namespace {

void require_orthonormal_columns(const Eigen::MatrixXd& b, const char* name) {
  if (b.cols() == 0 || b.cols() > b.rows()) {
    throw InvalidArgument(std::string(name) + " must have between 1 and p columns");
  }
  const Eigen::MatrixXd gram = b.transpose() * b;
  const double dev =
      (gram - Eigen::MatrixXd::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw InvalidArgument(std::string(name) + " does not have orthonormal columns (deviation " +
                          std::to_string(dev) + ")");
  }
}

// ||B1 B1' - B2 B2'||_F^2 = r1 + r2 - 2 tr(B1 B1' B2 B2'). Working with the
// projector difference keeps identical subspaces at exactly zero.
double projector_gap(const Eigen::MatrixXd& b1, const Eigen::MatrixXd& b2) {
  return (b1 * b1.transpose() - b2 * b2.transpose()).squaredNorm();
}

std::vector<std::size_t> exhaustive_matching(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
    }
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Shortest augmenting path formulation with row/column potentials.
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    owner[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = owner[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur =
            cost(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[owner[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t c = 1; c <= n; ++c) assignment[owner[c] - 1] = c - 1;
  return assignment;
}

}  // namespace

double subspace_distance(const Eigen::MatrixXd& b1, const Eigen::MatrixXd& b2) {
  if (b1.rows() != b2.rows() || b1.cols() != b2.cols()) {
    throw InvalidArgument("subspace_distance needs matrices of equal shape");
  }
  return std::sqrt(subspace_distance_sq(b1, b2));
}

double subspace_distance_sq(const Eigen::MatrixXd& b1, const Eigen::MatrixXd& b2) {
  if (b1.rows() != b2.rows()) throw InvalidArgument("subspace bases live in different dimensions");
  require_orthonormal_columns(b1, "B1");
  require_orthonormal_columns(b2, "B2");
  const auto r1 = static_cast<double>(b1.cols());
  const auto r2 = static_cast<double>(b2.cols());
  const double r = std::max(r1, r2);
  return std::clamp((2.0 * r - r1 - r2 + projector_gap(b1, b2)) / (2.0 * r), 0.0, 1.0);
}

std::vector<std::size_t> min_cost_matching(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw InvalidArgument("cost matrix must be square");
  if (cost.rows() == 0) return {};
  return cost.rows() <= 8 ? exhaustive_matching(cost) : hungarian(cost);
}

std::vector<Eigen::MatrixXd> estimated_blocks(const SegmentationResult& result) {
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index start = 0;
  for (const auto& g : result.groups) {
    const auto d = static_cast<Eigen::Index>(g.size());
    blocks.emplace_back(result.mixing.middleCols(start, d));
    start += d;
  }
  return blocks;
}

SubspaceReport evaluate_segmentation(const SegmentationResult& result,
                                     const LatentModelSpec& truth) {
  if (result.mixing.rows() != truth.p || truth.mixing.rows() != truth.p) {
    throw InvalidArgument("estimated and true mixing matrices have different dimensions");
  }
  const auto est = estimated_blocks(result);
  std::vector<Eigen::MatrixXd> tru;
  for (std::size_t k = 0; k < truth.group_sizes.size(); ++k) tru.push_back(truth.block(k));

  SubspaceReport report;
  report.m_hat = static_cast<Eigen::Index>(est.size());
  report.m_true = static_cast<Eigen::Index>(tru.size());

  Eigen::MatrixXd cost(report.m_hat, report.m_true);
  for (Eigen::Index i = 0; i < report.m_hat; ++i) {
    for (Eigen::Index j = 0; j < report.m_true; ++j) {
      cost(i, j) = subspace_distance_sq(est[static_cast<std::size_t>(i)],
                                        tru[static_cast<std::size_t>(j)]);
    }
  }

  bool correct = report.m_hat == report.m_true;
  if (correct) {
    report.matching = min_cost_matching(cost);
  } else {
    for (Eigen::Index i = 0; i < report.m_hat; ++i) {
      Eigen::Index j = 0;
      cost.row(i).minCoeff(&j);
      report.matching.push_back(static_cast<std::size_t>(j));
    }
  }

  for (Eigen::Index i = 0; i < report.m_hat; ++i) {
    const std::size_t j = report.matching[static_cast<std::size_t>(i)];
    const double m2 = cost(i, static_cast<Eigen::Index>(j));
    report.per_group_m2.push_back(m2);
    if (correct) {
      correct = est[static_cast<std::size_t>(i)].cols() == tru[j].cols() &&
                m2 <= cost.row(i).minCoeff();
    }
  }
  report.correct = correct;
  if (!report.per_group_m2.empty()) {
    report.max_m2 = *std::max_element(report.per_group_m2.begin(), report.per_group_m2.end());
    report.avg_m2 = std::accumulate(report.per_group_m2.begin(), report.per_group_m2.end(), 0.0) /
                    static_cast<double>(report.per_group_m2.size());
  }
  return report;
}

double eigengap(const Eigen::MatrixXd& s, const std::vector<Eigen::Index>& group_sizes) {
  const Eigen::Index total =
      std::accumulate(group_sizes.begin(), group_sizes.end(), Eigen::Index{0});
  if (s.rows() != s.cols() || total != s.rows()) {
    throw InvalidArgument("group sizes must sum to the matrix dimension");
  }
  std::vector<Eigen::VectorXd> spectra;
  Eigen::Index start = 0;
  for (Eigen::Index d : group_sizes) {
    if (d <= 0) throw InvalidArgument("group sizes must be positive");
    const Eigen::MatrixXd blk = s.block(start, start, d, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (blk + blk.transpose()),
                                                          Eigen::EigenvaluesOnly);
    spectra.push_back(solver.eigenvalues());
    start += d;
  }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < spectra.size(); ++a) {
    for (std::size_t b = a + 1; b < spectra.size(); ++b) {
      for (double mu : spectra[a]) {
        for (double nu : spectra[b]) gap = std::min(gap, std::abs(mu - nu));
      }
    }
  }
  return gap;
}

}  // namespace specseg
