#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "specseg/series.hpp"
#include "specseg/spectral.hpp"

namespace specseg {

/// A group of component indices (0-based), ascending.
using Group = std::vector<Eigen::Index>;

/// Eigendecomposition of the summed real spectral matrix S.
struct EigenSummary {
  Eigen::MatrixXd s_matrix;
  Eigen::VectorXd eigenvalues;   ///< descending
  Eigen::MatrixXd eigenvectors;  ///< orthonormal columns matching `eigenvalues`
};

/// Pairwise zero-coherence tests. Matrices are symmetric; the statistic
/// diagonal is 0 and the p-value diagonals are 1.
struct PairTestReport {
  Eigen::MatrixXd statistic;
  Eigen::MatrixXd pvalue_raw;
  Eigen::MatrixXd pvalue_adjusted;
  double alpha = 0.05;
};

enum class FdrMethod { BenjaminiHochberg, BenjaminiYekutieli };

std::string_view to_string(FdrMethod method);
FdrMethod parse_fdr_method(std::string_view name);

struct SegmentConfig {
  KernelSpec kernel{};
  double alpha = 0.05;
  FdrMethod fdr = FdrMethod::BenjaminiHochberg;
  std::optional<FrequencyBand> band;
  /// Warn when the smallest between-group eigenvalue gap, relative to the
  /// largest eigenvalue, falls below this value.
  double eigengap_warning = 1e-3;
  unsigned threads = 1;
};

struct SegmentationResult {
  EigenSummary eigen;
  PairTestReport report;
  Eigen::MatrixXi adjacency;
  std::vector<Group> groups;
  /// permutation[k] is the component of L'X placed at position k.
  std::vector<Eigen::Index> permutation;
  Eigen::MatrixXd demixing;  ///< P' L'
  Eigen::MatrixXd mixing;    ///< L P
  Eigen::Index m_hat = 0;
  std::vector<std::string> warnings;
};

/// Sum of Re f(omega_j) over grid frequencies inside `band` (all of them when
/// absent), symmetrized.
Eigen::MatrixXd accumulate_sx(const SpectralEstimate& estimate,
                              const std::optional<FrequencyBand>& band = std::nullopt);

/// Descending eigenvalues; each eigenvector's largest-magnitude entry is
/// positive (first such index on ties).
EigenSummary symmetric_eigen(const Eigen::MatrixXd& s);

/// Rows of the result are L' X_t.
MultivariateSeries transform(const MultivariateSeries& series, const Eigen::MatrixXd& basis);

/// Integrated squared coherence of components a and b,
///   D = int |f_ab|^2 / (f_aa f_bb) d omega over [-pi, pi] (or +/- band),
/// as a Riemann sum over the grid with cell 2pi/T, doubled for negative
/// frequencies. Diagonal spectra are floored at 1e-12 times their average
/// level; flooring on more than 10% of the grid points is a NumericalError.
double coherence_statistic(const SpectralEstimate& estimate, Eigen::Index a, Eigen::Index b,
                           const std::optional<FrequencyBand>& band = std::nullopt);

/// Fraction of Fourier grid points that fall inside the band (1 when absent).
double band_fraction(const SpectralEstimate& estimate, const std::optional<FrequencyBand>& band);

/// Null mean and standard deviation of T sqrt(h) D for a band covering
/// `fraction` of the grid: 4 pi^2 mu0 fraction / sqrt(h) and
/// 2 sqrt(2) pi sigma0 sqrt(fraction).
double null_center(Eigen::Index length, const KernelSpec& kernel, double fraction = 1.0);
double null_scale(const KernelSpec& kernel, double fraction = 1.0);

/// (T sqrt(h) D - null_center) / null_scale.
double standardized_statistic(double stat, Eigen::Index length, const KernelSpec& kernel,
                              double fraction = 1.0);

/// One-sided upper-tail normal p-value of the standardized statistic.
double coherence_pvalue(double stat, Eigen::Index length, const KernelSpec& kernel,
                        double fraction = 1.0);

/// Step-up adjusted p-values in input order, clipped to [0, 1].
std::vector<double> fdr_adjust(const std::vector<double>& pvalues, FdrMethod method);

/// e_ab = 1 iff the adjusted p-value is <= alpha (never when alpha <= 0).
Eigen::MatrixXi build_adjacency(const PairTestReport& report);

/// Connected components ordered by smallest member, members ascending.
std::vector<Group> connected_components(const Eigen::MatrixXi& adjacency);

/// Full segmentation pipeline. Requires T >= 2p and T >= 4.
SegmentationResult segment(const MultivariateSeries& series, const SegmentConfig& config);

/// Mixing and demixing matrices for a given basis and grouping; the
/// permutation concatenates the groups in order.
void apply_grouping(const Eigen::MatrixXd& basis, const std::vector<Group>& groups,
                    SegmentationResult& result);

}  // namespace specseg
