#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "specseg/series.hpp"

namespace specseg {

enum class KernelFamily { BartlettPriestley, Parzen };

std::string_view to_string(KernelFamily family);

/// Accepts "bp", "bartlett-priestley", "parzen" (case-sensitive).
KernelFamily parse_kernel_family(std::string_view name);

/// Smoothing kernel K on [-pi, pi], nonnegative, symmetric, integrating to 1.
/// Bartlett-Priestley: (3 / 4pi)(1 - theta^2 / pi^2). Parzen: the Parzen lag
/// window stretched to [-pi, pi] and renormalized.
double kernel_value(KernelFamily family, double theta);

/// Constants of the null limit of the coherence statistic:
///   mu0       = int K(u)^2 du over [-pi, pi]
///   sigma0_sq = 2pi int_{-2pi}^{2pi} ( int K(u) K(u + v) du )^2 dv
/// Evaluated once per family by adaptive Simpson quadrature and cached.
struct KernelConstants {
  double mu0;
  double sigma0_sq;
};

KernelConstants kernel_constants(KernelFamily family);

/// Kernel family plus the bandwidth exponent q; the bandwidth for a series of
/// length T is h = T^(-q).
class KernelSpec {
 public:
  static constexpr double kDefaultExponent = 0.15;

  explicit KernelSpec(KernelFamily family = KernelFamily::BartlettPriestley,
                      double exponent = kDefaultExponent);

  KernelFamily family() const noexcept { return family_; }
  double exponent() const noexcept { return exponent_; }
  double bandwidth(Eigen::Index length) const;
  double mu0() const noexcept { return constants_.mu0; }
  double sigma0_sq() const noexcept { return constants_.sigma0_sq; }

  double operator()(double theta) const { return kernel_value(family_, theta); }

  /// K_h(theta) = K(theta / h) / h.
  double scaled(double theta, double bandwidth) const {
    return kernel_value(family_, theta / bandwidth) / bandwidth;
  }

 private:
  KernelFamily family_;
  double exponent_;
  KernelConstants constants_;
};

/// Smoothed spectral matrices on a frequency grid. Every matrix is Hermitian.
struct SpectralEstimate {
  FrequencyGrid grid;
  std::vector<Eigen::MatrixXcd> matrices;
  double bandwidth_used = 0.0;
  Eigen::Index series_length = 0;

  Eigen::Index dimension() const { return matrices.empty() ? 0 : matrices.front().rows(); }
};

/// J(omega_j) = (2 pi T)^(-1/2) sum_t X_t exp(-i t omega_j) for every Fourier
/// frequency omega_j = 2 pi j / T, j = 0..T-1 (row j). Computed by FFT.
Eigen::MatrixXcd fourier_transform(const MultivariateSeries& series);

/// I(omega) = J(omega) J(omega)^* at each grid frequency. Fourier frequencies
/// of the series length come from the FFT; other frequencies are summed
/// directly.
std::vector<Eigen::MatrixXcd> periodogram(const MultivariateSeries& series,
                                          const FrequencyGrid& grid);

/// Kernel-smoothed periodogram
///   f(omega) = (2 pi / T) sum_j K_h(omega - omega_j) I(omega_j),
/// j running over one period of Fourier frequencies, differences wrapped into
/// [-pi, pi]. The series is expected to be demeaned.
class SpectralEstimator {
 public:
  SpectralEstimator(const MultivariateSeries& series, const KernelSpec& kernel);

  /// Estimate at an arbitrary frequency (any sign).
  Eigen::MatrixXcd at(double omega) const;

  /// Estimate on fourier_grid(T). Frequencies are independent; the result does
  /// not depend on `threads`.
  SpectralEstimate on_fourier_grid(unsigned threads = 1) const;

  double bandwidth() const noexcept { return bandwidth_; }
  Eigen::Index length() const noexcept { return dft_.rows(); }
  const Eigen::MatrixXcd& dft() const noexcept { return dft_; }

 private:
  KernelSpec kernel_;
  double bandwidth_;
  Eigen::MatrixXcd dft_;
};

/// Convenience: SpectralEstimator(series, kernel).on_fourier_grid(threads).
/// Requires T >= 4.
SpectralEstimate smooth_spectral(const MultivariateSeries& series, const KernelSpec& kernel,
                                 unsigned threads = 1);

/// Spectral estimate of L' X_t given the estimate of X_t: L' f(omega) L.
SpectralEstimate rotate_estimate(const SpectralEstimate& estimate, const Eigen::MatrixXd& basis);

}  // namespace specseg
