#pragma once

// Reference computations used only by the tests. Everything here is written
// from the defining formulas with no shared code paths into the library.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

enum class Kernel { BartlettPriestley, Parzen };

double kernel(Kernel k, double theta);

/// J(omega) = (2 pi T)^(-1/2) sum_{t=1}^T x_t exp(-i t omega) by direct summation.
Eigen::VectorXcd dft(const Eigen::MatrixXd& x, double omega);

/// Smoothed periodogram on the Fourier grid {2 pi k / T, k = 1..floor((T-1)/2)}
/// by the O(T^2) double loop over (omega_k, omega_j), j = -floor((T-1)/2)..floor(T/2).
std::vector<Eigen::MatrixXcd> brute_force_smooth(const Eigen::MatrixXd& x, Kernel k, double q);

/// Piecewise Gauss-Legendre (n-point on every sub-interval between breakpoints).
double gauss_legendre(const std::function<double(double)>& f, std::vector<double> breakpoints,
                      int n = 16);

/// Composite Simpson with `panels` panels on every sub-interval.
double composite_simpson(const std::function<double(double)>& f, std::vector<double> breakpoints,
                         int panels);

struct Constants {
  double mu0;
  double sigma0_sq;
};

/// mu0 and sigma0^2 by nested Gauss-Legendre.
Constants constants_gauss_legendre(Kernel k);

/// mu0 and sigma0^2 by nested composite Simpson.
Constants constants_simpson(Kernel k, int panels);

/// Spectral matrix of x_t = Phi x_{t-1} + e_t, Cov(e) = Sigma:
/// (2 pi)^(-1) H Sigma H^*, H = (I - Phi e^{-i omega})^(-1).
Eigen::MatrixXcd var1_spectrum(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& sigma,
                               double omega);

/// Integral over [-pi, pi] of the squared coherence of components a, b.
double var1_coherence_integral(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& sigma, int a,
                               int b);

/// Upper-tail standard normal probability.
double normal_upper(double z);

}  // namespace oracle
