#include "specseg/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "quadrature.hpp"
#include "specseg/error.hpp"
#include "specseg/parallel.hpp"

namespace specseg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) { return x - kTwoPi * std::nearbyint(x / kTwoPi); }

std::vector<double> kernel_breakpoints(KernelFamily family) {
  switch (family) {
    case KernelFamily::BartlettPriestley:
      return {-kPi, kPi};
    case KernelFamily::Parzen:
      return {-kPi, -kPi / 2.0, 0.0, kPi / 2.0, kPi};
  }
  return {};
}

KernelConstants compute_constants(KernelFamily family) {
  const auto k = [family](double u) { return kernel_value(family, u); };
  const auto breaks = kernel_breakpoints(family);

  const double mu0 =
      detail::integrate_piecewise([&](double u) { return k(u) * k(u); }, -kPi, kPi, breaks, 1e-13);

  // g(v) = int K(u) K(u + v) du; the product is smooth between the kernel
  // breakpoints b and b - v.
  const auto autocorr = [&](double v) {
    std::vector<double> pts = breaks;
    for (double b : breaks) pts.push_back(b - v);
    const double lo = std::max(-kPi, -kPi - v);
    const double hi = std::min(kPi, kPi - v);
    return detail::integrate_piecewise([&](double u) { return k(u) * k(u + v); }, lo, hi, pts,
                                       1e-14);
  };
  std::vector<double> outer;
  for (double a : breaks) {
    for (double b : breaks) outer.push_back(a - b);
  }
  // g is even, so integrate over [0, 2pi] and double.
  const double half = detail::integrate_piecewise(
      [&](double v) {
        const double g = autocorr(v);
        return g * g;
      },
      0.0, 2.0 * kPi, outer, 1e-13);
  return {mu0, kTwoPi * 2.0 * half};
}

// FFTW's planner is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::BartlettPriestley:
      return "bp";
    case KernelFamily::Parzen:
      return "parzen";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "bp" || name == "bartlett-priestley") return KernelFamily::BartlettPriestley;
  if (name == "parzen") return KernelFamily::Parzen;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

double kernel_value(KernelFamily family, double theta) {
  const double a = std::abs(theta);
  if (a > kPi) return 0.0;
  switch (family) {
    case KernelFamily::BartlettPriestley:
      return 3.0 / (4.0 * kPi) * (1.0 - theta * theta / (kPi * kPi));
    case KernelFamily::Parzen: {
      const double x = a / kPi;
      const double w = x <= 0.5 ? 1.0 - 6.0 * x * x + 6.0 * x * x * x : 2.0 * std::pow(1.0 - x, 3);
      return 4.0 / (3.0 * kPi) * w;
    }
  }
  return 0.0;
}

KernelConstants kernel_constants(KernelFamily family) {
  switch (family) {
    case KernelFamily::BartlettPriestley: {
      static const KernelConstants bp = compute_constants(KernelFamily::BartlettPriestley);
      return bp;
    }
    case KernelFamily::Parzen: {
      static const KernelConstants parzen = compute_constants(KernelFamily::Parzen);
      return parzen;
    }
  }
  throw InvalidArgument("unknown kernel family");
}

KernelSpec::KernelSpec(KernelFamily family, double exponent)
    : family_(family), exponent_(exponent), constants_(kernel_constants(family)) {
  if (!(exponent > 0.0 && exponent < 0.5)) {
    throw InvalidArgument("bandwidth exponent q must lie in (0, 1/2)");
  }
}

double KernelSpec::bandwidth(Eigen::Index length) const {
  if (length < 1) throw InvalidArgument("series length must be positive");
  return std::pow(static_cast<double>(length), -exponent_);
}

Eigen::MatrixXcd fourier_transform(const MultivariateSeries& series) {
  const int n = static_cast<int>(series.length());
  const Eigen::Index p = series.dimension();
  Eigen::MatrixXcd out(n, p);

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("FFTW plan creation failed");

  const double scale = 1.0 / std::sqrt(kTwoPi * n);
  for (Eigen::Index c = 0; c < p; ++c) {
    for (int t = 0; t < n; ++t) buf[static_cast<std::size_t>(t)] = series.values()(t, c);
    fftw_execute(plan);
    // The FFT indexes time from 0; the transform indexes it from 1, which
    // contributes the phase exp(-i omega_j).
    for (int j = 0; j < n; ++j) {
      const double w = kTwoPi * j / n;
      out(j, c) = buf[static_cast<std::size_t>(j)] * std::polar(scale, -w);
    }
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<Eigen::MatrixXcd> periodogram(const MultivariateSeries& series,
                                          const FrequencyGrid& grid) {
  const Eigen::Index n = series.length();
  const Eigen::Index p = series.dimension();
  const Eigen::MatrixXcd dft = fourier_transform(series);
  const double scale = 1.0 / std::sqrt(kTwoPi * static_cast<double>(n));

  std::vector<Eigen::MatrixXcd> out;
  out.reserve(grid.size());
  for (double omega : grid.frequencies()) {
    const double pos = omega * static_cast<double>(n) / kTwoPi;
    const double j = std::nearbyint(pos);
    Eigen::VectorXcd J(p);
    if (std::abs(pos - j) < 1e-9) {
      J = dft.row(static_cast<Eigen::Index>(j) % n).transpose();
    } else {
      J.setZero();
      for (Eigen::Index t = 0; t < n; ++t) {
        const std::complex<double> e = std::polar(scale, -omega * static_cast<double>(t + 1));
        J += series.values().row(t).transpose().cast<std::complex<double>>() * e;
      }
    }
    out.emplace_back(J * J.adjoint());
  }
  return out;
}

SpectralEstimator::SpectralEstimator(const MultivariateSeries& series, const KernelSpec& kernel)
    : kernel_(kernel), bandwidth_(0.0) {
  if (series.length() < 4) throw InvalidArgument("spectral estimation requires T >= 4");
  bandwidth_ = kernel_.bandwidth(series.length());
  dft_ = fourier_transform(series);
}

Eigen::MatrixXcd SpectralEstimator::at(double omega) const {
  const Eigen::Index n = dft_.rows();
  const Eigen::Index p = dft_.cols();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(p, p);
  for (Eigen::Index j = -(n - 1) / 2; j <= n / 2; ++j) {
    const double wj = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    const double weight = kernel_.scaled(wrap_angle(omega - wj), bandwidth_);
    if (weight == 0.0) continue;
    const Eigen::Index row = ((j % n) + n) % n;
    const Eigen::VectorXcd J = dft_.row(row).transpose();
    acc.noalias() += weight * (J * J.adjoint());
  }
  return acc * (kTwoPi / static_cast<double>(n));
}

SpectralEstimate SpectralEstimator::on_fourier_grid(unsigned threads) const {
  const Eigen::Index n = dft_.rows();
  const Eigen::Index p = dft_.cols();
  const std::size_t pairs = static_cast<std::size_t>(p * (p + 1) / 2);

  // Upper-triangle products J_a conj(J_b), one contiguous row per frequency.
  std::vector<std::complex<double>> products(static_cast<std::size_t>(n) * pairs);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::size_t q = static_cast<std::size_t>(j) * pairs;
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = a; b < p; ++b) products[q++] = dft_(j, a) * std::conj(dft_(j, b));
    }
  }

  // Nonzero kernel taps over one period of offsets d = k - j.
  struct Tap {
    Eigen::Index offset;
    double weight;
  };
  std::vector<Tap> taps;
  for (Eigen::Index d = -(n - 1) / 2; d <= n / 2; ++d) {
    const double theta = kTwoPi * static_cast<double>(d) / static_cast<double>(n);
    const double w = kernel_.scaled(theta, bandwidth_);
    if (w > 0.0) taps.push_back({d, w});
  }

  FrequencyGrid grid = fourier_grid(n);
  const double norm = kTwoPi / static_cast<double>(n);
  std::vector<Eigen::MatrixXcd> matrices(grid.size());
  detail::parallel_for(grid.size(), threads, [&](std::size_t idx) {
    const Eigen::Index k = static_cast<Eigen::Index>(idx) + 1;
    std::vector<std::complex<double>> acc(pairs);
    for (const Tap& tap : taps) {
      const Eigen::Index j = ((k - tap.offset) % n + n) % n;
      const std::complex<double>* row = &products[static_cast<std::size_t>(j) * pairs];
      for (std::size_t q = 0; q < pairs; ++q) acc[q] += tap.weight * row[q];
    }
    Eigen::MatrixXcd m(p, p);
    std::size_t q = 0;
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = a; b < p; ++b, ++q) {
        const std::complex<double> v = norm * acc[q];
        if (a == b) {
          m(a, a) = std::complex<double>(v.real(), 0.0);
        } else {
          m(a, b) = v;
          m(b, a) = std::conj(v);
        }
      }
    }
    matrices[idx] = std::move(m);
  });

  return SpectralEstimate{std::move(grid), std::move(matrices), bandwidth_, n};
}

SpectralEstimate smooth_spectral(const MultivariateSeries& series, const KernelSpec& kernel,
                                 unsigned threads) {
  return SpectralEstimator(series, kernel).on_fourier_grid(threads);
}

SpectralEstimate rotate_estimate(const SpectralEstimate& estimate, const Eigen::MatrixXd& basis) {
  if (basis.rows() != estimate.dimension()) {
    throw InvalidArgument("basis rows do not match the spectral dimension");
  }
  SpectralEstimate out{estimate.grid, {}, estimate.bandwidth_used, estimate.series_length};
  out.matrices.reserve(estimate.matrices.size());
  const Eigen::MatrixXcd lc = basis.cast<std::complex<double>>();
  for (const auto& f : estimate.matrices) {
    Eigen::MatrixXcd r = lc.adjoint() * f * lc;
    // Restore exact Hermitian symmetry lost to rounding.
    r = (0.5 * (r + r.adjoint())).eval();
    out.matrices.push_back(std::move(r));
  }
  return out;
}

}  // namespace specseg
