#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specseg/error.hpp"
#include "specseg/spectral.hpp"

namespace {

using specseg::KernelFamily;
using specseg::KernelSpec;
using specseg::MultivariateSeries;

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sd);
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

MultivariateSeries centered_gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  return specseg::demean(MultivariateSeries(gaussian(n, p, seed)));
}

oracle::Kernel to_oracle(KernelFamily f) {
  return f == KernelFamily::BartlettPriestley ? oracle::Kernel::BartlettPriestley
                                              : oracle::Kernel::Parzen;
}

TEST(KernelValue, BartlettPriestleyPoints) {
  const auto bp = KernelFamily::BartlettPriestley;
  EXPECT_DOUBLE_EQ(specseg::kernel_value(bp, 0.0), 3.0 / (4.0 * kPi));
  EXPECT_EQ(specseg::kernel_value(bp, kPi), 0.0);
  EXPECT_DOUBLE_EQ(specseg::kernel_value(bp, kPi / 2), 9.0 / (16.0 * kPi));
  EXPECT_EQ(specseg::kernel_value(bp, 4.0), 0.0);
}

TEST(KernelValue, SymmetricNonnegativeUnitMass) {
  for (auto fam : {KernelFamily::BartlettPriestley, KernelFamily::Parzen}) {
    for (double t = -4.0; t <= 4.0; t += 0.01) {
      EXPECT_GE(specseg::kernel_value(fam, t), 0.0);
      EXPECT_EQ(specseg::kernel_value(fam, t), specseg::kernel_value(fam, -t));
    }
    const double mass = oracle::gauss_legendre(
        [fam](double u) { return specseg::kernel_value(fam, u); },
        {-kPi, -kPi / 2, 0.0, kPi / 2, kPi});
    EXPECT_NEAR(mass, 1.0, 1e-10) << to_string(fam);
  }
}

TEST(KernelValue, ParzenMatchesLagWindowShape) {
  for (double t = -kPi; t <= kPi; t += 0.05) {
    EXPECT_NEAR(specseg::kernel_value(KernelFamily::Parzen, t),
                oracle::kernel(oracle::Kernel::Parzen, t), 1e-15);
  }
}

TEST(KernelConstants, BartlettPriestleyMu0ClosedForm) {
  EXPECT_NEAR(specseg::kernel_constants(KernelFamily::BartlettPriestley).mu0, 3.0 / (5.0 * kPi),
              1e-10);
}

TEST(KernelConstants, AgreeWithIndependentQuadratures) {
  for (auto fam : {KernelFamily::BartlettPriestley, KernelFamily::Parzen}) {
    const auto lib = specseg::kernel_constants(fam);
    const auto gl = oracle::constants_gauss_legendre(to_oracle(fam));
    const auto simpson = oracle::constants_simpson(to_oracle(fam), 200);
    EXPECT_NEAR(lib.mu0, gl.mu0, 1e-10);
    EXPECT_NEAR(lib.sigma0_sq, gl.sigma0_sq, 1e-8);
    EXPECT_NEAR(simpson.sigma0_sq, gl.sigma0_sq, 1e-8);
    EXPECT_GT(lib.mu0, 0.0);
    EXPECT_GT(lib.sigma0_sq, 0.0);
  }
}

TEST(KernelSpec, BandwidthAndValidation) {
  const KernelSpec k(KernelFamily::BartlettPriestley, 0.15);
  EXPECT_DOUBLE_EQ(k.bandwidth(1000), std::pow(1000.0, -0.15));
  EXPECT_THROW(KernelSpec(KernelFamily::BartlettPriestley, 0.0), specseg::InvalidArgument);
  EXPECT_THROW(KernelSpec(KernelFamily::BartlettPriestley, 0.5), specseg::InvalidArgument);
  EXPECT_EQ(specseg::parse_kernel_family("parzen"), KernelFamily::Parzen);
  EXPECT_EQ(specseg::parse_kernel_family("bp"), KernelFamily::BartlettPriestley);
  EXPECT_THROW(specseg::parse_kernel_family("gauss"), specseg::InvalidArgument);
}

TEST(Periodogram, CosineConcentratesAtItsFrequency) {
  Eigen::MatrixXd x(8, 1);
  for (int t = 1; t <= 8; ++t) x(t - 1, 0) = std::cos(t * kPi / 2);
  const MultivariateSeries s(x);
  const auto grid = specseg::fourier_grid(8);
  const auto per = specseg::periodogram(s, grid);
  const double peak = per[1](0, 0).real();
  const double others = 0.5 * (per[0](0, 0).real() + per[2](0, 0).real());
  EXPECT_GT(peak, 10.0 * others);
  const Eigen::VectorXcd j = oracle::dft(x, kPi / 2);
  EXPECT_NEAR(peak, std::norm(j(0)), 1e-12);
}

TEST(Periodogram, HermitianRankOneNonnegative) {
  const auto s = centered_gaussian(37, 3, 4);
  const specseg::FrequencyGrid grid({0.1, 0.77, 1.3, 2.9});
  for (const auto& i : specseg::periodogram(s, grid)) {
    EXPECT_LE((i - i.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    for (Eigen::Index c = 0; c < 3; ++c) EXPECT_GE(i(c, c).real(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(i);
    EXPECT_LE(std::abs(es.eigenvalues()(1)), 1e-12 * es.eigenvalues()(2));
  }
}

TEST(Periodogram, FftPathMatchesDirectSummation) {
  const Eigen::MatrixXd x = gaussian(8, 2, 21);
  const MultivariateSeries s(x);
  const auto grid = specseg::fourier_grid(8);
  const auto per = specseg::periodogram(s, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Eigen::VectorXcd j = oracle::dft(x, grid[k]);
    EXPECT_LE((per[k] - j * j.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Eigen::MatrixXcd full = specseg::fourier_transform(s);
  for (Eigen::Index j = 0; j < 8; ++j) {
    const Eigen::VectorXcd ref = oracle::dft(x, 2 * kPi * j / 8.0);
    EXPECT_LE((full.row(j).transpose() - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SmoothSpectral, WhiteNoiseLevel) {
  const double sigma = 1.7;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = specseg::demean(MultivariateSeries(gaussian(2048, 1, 100 + seed, sigma)));
    const auto est = specseg::smooth_spectral(s, KernelSpec());
    double mean = 0.0;
    for (const auto& f : est.matrices) mean += f(0, 0).real();
    total += mean / static_cast<double>(est.matrices.size());
  }
  const double target = sigma * sigma / (2 * kPi);
  EXPECT_NEAR(total / 50.0, target, 0.15 * target);
}

TEST(SmoothSpectral, MatchesBruteForceDoubleLoop) {
  for (auto fam : {KernelFamily::BartlettPriestley, KernelFamily::Parzen}) {
    const auto s = centered_gaussian(64, 2, 8);
    const auto est = specseg::smooth_spectral(s, KernelSpec(fam, 0.15));
    const auto ref = oracle::brute_force_smooth(s.values(), to_oracle(fam), 0.15);
    ASSERT_EQ(est.matrices.size(), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
      EXPECT_LE((est.matrices[k] - ref[k]).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(SmoothSpectral, HermitianAndNonnegativeDefinite) {
  const auto s = centered_gaussian(301, 4, 2);
  const auto est = specseg::smooth_spectral(s, KernelSpec(KernelFamily::Parzen, 0.2));
  for (const auto& f : est.matrices) {
    EXPECT_LE((f - f.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::MatrixXd re = f.real();
    EXPECT_EQ(re, re.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    for (Eigen::Index c = 0; c < 4; ++c) {
      EXPECT_EQ(f(c, c).imag(), 0.0);
      EXPECT_GE(f(c, c).real(), -1e-12);
    }
  }
}

TEST(SmoothSpectral, ConjugateSymmetryInFrequency) {
  const auto s = centered_gaussian(97, 3, 13);
  const specseg::SpectralEstimator est(s, KernelSpec());
  for (double w : {0.05, 0.4, 1.1, 2.2, 3.0}) {
    EXPECT_LE((est.at(-w) - est.at(w).conjugate()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SmoothSpectral, PointEvaluationMatchesGrid) {
  const auto s = centered_gaussian(90, 2, 3);
  const specseg::SpectralEstimator est(s, KernelSpec());
  const auto grid = est.on_fourier_grid();
  for (std::size_t k = 0; k < grid.grid.size(); k += 7) {
    EXPECT_LE((est.at(grid.grid[k]) - grid.matrices[k]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SmoothSpectral, ScalesQuadraticallyWithSeries) {
  const auto s = centered_gaussian(128, 3, 17);
  const auto base = specseg::smooth_spectral(s, KernelSpec());
  const auto doubled = specseg::smooth_spectral(MultivariateSeries(2.0 * s.values()), KernelSpec());
  const auto other = specseg::smooth_spectral(MultivariateSeries(3.7 * s.values()), KernelSpec());
  for (std::size_t k = 0; k < base.matrices.size(); ++k) {
    EXPECT_EQ(doubled.matrices[k], (4.0 * base.matrices[k]).eval());
    const double scale = base.matrices[k].cwiseAbs().maxCoeff();
    EXPECT_LE((other.matrices[k] - 3.7 * 3.7 * base.matrices[k]).cwiseAbs().maxCoeff(),
              1e-13 * scale);
  }
}

TEST(SmoothSpectral, ThreadCountDoesNotChangeBits) {
  const auto s = centered_gaussian(500, 5, 23);
  const auto one = specseg::smooth_spectral(s, KernelSpec(), 1);
  const auto four = specseg::smooth_spectral(s, KernelSpec(), 4);
  for (std::size_t k = 0; k < one.matrices.size(); ++k) EXPECT_EQ(one.matrices[k], four.matrices[k]);
}

TEST(SmoothSpectral, RejectsShortSeries) {
  EXPECT_THROW(specseg::smooth_spectral(MultivariateSeries(Eigen::MatrixXd::Ones(3, 1)), KernelSpec()),
               specseg::InvalidArgument);
}

TEST(RotateEstimate, EqualsEstimateOfRotatedSeries) {
  const auto s = centered_gaussian(120, 3, 31);
  Eigen::MatrixXd l = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(3, 3, 4)).householderQ();
  const auto rotated = specseg::rotate_estimate(specseg::smooth_spectral(s, KernelSpec()), l);
  const auto direct =
      specseg::smooth_spectral(MultivariateSeries(s.values() * l), KernelSpec());
  for (std::size_t k = 0; k < direct.matrices.size(); ++k) {
    EXPECT_LE((rotated.matrices[k] - direct.matrices[k]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

}  // namespace
