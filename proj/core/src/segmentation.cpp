#include "specseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "specseg/error.hpp"
#include "specseg/metrics.hpp"
#include "specseg/parallel.hpp"

namespace specseg {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::size_t> band_indices(const SpectralEstimate& estimate,
                                      const std::optional<FrequencyBand>& band) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < estimate.grid.size(); ++j) {
    if (!band || band->contains(estimate.grid[j])) idx.push_back(j);
  }
  if (idx.empty()) throw InvalidArgument("frequency band contains no grid frequencies");
  return idx;
}

double average_diagonal_level(const SpectralEstimate& estimate) {
  double trace = 0.0;
  for (const auto& f : estimate.matrices) trace += f.diagonal().real().sum();
  return trace / static_cast<double>(estimate.dimension() * estimate.matrices.size());
}

}  // namespace

std::string_view to_string(FdrMethod method) {
  return method == FdrMethod::BenjaminiHochberg ? "bh" : "by";
}

FdrMethod parse_fdr_method(std::string_view name) {
  if (name == "bh") return FdrMethod::BenjaminiHochberg;
  if (name == "by") return FdrMethod::BenjaminiYekutieli;
  throw InvalidArgument("unknown FDR method '" + std::string(name) + "'");
}

Eigen::MatrixXd accumulate_sx(const SpectralEstimate& estimate,
                              const std::optional<FrequencyBand>& band) {
  const Eigen::Index p = estimate.dimension();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t j : band_indices(estimate, band)) s += estimate.matrices[j].real();
  return 0.5 * (s + s.transpose());
}

EigenSummary symmetric_eigen(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() == 0) throw InvalidArgument("matrix must be square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidArgument("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  const Eigen::Index p = s.rows();
  EigenSummary out{s, Eigen::VectorXd(p), Eigen::MatrixXd(p, p)};
  // Stable descending order keeps the solver's order among exact ties.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return solver.eigenvalues()(a) > solver.eigenvalues()(b);
  });
  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = solver.eigenvalues()(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index lead = 0;
    for (Eigen::Index i = 1; i < p; ++i) {
      if (std::abs(v(i)) > std::abs(v(lead))) lead = i;
    }
    if (v(lead) < 0.0) v = -v;
    out.eigenvectors.col(k) = v;
  }
  return out;
}

MultivariateSeries transform(const MultivariateSeries& series, const Eigen::MatrixXd& basis) {
  if (basis.rows() != series.dimension()) {
    throw InvalidArgument("basis has " + std::to_string(basis.rows()) + " rows, series has " +
                          std::to_string(series.dimension()) + " components");
  }
  return MultivariateSeries(series.values() * basis);
}

double coherence_statistic(const SpectralEstimate& estimate, Eigen::Index a, Eigen::Index b,
                           const std::optional<FrequencyBand>& band) {
  const Eigen::Index p = estimate.dimension();
  if (a == b || a < 0 || b < 0 || a >= p || b >= p) {
    throw InvalidArgument("coherence needs two distinct valid component indices");
  }
  const auto idx = band_indices(estimate, band);
  const double floor = 1e-12 * average_diagonal_level(estimate);
  std::size_t floored = 0;
  double sum = 0.0;
  for (std::size_t j : idx) {
    const auto& f = estimate.matrices[j];
    double faa = f(a, a).real();
    double fbb = f(b, b).real();
    if (faa < floor || fbb < floor) {
      ++floored;
      faa = std::max(faa, floor);
      fbb = std::max(fbb, floor);
    }
    sum += std::norm(f(a, b)) / (faa * fbb);
  }
  if (static_cast<double>(floored) > 0.1 * static_cast<double>(idx.size())) {
    std::ostringstream os;
    os << "degenerate spectrum: diagonal floored at " << floored << " of " << idx.size()
       << " frequencies for pair (" << a << ", " << b << ")";
    throw NumericalError(os.str());
  }
  const double cell = 2.0 * kPi / static_cast<double>(estimate.series_length);
  return 2.0 * cell * sum;
}

double band_fraction(const SpectralEstimate& estimate, const std::optional<FrequencyBand>& band) {
  if (!band) return 1.0;
  return static_cast<double>(band_indices(estimate, band).size()) /
         static_cast<double>(estimate.grid.size());
}

double null_center(Eigen::Index length, const KernelSpec& kernel, double fraction) {
  return 4.0 * kPi * kPi * kernel.mu0() * fraction / std::sqrt(kernel.bandwidth(length));
}

double null_scale(const KernelSpec& kernel, double fraction) {
  return 2.0 * std::numbers::sqrt2 * kPi * std::sqrt(kernel.sigma0_sq() * fraction);
}

double standardized_statistic(double stat, Eigen::Index length, const KernelSpec& kernel,
                              double fraction) {
  const double h = kernel.bandwidth(length);
  return (static_cast<double>(length) * std::sqrt(h) * stat - null_center(length, kernel, fraction)) /
         null_scale(kernel, fraction);
}

double coherence_pvalue(double stat, Eigen::Index length, const KernelSpec& kernel,
                        double fraction) {
  const double z = standardized_statistic(stat, length, kernel, fraction);
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

std::vector<double> fdr_adjust(const std::vector<double>& pvalues, FdrMethod method) {
  const std::size_t n = pvalues.size();
  for (double v : pvalues) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("p-values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pvalues[i] < pvalues[j]; });
  double factor = 1.0;
  if (method == FdrMethod::BenjaminiYekutieli) {
    factor = 0.0;
    for (std::size_t i = 1; i <= n; ++i) factor += 1.0 / static_cast<double>(i);
  }
  std::vector<double> adjusted(n);
  double running = 1.0;
  for (std::size_t r = n; r-- > 0;) {
    const double v = pvalues[order[r]] * factor * static_cast<double>(n) / static_cast<double>(r + 1);
    running = std::min(running, v);
    // max() keeps rounding in p * n / n from dipping below the raw value.
    adjusted[order[r]] = std::max(pvalues[order[r]], std::min(1.0, running));
  }
  return adjusted;
}

Eigen::MatrixXi build_adjacency(const PairTestReport& report) {
  const Eigen::Index p = report.pvalue_adjusted.rows();
  Eigen::MatrixXi e = Eigen::MatrixXi::Zero(p, p);
  if (report.alpha <= 0.0) return e;
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a + 1; b < p; ++b) {
      if (report.pvalue_adjusted(a, b) <= report.alpha) e(a, b) = e(b, a) = 1;
    }
  }
  return e;
}

std::vector<Group> connected_components(const Eigen::MatrixXi& adjacency) {
  const Eigen::Index p = adjacency.rows();
  std::vector<Eigen::Index> label(static_cast<std::size_t>(p), -1);
  std::vector<Group> groups;
  for (Eigen::Index start = 0; start < p; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    const auto id = static_cast<Eigen::Index>(groups.size());
    Group members{start};
    label[static_cast<std::size_t>(start)] = id;
    for (std::size_t head = 0; head < members.size(); ++head) {
      const Eigen::Index v = members[head];
      for (Eigen::Index w = 0; w < p; ++w) {
        if (adjacency(v, w) != 0 && label[static_cast<std::size_t>(w)] < 0) {
          label[static_cast<std::size_t>(w)] = id;
          members.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    groups.push_back(std::move(members));
  }
  return groups;
}

void apply_grouping(const Eigen::MatrixXd& basis, const std::vector<Group>& groups,
                    SegmentationResult& result) {
  const Eigen::Index p = basis.cols();
  result.groups = groups;
  result.permutation.clear();
  for (const auto& g : groups) result.permutation.insert(result.permutation.end(), g.begin(), g.end());
  if (static_cast<Eigen::Index>(result.permutation.size()) != p) {
    throw InvalidArgument("groups do not partition the components");
  }
  result.mixing.resize(basis.rows(), p);
  for (Eigen::Index k = 0; k < p; ++k) {
    result.mixing.col(k) = basis.col(result.permutation[static_cast<std::size_t>(k)]);
  }
  result.demixing = result.mixing.transpose();
  result.m_hat = static_cast<Eigen::Index>(groups.size());
}

SegmentationResult segment(const MultivariateSeries& series, const SegmentConfig& config) {
  const Eigen::Index n = series.length();
  const Eigen::Index p = series.dimension();
  if (n < 2 * p || n < 4) {
    throw InvalidArgument("segmentation requires T >= 2p and T >= 4 (T=" + std::to_string(n) +
                          ", p=" + std::to_string(p) + ")");
  }
  if (!(config.alpha >= 0.0 && config.alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in [0, 1)");
  }

  const MultivariateSeries centered = demean(series);
  const SpectralEstimate fx = smooth_spectral(centered, config.kernel, config.threads);

  SegmentationResult result;
  result.eigen = symmetric_eigen(accumulate_sx(fx, config.band));
  const SpectralEstimate fy = rotate_estimate(fx, result.eigen.eigenvectors);
  const double fraction = band_fraction(fx, config.band);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a + 1; b < p; ++b) pairs.emplace_back(a, b);
  }
  std::vector<double> stats(pairs.size());
  std::vector<double> raw(pairs.size());
  detail::parallel_for(pairs.size(), config.threads, [&](std::size_t k) {
    stats[k] = coherence_statistic(fy, pairs[k].first, pairs[k].second, config.band);
    raw[k] = coherence_pvalue(stats[k], n, config.kernel, fraction);
  });
  const std::vector<double> adjusted = fdr_adjust(raw, config.fdr);

  PairTestReport& report = result.report;
  report.alpha = config.alpha;
  report.statistic = Eigen::MatrixXd::Zero(p, p);
  report.pvalue_raw = Eigen::MatrixXd::Ones(p, p);
  report.pvalue_adjusted = Eigen::MatrixXd::Ones(p, p);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    report.statistic(a, b) = report.statistic(b, a) = stats[k];
    report.pvalue_raw(a, b) = report.pvalue_raw(b, a) = raw[k];
    report.pvalue_adjusted(a, b) = report.pvalue_adjusted(b, a) = adjusted[k];
  }

  result.adjacency = build_adjacency(report);
  apply_grouping(result.eigen.eigenvectors, connected_components(result.adjacency), result);

  if (result.m_hat > 1) {
    std::vector<Eigen::Index> sizes;
    for (const auto& g : result.groups) sizes.push_back(static_cast<Eigen::Index>(g.size()));
    Eigen::VectorXd permuted(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      permuted(k) = result.eigen.eigenvalues(result.permutation[static_cast<std::size_t>(k)]);
    }
    const double gap = eigengap(Eigen::MatrixXd(permuted.asDiagonal()), sizes);
    const double top = std::abs(result.eigen.eigenvalues(0));
    if (top > 0.0 && gap / top < config.eigengap_warning) {
      std::ostringstream os;
      os << "small eigengap between estimated groups: relative gap " << gap / top;
      result.warnings.push_back(os.str());
    }
  }
  return result;
}

}  // namespace specseg
