#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace specseg {

/// T x p real observations, rows are time points and columns components.
/// Immutable; every entry is finite.
class MultivariateSeries {
 public:
  MultivariateSeries() = default;
  explicit MultivariateSeries(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index length() const noexcept { return values_.rows(); }
  Eigen::Index dimension() const noexcept { return values_.cols(); }

  /// Column `c` as a univariate series.
  Eigen::VectorXd component(Eigen::Index c) const { return values_.col(c); }

 private:
  Eigen::MatrixXd values_;
};

/// Strictly increasing frequencies inside the open interval (0, pi).
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> frequencies);

  const std::vector<double>& frequencies() const noexcept { return freqs_; }
  std::size_t size() const noexcept { return freqs_.size(); }
  double operator[](std::size_t i) const { return freqs_[i]; }

 private:
  std::vector<double> freqs_;
};

/// Open frequency interval (lo, hi) with 0 <= lo < hi <= pi.
class FrequencyBand {
 public:
  FrequencyBand(double lo, double hi);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool contains(double omega) const noexcept { return omega > lo_ && omega < hi_; }

  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;

 private:
  double lo_;
  double hi_;
};

MultivariateSeries load_csv(const std::filesystem::path& path, bool has_header);

/// Writes with round-trip precision; `header` may be empty.
void write_csv(const std::filesystem::path& path, const MultivariateSeries& series,
               const std::vector<std::string>& header = {});

MultivariateSeries demean(const MultivariateSeries& series);

/// Column means of the series.
Eigen::VectorXd column_means(const MultivariateSeries& series);

/// {2 pi j / T : j = 1, ..., floor((T - 1) / 2)}. Requires T >= 4.
FrequencyGrid fourier_grid(Eigen::Index length);

}  // namespace specseg
