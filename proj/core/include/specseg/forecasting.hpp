#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "specseg/segmentation.hpp"
#include "specseg/series.hpp"

namespace specseg {

/// x_t = intercept + sum_k coefficients[k] x_{t-1-k} + e_t, Cov(e_t) = innovation_cov.
struct VarModel {
  int order = 0;
  std::vector<Eigen::MatrixXd> coefficients;
  Eigen::VectorXd intercept;
  Eigen::MatrixXd innovation_cov;
  double aic = 0.0;

  Eigen::Index dimension() const { return intercept.size(); }
};

/// Least-squares VAR fit with AIC order selection over 0..max_order. Every
/// candidate is scored on the common sample t = max_order..T-1 with
///   AIC = log det(Sigma) + 2 d (1 + k d) / n;
/// the chosen order is then refit on all T - k usable rows.
/// Requires T > (max_order + 1) d + 1. Collinear regressors are allowed; the log
/// determinant floors covariance eigenvalues at 1e-12 times the largest. A
/// residual covariance that is exactly zero is a NumericalError.
VarModel fit_var(const MultivariateSeries& series, int max_order);

/// Least-squares fit at a fixed order.
VarModel fit_var_order(const MultivariateSeries& series, int order);

/// Iterated plug-in forecasts; `history` rows are time points, the last row
/// being the most recent. Returns steps x d.
Eigen::MatrixXd forecast_var(const VarModel& model, const Eigen::MatrixXd& history, int steps);

/// Gaussian simulation from a VAR model started at zero.
MultivariateSeries simulate_var(const VarModel& model, Eigen::Index length, Eigen::Index burn_in,
                                std::uint64_t seed);

/// Per-column OLS line a + b t with t = 0..T-1.
struct LinearTrend {
  Eigen::VectorXd intercept;
  Eigen::VectorXd slope;

  /// Trend values at times t0, t0+1, ..., t0+n-1 (n x d).
  Eigen::MatrixXd evaluate(Eigen::Index t0, Eigen::Index n) const;
};

LinearTrend fit_linear_trend(const MultivariateSeries& series);

struct ForecastConfig {
  SegmentConfig segment{};
  int max_order = 10;
  /// Remove and re-add a per-column linear trend instead of the mean.
  bool detrend = false;
};

struct ForecastResult {
  Eigen::MatrixXd forecast;         ///< steps x p, original coordinates
  Eigen::MatrixXd latent_forecast;  ///< steps x p, stacked group forecasts
  std::vector<Group> groups;
  std::vector<int> per_group_orders;
};

/// Demixes the centered series with `demixing`, fits one VAR per consecutive
/// block of `block_sizes`, stacks the forecasts and remixes with `mixing`.
ForecastResult forecast_with_demixing(const MultivariateSeries& series,
                                      const Eigen::MatrixXd& demixing,
                                      const Eigen::MatrixXd& mixing,
                                      const std::vector<Eigen::Index>& block_sizes, int steps,
                                      const ForecastConfig& config);

/// segment -> demix -> per-group VAR -> remix -> re-add mean or trend.
/// `groups` in the result are the estimated groups of the rotated coordinates.
ForecastResult forecast_pipeline(const MultivariateSeries& series, int steps,
                                 const ForecastConfig& config);

/// Baseline: one VAR for all p components.
Eigen::MatrixXd forecast_full_var(const MultivariateSeries& series, int steps,
                                  const ForecastConfig& config);

/// Baseline: an independent AR model per component.
Eigen::MatrixXd forecast_univariate_ar(const MultivariateSeries& series, int steps,
                                       const ForecastConfig& config);

struct ForecastScore {
  Eigen::VectorXd mse;  ///< per step, averaged over windows and components
  Eigen::VectorXd sd;   ///< per step, sample standard deviation across windows
};

ForecastScore evaluate_forecasts(const std::vector<Eigen::MatrixXd>& actuals,
                                 const std::vector<Eigen::MatrixXd>& forecasts);

using Forecaster = std::function<Eigen::MatrixXd(const MultivariateSeries&, int)>;

struct RollingForecasts {
  std::vector<Eigen::MatrixXd> actuals;
  std::vector<Eigen::MatrixXd> forecasts;
};

/// Window w trains on rows [w, w + train_length) and is scored on the next
/// `steps` rows. Requires T >= train_length + windows - 1 + steps.
RollingForecasts rolling_forecasts(const MultivariateSeries& data, Eigen::Index train_length,
                                   Eigen::Index windows, int steps, const Forecaster& forecaster,
                                   unsigned threads = 1);

/// Synthetic trend-plus-stationary data in the shape of a seven-site wind
/// panel: latent groups of sizes (2, 2, 1, 1, 1), each a stationary VAR(1),
/// mixed by a Haar rotation and shifted by per-site linear trends.
struct WindLikeData {
  MultivariateSeries x;
  Eigen::MatrixXd mixing;
  std::vector<Eigen::Index> group_sizes;
};

WindLikeData wind_like_series(Eigen::Index length, std::uint64_t seed);

}  // namespace specseg
