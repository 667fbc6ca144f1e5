#include "specseg/forecasting.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "specseg/error.hpp"
#include "specseg/parallel.hpp"
#include "specseg/simgen.hpp"

namespace specseg {

namespace {

// Relative eigenvalue floor for log det of a rank-deficient residual covariance.
constexpr double kCovarianceFloor = 1e-12;

// Regression of x_t on (1, x_{t-1}, ..., x_{t-order}) for t = start..T-1.
Eigen::MatrixXd lagged_design(const Eigen::MatrixXd& x, int order, Eigen::Index start) {
  const Eigen::Index n = x.rows() - start;
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd z(n, 1 + order * d);
  z.col(0).setOnes();
  for (int k = 1; k <= order; ++k) {
    z.middleCols(1 + (k - 1) * d, d) = x.middleRows(start - k, n);
  }
  return z;
}

struct LsFit {
  Eigen::MatrixXd beta;  // (1 + order d) x d
  Eigen::MatrixXd sigma;
  double log_det = 0.0;
};

LsFit least_squares(const Eigen::MatrixXd& x, int order, Eigen::Index start) {
  const Eigen::MatrixXd z = lagged_design(x, order, start);
  const Eigen::MatrixXd y = x.bottomRows(x.rows() - start);
  // Collinear lags are legitimate (exactly time-shifted components); the
  // pivoted QR then returns a basic solution with the same fitted values.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
  LsFit fit;
  fit.beta = qr.solve(y);
  const Eigen::MatrixXd resid = y - z * fit.beta;
  fit.sigma = resid.transpose() * resid / static_cast<double>(y.rows());
  fit.sigma = 0.5 * (fit.sigma + fit.sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.sigma, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  if (eig.info() != Eigen::Success || !(top > 0.0)) {
    throw NumericalError("zero residual covariance at VAR order " + std::to_string(order));
  }
  fit.log_det = eig.eigenvalues().cwiseMax(kCovarianceFloor * top).array().log().sum();
  return fit;
}

VarModel to_model(const LsFit& fit, int order, Eigen::Index d) {
  VarModel m;
  m.order = order;
  m.intercept = fit.beta.row(0).transpose();
  for (int k = 0; k < order; ++k) {
    m.coefficients.push_back(fit.beta.middleRows(1 + k * d, d).transpose());
  }
  m.innovation_cov = fit.sigma;
  return m;
}

struct Centering {
  Eigen::MatrixXd base;    // T x p, centered data
  Eigen::MatrixXd future;  // steps x p, level to add back
};

Centering center(const MultivariateSeries& series, int steps, bool detrend) {
  const Eigen::Index n = series.length();
  Centering c;
  if (detrend) {
    const LinearTrend trend = fit_linear_trend(series);
    c.base = series.values() - trend.evaluate(0, n);
    c.future = trend.evaluate(n, steps);
  } else {
    const Eigen::RowVectorXd mu = column_means(series).transpose();
    c.base = series.values().rowwise() - mu;
    c.future = mu.replicate(steps, 1);
  }
  return c;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (s + s.transpose()));
  const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

VarModel fit_var_order(const MultivariateSeries& series, int order) {
  const Eigen::Index d = series.dimension();
  if (order < 0) throw InvalidArgument("VAR order must be nonnegative");
  if (series.length() <= (order + 1) * d + 1) {
    throw InvalidArgument("series too short for VAR order " + std::to_string(order));
  }
  LsFit fit = least_squares(series.values(), order, order);
  VarModel m = to_model(fit, order, d);
  const double n = static_cast<double>(series.length() - order);
  m.aic = fit.log_det + 2.0 * static_cast<double>(d * (1 + order * d)) / n;
  return m;
}

VarModel fit_var(const MultivariateSeries& series, int max_order) {
  const Eigen::Index d = series.dimension();
  if (max_order < 0) throw InvalidArgument("max_order must be nonnegative");
  if (series.length() <= (max_order + 1) * d + 1) {
    throw InvalidArgument("series of length " + std::to_string(series.length()) +
                          " is too short for max_order " + std::to_string(max_order) +
                          " in dimension " + std::to_string(d));
  }
  const double n = static_cast<double>(series.length() - max_order);
  int best = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_order; ++k) {
    const LsFit fit = least_squares(series.values(), k, max_order);
    const double aic = fit.log_det + 2.0 * static_cast<double>(d * (1 + k * d)) / n;
    if (aic < best_aic) {
      best_aic = aic;
      best = k;
    }
  }
  return fit_var_order(series, best);
}

Eigen::MatrixXd forecast_var(const VarModel& model, const Eigen::MatrixXd& history, int steps) {
  const Eigen::Index d = model.dimension();
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  if (history.cols() != d) throw InvalidArgument("history dimension does not match the model");
  if (history.rows() < model.order) {
    throw InvalidArgument("history has " + std::to_string(history.rows()) +
                          " rows, the model needs " + std::to_string(model.order));
  }
  Eigen::MatrixXd path(model.order + steps, d);
  if (model.order > 0) path.topRows(model.order) = history.bottomRows(model.order);
  for (int s = 0; s < steps; ++s) {
    const Eigen::Index t = model.order + s;
    Eigen::VectorXd next = model.intercept;
    for (int k = 0; k < model.order; ++k) {
      next += model.coefficients[static_cast<std::size_t>(k)] * path.row(t - 1 - k).transpose();
    }
    path.row(t) = next.transpose();
  }
  return path.bottomRows(steps);
}

MultivariateSeries simulate_var(const VarModel& model, Eigen::Index length, Eigen::Index burn_in,
                                std::uint64_t seed) {
  const Eigen::Index d = model.dimension();
  if (d == 0 || length < 1 || burn_in < 0) throw InvalidArgument("invalid VAR simulation request");
  const Eigen::MatrixXd root = psd_sqrt(model.innovation_cov);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index total = length + burn_in;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, d);
  Eigen::VectorXd e(d);
  for (Eigen::Index t = 0; t < total; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) e(i) = normal(rng);
    Eigen::VectorXd v = model.intercept + root * e;
    for (int k = 0; k < model.order; ++k) {
      if (t - 1 - k >= 0) {
        v += model.coefficients[static_cast<std::size_t>(k)] * x.row(t - 1 - k).transpose();
      }
    }
    x.row(t) = v.transpose();
  }
  return MultivariateSeries(x.bottomRows(length));
}

Eigen::MatrixXd LinearTrend::evaluate(Eigen::Index t0, Eigen::Index n) const {
  Eigen::MatrixXd out(n, intercept.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.row(i) = (intercept + static_cast<double>(t0 + i) * slope).transpose();
  }
  return out;
}

LinearTrend fit_linear_trend(const MultivariateSeries& series) {
  const Eigen::Index n = series.length();
  if (n < 2) throw InvalidArgument("trend fit needs at least two observations");
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  const double tbar = t.mean();
  const Eigen::VectorXd tc = t.array() - tbar;
  const Eigen::VectorXd means = column_means(series);
  LinearTrend trend;
  trend.slope = (series.values().transpose() * tc) / tc.squaredNorm();
  trend.intercept = means - tbar * trend.slope;
  return trend;
}

ForecastResult forecast_with_demixing(const MultivariateSeries& series,
                                      const Eigen::MatrixXd& demixing,
                                      const Eigen::MatrixXd& mixing,
                                      const std::vector<Eigen::Index>& block_sizes, int steps,
                                      const ForecastConfig& config) {
  const Eigen::Index p = series.dimension();
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  if (demixing.rows() != p || demixing.cols() != p || mixing.rows() != p || mixing.cols() != p) {
    throw InvalidArgument("mixing and demixing must be p x p");
  }
  Eigen::Index total = 0;
  for (Eigen::Index d : block_sizes) total += d;
  if (total != p) throw InvalidArgument("block sizes must sum to p");

  const Centering c = center(series, steps, config.detrend);
  const Eigen::MatrixXd latent = c.base * demixing.transpose();

  ForecastResult out;
  out.latent_forecast.resize(steps, p);
  out.per_group_orders.assign(block_sizes.size(), 0);
  std::vector<Eigen::Index> starts;
  Eigen::Index start = 0;
  for (Eigen::Index d : block_sizes) {
    starts.push_back(start);
    Group g(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) g[static_cast<std::size_t>(i)] = start + i;
    out.groups.push_back(std::move(g));
    start += d;
  }
  detail::parallel_for(block_sizes.size(), config.segment.threads, [&](std::size_t g) {
    const Eigen::MatrixXd block = latent.middleCols(starts[g], block_sizes[g]);
    const VarModel model = fit_var(MultivariateSeries(block), config.max_order);
    out.per_group_orders[g] = model.order;
    out.latent_forecast.middleCols(starts[g], block_sizes[g]) = forecast_var(model, block, steps);
  });
  out.forecast = out.latent_forecast * mixing.transpose() + c.future;
  return out;
}

ForecastResult forecast_pipeline(const MultivariateSeries& series, int steps,
                                 const ForecastConfig& config) {
  const MultivariateSeries input =
      config.detrend
          ? MultivariateSeries(series.values() -
                               fit_linear_trend(series).evaluate(0, series.length()))
          : series;
  const SegmentationResult seg = segment(input, config.segment);
  std::vector<Eigen::Index> sizes;
  for (const auto& g : seg.groups) sizes.push_back(static_cast<Eigen::Index>(g.size()));
  ForecastResult out =
      forecast_with_demixing(series, seg.demixing, seg.mixing, sizes, steps, config);
  out.groups = seg.groups;
  return out;
}

Eigen::MatrixXd forecast_full_var(const MultivariateSeries& series, int steps,
                                  const ForecastConfig& config) {
  const Eigen::Index p = series.dimension();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p, p);
  return forecast_with_demixing(series, id, id, {p}, steps, config).forecast;
}

Eigen::MatrixXd forecast_univariate_ar(const MultivariateSeries& series, int steps,
                                       const ForecastConfig& config) {
  const Eigen::Index p = series.dimension();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p, p);
  return forecast_with_demixing(series, id, id, std::vector<Eigen::Index>(p, 1), steps, config)
      .forecast;
}

ForecastScore evaluate_forecasts(const std::vector<Eigen::MatrixXd>& actuals,
                                 const std::vector<Eigen::MatrixXd>& forecasts) {
  if (actuals.size() != forecasts.size() || actuals.empty()) {
    throw InvalidArgument("need the same positive number of actual and forecast windows");
  }
  const Eigen::Index steps = actuals.front().rows();
  const Eigen::Index p = actuals.front().cols();
  const auto windows = static_cast<Eigen::Index>(actuals.size());
  Eigen::MatrixXd per_window(windows, steps);
  for (Eigen::Index w = 0; w < windows; ++w) {
    const auto& a = actuals[static_cast<std::size_t>(w)];
    const auto& f = forecasts[static_cast<std::size_t>(w)];
    if (a.rows() != steps || a.cols() != p || f.rows() != steps || f.cols() != p) {
      throw InvalidArgument("forecast window shapes do not match");
    }
    per_window.row(w) = (a - f).array().square().rowwise().mean().transpose();
  }
  ForecastScore score;
  score.mse = per_window.colwise().mean().transpose();
  score.sd = Eigen::VectorXd::Zero(steps);
  if (windows > 1) {
    for (Eigen::Index s = 0; s < steps; ++s) {
      const double var = (per_window.col(s).array() - score.mse(s)).square().sum() /
                         static_cast<double>(windows - 1);
      score.sd(s) = std::sqrt(var);
    }
  }
  return score;
}

RollingForecasts rolling_forecasts(const MultivariateSeries& data, Eigen::Index train_length,
                                   Eigen::Index windows, int steps, const Forecaster& forecaster,
                                   unsigned threads) {
  if (train_length < 1 || windows < 1 || steps < 1) {
    throw InvalidArgument("train length, windows and steps must be positive");
  }
  if (data.length() < train_length + windows - 1 + steps) {
    throw InvalidArgument("not enough data for the requested rolling windows");
  }
  RollingForecasts out;
  out.actuals.resize(static_cast<std::size_t>(windows));
  out.forecasts.resize(static_cast<std::size_t>(windows));
  detail::parallel_for(static_cast<std::size_t>(windows), threads, [&](std::size_t w) {
    const auto start = static_cast<Eigen::Index>(w);
    const MultivariateSeries train(data.values().middleRows(start, train_length));
    out.actuals[w] = data.values().middleRows(start + train_length, steps);
    out.forecasts[w] = forecaster(train, steps);
  });
  return out;
}

WindLikeData wind_like_series(Eigen::Index length, std::uint64_t seed) {
  if (length < 14) throw InvalidArgument("wind-like series needs at least 14 observations");
  struct Block {
    Eigen::MatrixXd phi;
    Eigen::MatrixXd cov;
  };
  auto mat = [](std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
      Eigen::Index j = 0;
      for (double v : r) m(i, j++) = v;
      ++i;
    }
    return m;
  };
  const std::vector<Block> blocks = {
      {mat({{0.6, 0.25}, {-0.2, 0.5}}), mat({{1.0, 0.3}, {0.3, 1.0}})},
      {mat({{0.3, -0.4}, {0.35, 0.6}}), mat({{0.8, -0.2}, {-0.2, 0.6}})},
      {mat({{0.75}}), mat({{0.5}})},
      {mat({{-0.45}}), mat({{1.2}})},
      {mat({{0.2}}), mat({{0.3}})},
  };

  WindLikeData out;
  const Eigen::Index p = 7;
  Eigen::MatrixXd y(length, p);
  Eigen::Index col = 0;
  for (std::size_t g = 0; g < blocks.size(); ++g) {
    VarModel m;
    m.order = 1;
    m.coefficients = {blocks[g].phi};
    m.intercept = Eigen::VectorXd::Zero(blocks[g].phi.rows());
    m.innovation_cov = blocks[g].cov;
    const auto d = m.dimension();
    y.middleCols(col, d) = simulate_var(m, length, kDefaultBurnIn, derive_seed(seed, {1, g})).values();
    out.group_sizes.push_back(d);
    col += d;
  }
  out.mixing = random_orthogonal(p, derive_seed(seed, {0}));
  Eigen::MatrixXd x = y * out.mixing.transpose();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double level = 6.0 + 0.5 * static_cast<double>(j);
    const double slope = 0.004 * static_cast<double>(j + 1);
    for (Eigen::Index t = 0; t < length; ++t) x(t, j) += level + slope * static_cast<double>(t);
  }
  out.x = MultivariateSeries(std::move(x));
  return out;
}

}  // namespace specseg
