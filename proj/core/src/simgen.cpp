#include "specseg/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "specseg/error.hpp"
#include "specseg/parallel.hpp"

namespace specseg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

ArmaSpec arma(std::vector<double> ar, std::vector<double> ma, double variance) {
  return ArmaSpec{std::move(ar), std::move(ma), std::sqrt(variance)};
}

// Lead-lag copies of one stream per group: component k of a group of size d
// reads z_{t+k}, scaled by the matching weight.
LatentModelSpec lead_lag_spec(std::vector<ArmaSpec> streams, std::vector<Eigen::Index> sizes,
                              const std::vector<std::vector<double>>& weights) {
  LatentModelSpec spec;
  spec.group_sizes = std::move(sizes);
  spec.streams = std::move(streams);
  for (std::size_t g = 0; g < spec.group_sizes.size(); ++g) {
    for (Eigen::Index k = 0; k < spec.group_sizes[g]; ++k) {
      const double w = weights.empty() ? 1.0 : weights[g][static_cast<std::size_t>(k)];
      spec.components.push_back(ComponentRecipe{g, k, w, 0.0});
    }
  }
  spec.p = static_cast<Eigen::Index>(spec.components.size());
  return spec;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = splitmix64(master);
  for (std::uint64_t v : path) state = splitmix64(state ^ splitmix64(v + 0x632be59bd9b4e019ULL));
  return state;
}

Eigen::VectorXd simulate_arma(const ArmaSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                              std::mt19937_64& rng) {
  spec.validate();
  if (length < 0 || burn_in < 0) throw InvalidArgument("length and burn-in must be nonnegative");
  const Eigen::Index total = length + burn_in;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd e(total);
  for (Eigen::Index t = 0; t < total; ++t) e(t) = spec.innovation_sd * normal(rng);

  Eigen::VectorXd x(total);
  for (Eigen::Index t = 0; t < total; ++t) {
    double v = e(t);
    for (std::size_t i = 0; i < spec.ar.size(); ++i) {
      const Eigen::Index lag = t - 1 - static_cast<Eigen::Index>(i);
      if (lag >= 0) v += spec.ar[i] * x(lag);
    }
    for (std::size_t j = 0; j < spec.ma.size(); ++j) {
      const Eigen::Index lag = t - 1 - static_cast<Eigen::Index>(j);
      if (lag >= 0) v += spec.ma[j] * e(lag);
    }
    x(t) = v;
  }
  return x.tail(length);
}

Eigen::VectorXd simulate_arma(const ArmaSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return simulate_arma(spec, length, burn_in, rng);
}

Eigen::MatrixXd random_orthogonal(Eigen::Index p, std::uint64_t seed) {
  if (p < 1) throw InvalidArgument("dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

ModelPreset model_preset(int number) {
  if (number < 1 || number > 5) {
    throw InvalidArgument("model preset must be 1..5, got " + std::to_string(number));
  }
  return static_cast<ModelPreset>(number);
}

int model_number(ModelPreset preset) { return static_cast<int>(preset); }

std::vector<Eigen::Index> default_lengths(ModelPreset preset) {
  if (preset == ModelPreset::Model4) return {500, 1000, 2000};
  return {200, 500, 1000};
}

LatentModelSpec preset_spec(ModelPreset preset) {
  switch (preset) {
    case ModelPreset::Model1:
      return lead_lag_spec({arma({0.5, 0.3}, {-0.9, 0.3, 1.2, 1.3}, 1.0),
                            arma({0.8, -0.5}, {1.0, 0.8, 1.8}, 3.0),
                            arma({-0.7, -0.5}, {-1.0, -0.8}, 5.0)},
                           {3, 2, 1}, {});
    case ModelPreset::Model2:
      return lead_lag_spec({arma({0.9}, {0.8, -0.2}, 1.0), arma({1.25, -0.75, 0.3}, {}, 1.0),
                            arma({}, {1.0, -1.0, -0.8}, 1.0)},
                           {3, 2, 1}, {});
    case ModelPreset::Model3:
      return lead_lag_spec({arma({0.45}, {}, 3.0), arma({0.8, -0.5}, {1.0, 0.8, 1.8}, 5.0),
                            arma({-0.7, -0.5}, {-1.0, -0.8}, 1.0)},
                           {4, 3, 2}, {{1.0, 0.7, -0.5, 0.2}, {1.0, 1.0, 1.0}, {1.0, -0.9}});
    case ModelPreset::Model4:
      return lead_lag_spec({arma({-0.4, 0.5}, {1.0, 0.8, 1.5, 1.8}, 1.0),
                            arma({0.85, -0.3}, {1.0, 0.5, 1.2}, 1.0),
                            arma({0.9, -0.6}, {0.5}, 1.0)},
                           {4, 3, 2}, {});
    case ModelPreset::Model5:
      return lead_lag_spec({arma({0.75}, {1.0, -0.7, -0.6}, 1.0)}, {7}, {});
  }
  throw InvalidArgument("unknown model preset");
}

ModelDraw build_model(const LatentModelSpec& spec, Eigen::Index length, std::uint64_t seed,
                      Eigen::Index burn_in) {
  spec.validate();
  if (length < 2 * spec.p) {
    throw InvalidArgument("series length must be at least 2p (T=" + std::to_string(length) +
                          ", p=" + std::to_string(spec.p) + ")");
  }
  ModelDraw draw{{}, {}, spec};
  draw.truth.seed = seed;
  if (draw.truth.mixing.size() == 0) draw.truth.mixing = random_orthogonal(spec.p, derive_seed(seed, {0}));

  std::vector<Eigen::Index> span(spec.streams.size(), 0);
  for (const auto& c : spec.components) span[c.stream] = std::max(span[c.stream], c.offset);
  std::vector<Eigen::VectorXd> z;
  for (std::size_t s = 0; s < spec.streams.size(); ++s) {
    z.push_back(simulate_arma(spec.streams[s], length + span[s], burn_in, derive_seed(seed, {1, s})));
  }

  Eigen::MatrixXd y(length, spec.p);
  for (Eigen::Index k = 0; k < spec.p; ++k) {
    const auto& c = spec.components[static_cast<std::size_t>(k)];
    y.col(k) = c.weight * z[c.stream].segment(c.offset, length);
    if (c.noise_sd > 0.0) {
      std::mt19937_64 rng(derive_seed(seed, {2, static_cast<std::uint64_t>(k)}));
      std::normal_distribution<double> normal(0.0, c.noise_sd);
      for (Eigen::Index t = 0; t < length; ++t) y(t, k) += normal(rng);
    }
  }
  draw.x = MultivariateSeries(y * draw.truth.mixing.transpose());
  draw.y = MultivariateSeries(std::move(y));
  return draw;
}

ModelDraw build_model(ModelPreset preset, Eigen::Index length, std::uint64_t seed,
                      Eigen::Index burn_in) {
  return build_model(preset_spec(preset), length, seed, burn_in);
}

StudySummary summarize(const std::vector<StudyRow>& rows) {
  StudySummary s;
  if (rows.empty()) return s;
  s.model = rows.front().model;
  s.length = rows.front().length;
  s.reps = static_cast<int>(rows.size());
  std::vector<double> cmax, cavg, uavg;
  int m_one = 0;
  for (const auto& r : rows) {
    if (r.error.empty()) uavg.push_back(r.avg_m2);
    if (r.m_hat == 1) ++m_one;
    if (r.correct) {
      ++s.n_correct;
      cmax.push_back(r.max_m2);
      cavg.push_back(r.avg_m2);
    }
  }
  s.pct_correct = 100.0 * s.n_correct / s.reps;
  s.mean_max_m2 = mean(cmax);
  s.mean_avg_m2 = mean(cavg);
  s.median_avg_m2 = median(cavg);
  s.uncond_mean_avg_m2 = mean(uavg);
  s.uncond_median_avg_m2 = median(uavg);
  s.m_hat_one_fraction = static_cast<double>(m_one) / s.reps;
  return s;
}

StudyResult run_study(ModelPreset preset, const std::vector<Eigen::Index>& lengths, int reps,
                      const SegmentConfig& config, std::uint64_t seed, unsigned threads) {
  if (reps < 1) throw InvalidArgument("reps must be at least 1");
  if (lengths.empty()) throw InvalidArgument("at least one series length is required");
  const int model = model_number(preset);
  SegmentConfig inner = config;
  inner.threads = 1;

  StudyResult out;
  out.rows.resize(lengths.size() * static_cast<std::size_t>(reps));
  detail::parallel_for(out.rows.size(), threads, [&](std::size_t idx) {
    const Eigen::Index length = lengths[idx / static_cast<std::size_t>(reps)];
    const int rep = static_cast<int>(idx % static_cast<std::size_t>(reps));
    StudyRow& row = out.rows[idx];
    row.model = model;
    row.length = length;
    row.rep = rep;
    row.seed = derive_seed(seed, {static_cast<std::uint64_t>(model),
                                  static_cast<std::uint64_t>(length),
                                  static_cast<std::uint64_t>(rep)});
    try {
      const ModelDraw draw = build_model(preset, length, row.seed);
      const SegmentationResult result = segment(draw.x, inner);
      const SubspaceReport report = evaluate_segmentation(result, draw.truth);
      row.correct = report.correct;
      row.m_hat = report.m_hat;
      row.max_m2 = report.max_m2;
      row.avg_m2 = report.avg_m2;
    } catch (const Error& e) {
      row.correct = false;
      row.error = e.what();
      row.max_m2 = row.avg_m2 = std::numeric_limits<double>::quiet_NaN();
    }
  });

  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto first = out.rows.begin() + static_cast<std::ptrdiff_t>(i) * reps;
    out.summaries.push_back(summarize(std::vector<StudyRow>(first, first + reps)));
  }
  return out;
}

}  // namespace specseg
