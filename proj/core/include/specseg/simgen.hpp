#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "specseg/metrics.hpp"
#include "specseg/model.hpp"
#include "specseg/segmentation.hpp"
#include "specseg/series.hpp"

namespace specseg {

inline constexpr Eigen::Index kDefaultBurnIn = 500;

/// Deterministic child seed from a master seed and a sequence of indices
/// (splitmix64 mixing). Independent of call order and thread count.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Gaussian ARMA recursion started from zeros; the first `burn_in` values are
/// dropped. Throws InvalidArgument for a non-stationary AR polynomial.
Eigen::VectorXd simulate_arma(const ArmaSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                              std::uint64_t seed);
Eigen::VectorXd simulate_arma(const ArmaSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                              std::mt19937_64& rng);

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the signs of diag(R) absorbed into Q.
Eigen::MatrixXd random_orthogonal(Eigen::Index p, std::uint64_t seed);

enum class ModelPreset { Model1 = 1, Model2, Model3, Model4, Model5 };

ModelPreset model_preset(int number);
int model_number(ModelPreset preset);

/// Series lengths used in the published tables (Model 4: 500, 1000, 2000).
std::vector<Eigen::Index> default_lengths(ModelPreset preset);

/// Latent structure of a preset. The mixing matrix is left empty.
LatentModelSpec preset_spec(ModelPreset preset);

struct ModelDraw {
  MultivariateSeries x;
  MultivariateSeries y;
  LatentModelSpec truth;
};

/// Simulates Y from the recipe and returns X_t = A Y_t. A fresh Haar mixing
/// matrix is drawn when spec.mixing is empty. Requires T >= 2p.
ModelDraw build_model(const LatentModelSpec& spec, Eigen::Index length, std::uint64_t seed,
                      Eigen::Index burn_in = kDefaultBurnIn);
ModelDraw build_model(ModelPreset preset, Eigen::Index length, std::uint64_t seed,
                      Eigen::Index burn_in = kDefaultBurnIn);

struct StudyRow {
  int model = 0;
  Eigen::Index length = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  bool correct = false;
  Eigen::Index m_hat = 0;
  double max_m2 = 0.0;
  double avg_m2 = 0.0;
  std::string error;  ///< non-empty when segmentation threw
};

/// Per-length summary. The *_m2 means and medians are conditional on a correct
/// segmentation (NaN when no replication was correct); the unconditional
/// versions cover every replication that produced a result.
struct StudySummary {
  int model = 0;
  Eigen::Index length = 0;
  int reps = 0;
  int n_correct = 0;
  double pct_correct = 0.0;
  double mean_max_m2 = 0.0;
  double mean_avg_m2 = 0.0;
  double median_avg_m2 = 0.0;
  double uncond_mean_avg_m2 = 0.0;
  double uncond_median_avg_m2 = 0.0;
  double m_hat_one_fraction = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<StudySummary> summaries;
};

/// Replication study. Replication r at length T uses
/// derive_seed(seed, {model, T, r}); rows are ordered by (T, rep) and do not
/// depend on `threads`.
StudyResult run_study(ModelPreset preset, const std::vector<Eigen::Index>& lengths, int reps,
                      const SegmentConfig& config, std::uint64_t seed, unsigned threads = 1);

StudySummary summarize(const std::vector<StudyRow>& rows);

}  // namespace specseg
