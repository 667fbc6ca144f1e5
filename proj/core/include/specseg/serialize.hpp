#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specseg/forecasting.hpp"
#include "specseg/segmentation.hpp"
#include "specseg/simgen.hpp"
#include "specseg/spectral.hpp"

namespace specseg {

/// {"kernel", "q", "alpha", "fdr", "band"}; band is [lo, hi] or null.
nlohmann::json config_to_json(const SegmentConfig& config);

/// Segmentation result with 1-based group indices and matrices as nested
/// row arrays.
nlohmann::json to_json(const SegmentationResult& result, const SegmentConfig& config);

/// {"grid", "bandwidth", "length", "dimension", "re", "im"} where re/im hold
/// one p x p row-major matrix per grid frequency.
nlohmann::json to_json(const SpectralEstimate& estimate);

/// {"steps", "forecast", "groups", "per_group_orders"}.
nlohmann::json to_json(const ForecastResult& result, int steps);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json matrix_to_json(const Eigen::MatrixXi& m);

/// model,T,rep,seed,correct,m_hat,max_m2,avg_m2
void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows);

/// model,T,pct_correct,mean_max_m2,mean_avg_m2,reps (NA when undefined).
void write_summary_csv(std::ostream& os, const std::vector<StudySummary>& summaries);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace specseg
