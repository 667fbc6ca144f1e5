#include "specseg/serialize.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <cmath>
#include <fstream>
#include <system_error>

#include "specseg/error.hpp"

namespace specseg {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json groups_to_json(const std::vector<Group>& groups) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json members = nlohmann::json::array();
    for (Eigen::Index i : g) members.push_back(i + 1);
    out.push_back(std::move(members));
  }
  return out;
}

}  // namespace

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXi& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json config_to_json(const SegmentConfig& config) {
  nlohmann::json band = nullptr;
  if (config.band) band = {config.band->lo(), config.band->hi()};
  return {{"kernel", std::string(to_string(config.kernel.family()))},
          {"q", config.kernel.exponent()},
          {"alpha", config.alpha},
          {"fdr", std::string(to_string(config.fdr))},
          {"band", band}};
}

nlohmann::json to_json(const SegmentationResult& result, const SegmentConfig& config) {
  nlohmann::json eigenvalues = nlohmann::json::array();
  for (Eigen::Index i = 0; i < result.eigen.eigenvalues.size(); ++i) {
    eigenvalues.push_back(result.eigen.eigenvalues(i));
  }
  return {{"m_hat", result.m_hat},
          {"groups", groups_to_json(result.groups)},
          {"demixing", matrix_to_json(result.demixing)},
          {"mixing", matrix_to_json(result.mixing)},
          {"eigenvalues", eigenvalues},
          {"pvalues_raw", matrix_to_json(result.report.pvalue_raw)},
          {"pvalues_adjusted", matrix_to_json(result.report.pvalue_adjusted)},
          {"adjacency", matrix_to_json(result.adjacency)},
          {"warnings", result.warnings},
          {"config", config_to_json(config)}};
}

nlohmann::json to_json(const SpectralEstimate& estimate) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (const auto& f : estimate.matrices) {
    re.push_back(matrix_to_json(Eigen::MatrixXd(f.real())));
    im.push_back(matrix_to_json(Eigen::MatrixXd(f.imag())));
  }
  return {{"grid", estimate.grid.frequencies()},
          {"bandwidth", estimate.bandwidth_used},
          {"length", estimate.series_length},
          {"dimension", estimate.dimension()},
          {"re", re},
          {"im", im}};
}

nlohmann::json to_json(const ForecastResult& result, int steps) {
  return {{"steps", steps},
          {"forecast", matrix_to_json(result.forecast)},
          {"groups", groups_to_json(result.groups)},
          {"per_group_orders", result.per_group_orders}};
}

void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
  os << "model,T,rep,seed,correct,m_hat,max_m2,avg_m2\n";
  for (const auto& r : rows) {
    os << r.model << ',' << r.length << ',' << r.rep << ',' << r.seed << ','
       << (r.correct ? 1 : 0) << ',' << r.m_hat << ',' << format_number(r.max_m2) << ','
       << format_number(r.avg_m2) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<StudySummary>& summaries) {
  os << "model,T,pct_correct,mean_max_m2,mean_avg_m2,reps\n";
  for (const auto& s : summaries) {
    os << s.model << ',' << s.length << ',' << format_number(s.pct_correct) << ','
       << format_number(s.mean_max_m2) << ',' << format_number(s.mean_avg_m2) << ',' << s.reps
       << '\n';
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

}  // namespace specseg
