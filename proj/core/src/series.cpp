#include "specseg/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>

#include "specseg/error.hpp"

namespace specseg {

MultivariateSeries::MultivariateSeries(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InvalidArgument("series must have at least one row and one column");
  }
  if (!values_.allFinite()) {
    throw InvalidArgument("series contains non-finite values");
  }
}

FrequencyGrid::FrequencyGrid(std::vector<double> frequencies) : freqs_(std::move(frequencies)) {
  if (freqs_.empty()) throw InvalidArgument("frequency grid is empty");
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    const double w = freqs_[i];
    if (!(w > 0.0 && w < std::numbers::pi)) {
      throw InvalidArgument("grid frequency outside (0, pi)");
    }
    if (i > 0 && !(w > freqs_[i - 1])) {
      throw InvalidArgument("grid frequencies must be strictly increasing");
    }
  }
}

FrequencyBand::FrequencyBand(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= std::numbers::pi)) {
    throw InvalidArgument("frequency band must satisfy 0 <= lo < hi <= pi");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string location(std::size_t row, std::size_t col) {
  std::ostringstream os;
  os << "row " << row << ", column " << col;
  return os.str();
}

}  // namespace

MultivariateSeries load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<double> cells;
  std::size_t width = 0;
  std::size_t row = 0;
  std::string line;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    ++row;
    std::size_t col = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      ++col;
      double value = 0.0;
      const char* end = field.data() + field.size();
      auto [ptr, ec] = std::from_chars(field.data(), end, value);
      if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError("non-numeric cell '" + std::string(field) + "' at " + location(row, col),
                         row, col);
      }
      cells.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row == 1) {
      width = col;
    } else if (col != width) {
      throw ParseError("ragged row: expected " + std::to_string(width) + " fields, found " +
                           std::to_string(col) + " at " + location(row, col),
                       row, col);
    }
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  if (row == 0) throw IoError("no data rows in " + path.string());

  Eigen::MatrixXd values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < row; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cells[r * width + c];
    }
  }
  return MultivariateSeries(std::move(values));
}

void write_csv(const std::filesystem::path& path, const MultivariateSeries& series,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto& v = series.values();
  if (!header.empty()) {
    if (static_cast<Eigen::Index>(header.size()) != v.cols()) {
      throw InvalidArgument("header width does not match series dimension");
    }
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
  }
  char buf[64];
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      // Shortest representation that round-trips exactly.
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v(r, c));
      (void)ec;
      if (c) out << ',';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failure on " + path.string());
}

Eigen::VectorXd column_means(const MultivariateSeries& series) {
  return series.values().colwise().mean().transpose();
}

MultivariateSeries demean(const MultivariateSeries& series) {
  Eigen::MatrixXd centered = series.values().rowwise() - column_means(series).transpose();
  return MultivariateSeries(std::move(centered));
}

FrequencyGrid fourier_grid(Eigen::Index length) {
  if (length < 4) throw InvalidArgument("Fourier grid requires T >= 4");
  const Eigen::Index count = (length - 1) / 2;
  std::vector<double> freqs(static_cast<std::size_t>(count));
  for (Eigen::Index j = 1; j <= count; ++j) {
    freqs[static_cast<std::size_t>(j - 1)] =
        2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(length);
  }
  return FrequencyGrid(std::move(freqs));
}

}  // namespace specseg
