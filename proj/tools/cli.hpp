#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "specseg/segmentation.hpp"

namespace specseg::cli {

enum class Command { Segment, Simulate, Forecast };

enum ExitCode : int { kOk = 0, kInvalidConfig = 1, kIoFailure = 2, kNumericalFailure = 3 };

struct RunConfig {
  Command command = Command::Segment;
  std::filesystem::path input;
  bool header = false;
  std::filesystem::path out;
  std::string kernel = "bp";
  std::optional<double> q;
  double alpha = 0.05;
  std::string fdr = "bh";
  std::optional<std::string> band;
  std::optional<int> model;
  std::vector<long> lengths;
  int reps = 200;
  int steps = 2;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  int max_order = 10;
  bool detrend = false;
  bool demo = false;
};

/// Parses "lo:hi" in radians.
FrequencyBand parse_band(std::string_view text);

/// Executes one command. Failures are reported as a single line
///   error code=<n> kind=<invalid_config|io|numerical> reason="..."
/// on `err`, and no output file is left behind.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Formats the one-line failure report.
std::string error_line(int code, std::string_view reason);

}  // namespace specseg::cli
