#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specseg/error.hpp"
#include "specseg/forecasting.hpp"
#include "specseg/serialize.hpp"
#include "specseg/simgen.hpp"

namespace specseg::cli {

namespace {

constexpr double kDemoExponent = 0.1;
constexpr Eigen::Index kDemoLength = 156;

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("'" + std::string(text) + "' is not a number");
  }
  return v;
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Segment: return "segment";
    case Command::Simulate: return "simulate";
    case Command::Forecast: return "forecast";
  }
  return "unknown";
}

SegmentConfig segment_config(const RunConfig& config, double default_q) {
  const double q = config.q.value_or(default_q);
  if (!(q > 0.0 && q < 0.5)) throw InvalidArgument("--q must lie in (0, 0.5)");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw InvalidArgument("--alpha must lie in (0, 1)");
  }
  if (config.threads < 1) throw InvalidArgument("--threads must be at least 1");
  SegmentConfig sc;
  sc.kernel = KernelSpec(parse_kernel_family(config.kernel), q);
  sc.alpha = config.alpha;
  sc.fdr = parse_fdr_method(config.fdr);
  if (config.band) sc.band = parse_band(*config.band);
  sc.threads = config.threads;
  return sc;
}

nlohmann::json run_header(const RunConfig& config) {
  nlohmann::json j;
  j["command"] = std::string(command_name(config.command));
  j["threads"] = config.threads;
  j["seed"] = config.seed ? nlohmann::json(*config.seed) : nlohmann::json(nullptr);
  j["timestamp"] = utc_timestamp();
  return j;
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty()) {
    out << text;
  } else {
    write_file_atomic(config.out, text);
  }
}

int run_segment(const RunConfig& config, std::ostream& out) {
  if (config.input.empty()) throw InvalidArgument("segment requires --input");
  const SegmentConfig sc = segment_config(config, KernelSpec::kDefaultExponent);
  const MultivariateSeries series = load_csv(config.input, config.header);
  const SegmentationResult result = segment(series, sc);
  nlohmann::json j = to_json(result, sc);
  const nlohmann::json header = run_header(config);
  for (auto& [k, v] : header.items()) j[k] = v;
  j["input"] = config.input.string();
  emit(config, j.dump(2) + "\n", out);
  return kOk;
}

int run_simulate(const RunConfig& config) {
  if (!config.model) throw InvalidArgument("simulate requires --model");
  if (!config.seed) throw InvalidArgument("simulate requires --seed");
  if (config.out.empty()) throw InvalidArgument("simulate requires --out <directory>");
  if (config.reps < 1) throw InvalidArgument("--reps must be at least 1");
  const ModelPreset preset = model_preset(*config.model);
  const SegmentConfig sc = segment_config(config, KernelSpec::kDefaultExponent);
  std::vector<Eigen::Index> lengths(config.lengths.begin(), config.lengths.end());
  if (lengths.empty()) lengths = default_lengths(preset);
  const Eigen::Index p = preset_spec(preset).p;
  for (Eigen::Index t : lengths) {
    if (t < 2 * p) {
      throw InvalidArgument("--lengths entries must be at least 2p = " + std::to_string(2 * p));
    }
  }

  const StudyResult study = run_study(preset, lengths, config.reps, sc, *config.seed, config.threads);

  std::ostringstream rows, summary;
  write_study_csv(rows, study.rows);
  write_summary_csv(summary, study.summaries);
  nlohmann::json j = run_header(config);
  j["model"] = *config.model;
  j["lengths"] = lengths;
  j["reps"] = config.reps;
  j["config"] = config_to_json(sc);
  nlohmann::json sums = nlohmann::json::array();
  for (const auto& s : study.summaries) {
    auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
    sums.push_back({{"T", s.length},
                    {"reps", s.reps},
                    {"n_correct", s.n_correct},
                    {"pct_correct", s.pct_correct},
                    {"mean_max_m2", num(s.mean_max_m2)},
                    {"mean_avg_m2", num(s.mean_avg_m2)},
                    {"median_avg_m2", num(s.median_avg_m2)},
                    {"uncond_mean_avg_m2", num(s.uncond_mean_avg_m2)},
                    {"uncond_median_avg_m2", num(s.uncond_median_avg_m2)},
                    {"m_hat_one_fraction", s.m_hat_one_fraction}});
  }
  j["summaries"] = sums;

  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create output directory " + config.out.string());
  write_file_atomic(config.out / "study.csv", rows.str());
  write_file_atomic(config.out / "summary.csv", summary.str());
  write_file_atomic(config.out / "run.json", j.dump(2) + "\n");
  return kOk;
}

int run_forecast(const RunConfig& config, std::ostream& out) {
  if (config.demo == !config.input.empty()) {
    throw InvalidArgument("forecast requires exactly one of --input or --demo");
  }
  if (config.demo && !config.seed) throw InvalidArgument("forecast --demo requires --seed");
  if (config.steps < 0) throw InvalidArgument("--steps must be nonnegative");
  if (config.max_order < 0) throw InvalidArgument("--max-order must be nonnegative");
  ForecastConfig fc;
  fc.segment = segment_config(config, config.demo ? kDemoExponent : KernelSpec::kDefaultExponent);
  fc.max_order = config.max_order;
  fc.detrend = config.detrend || config.demo;

  const MultivariateSeries series = config.demo ? wind_like_series(kDemoLength, *config.seed).x
                                                : load_csv(config.input, config.header);
  const ForecastResult result = forecast_pipeline(series, config.steps, fc);
  nlohmann::json j = to_json(result, config.steps);
  const nlohmann::json header = run_header(config);
  for (auto& [k, v] : header.items()) j[k] = v;
  j["input"] = config.demo ? std::string("demo") : config.input.string();
  j["config"] = config_to_json(fc.segment);
  j["config"]["max_order"] = fc.max_order;
  j["config"]["detrend"] = fc.detrend;
  j["baselines"] = {
      {"full_var", matrix_to_json(forecast_full_var(series, config.steps, fc))},
      {"univariate_ar", matrix_to_json(forecast_univariate_ar(series, config.steps, fc))}};
  emit(config, j.dump(2) + "\n", out);
  return kOk;
}

}  // namespace

FrequencyBand parse_band(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("--band must look like lo:hi, got '" + std::string(text) + "'");
  }
  return FrequencyBand(parse_double(text.substr(0, colon)), parse_double(text.substr(colon + 1)));
}

std::string error_line(int code, std::string_view reason) {
  std::string_view kind = code == kInvalidConfig ? "invalid_config"
                          : code == kIoFailure   ? "io"
                                                 : "numerical";
  std::string clean;
  for (char c : reason) {
    if (c == '\n' || c == '\r') {
      clean += ' ';
    } else if (c == '"') {
      clean += '\'';
    } else {
      clean += c;
    }
  }
  std::ostringstream os;
  os << "error code=" << code << " kind=" << kind << " reason=\"" << clean << "\"";
  return os.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  int code = kOk;
  std::string reason;
  try {
    switch (config.command) {
      case Command::Segment: return run_segment(config, out);
      case Command::Simulate: return run_simulate(config);
      case Command::Forecast: return run_forecast(config, out);
    }
  } catch (const InvalidArgument& e) {
    code = kInvalidConfig;
    reason = e.what();
  } catch (const IoError& e) {
    code = kIoFailure;
    reason = e.what();
  } catch (const NumericalError& e) {
    code = kNumericalFailure;
    reason = e.what();
  } catch (const std::exception& e) {
    code = kNumericalFailure;
    reason = e.what();
  }
  err << error_line(code, reason) << '\n';
  return code;
}

}  // namespace specseg::cli
