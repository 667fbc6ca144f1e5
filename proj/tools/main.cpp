#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

using specseg::cli::RunConfig;

void add_segment_options(CLI::App& app, RunConfig& c) {
  app.add_option("--kernel", c.kernel, "Smoothing kernel")
      ->check(CLI::IsMember({"bp", "parzen"}));
  app.add_option("--q", c.q, "Bandwidth exponent, h = T^-q");
  app.add_option("--alpha", c.alpha, "FDR level for the coherence tests");
  app.add_option("--fdr", c.fdr, "Multiple-testing adjustment")->check(CLI::IsMember({"bh", "by"}));
  app.add_option("--band", c.band, "Restrict to the frequency band lo:hi (radians)");
  app.add_option("--threads", c.threads, "Worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  CLI::App app{"Frequency-domain segmentation of multivariate time series"};
  app.require_subcommand(1);

  auto* seg = app.add_subcommand("segment", "Segment a CSV series into incoherent groups");
  seg->add_option("--input", config.input, "CSV file, one row per time point")->required();
  seg->add_flag("--header", config.header, "Skip the first CSV line");
  seg->add_option("--out", config.out, "Output JSON file (stdout when omitted)");
  add_segment_options(*seg, config);

  auto* sim = app.add_subcommand("simulate", "Replication study on a preset model");
  sim->add_option("--model", config.model, "Model preset 1..5")->required();
  sim->add_option("--lengths", config.lengths, "Series lengths, comma separated")->delimiter(',');
  sim->add_option("--reps", config.reps, "Replications per length");
  sim->add_option("--seed", config.seed, "Master seed")->required();
  sim->add_option("--out", config.out, "Output directory")->required();
  add_segment_options(*sim, config);

  auto* fc = app.add_subcommand("forecast", "Segmentation-based VAR forecasts");
  fc->add_option("--input", config.input, "CSV file, one row per time point");
  fc->add_flag("--header", config.header, "Skip the first CSV line");
  fc->add_flag("--demo", config.demo, "Use the built-in synthetic wind-like panel");
  fc->add_option("--steps", config.steps, "Forecast horizon");
  fc->add_option("--max-order", config.max_order, "Largest VAR order considered by AIC");
  fc->add_flag("--detrend", config.detrend, "Remove a linear trend per column");
  fc->add_option("--seed", config.seed, "Seed for --demo data");
  fc->add_option("--out", config.out, "Output JSON file (stdout when omitted)");
  add_segment_options(*fc, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << specseg::cli::error_line(specseg::cli::kInvalidConfig, e.what()) << '\n';
    return specseg::cli::kInvalidConfig;
  }

  if (seg->parsed()) {
    config.command = specseg::cli::Command::Segment;
  } else if (sim->parsed()) {
    config.command = specseg::cli::Command::Simulate;
  } else {
    config.command = specseg::cli::Command::Forecast;
  }
  return specseg::cli::run(config, std::cout, std::cerr);
}
