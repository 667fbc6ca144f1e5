#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "specseg/simgen.hpp"

namespace {

namespace fs = std::filesystem;
using specseg::cli::Command;
using specseg::cli::RunConfig;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("specseg_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
    const auto draw = specseg::build_model(specseg::ModelPreset::Model1, 400, 11);
    input_ = dir_ / "x.csv";
    specseg::write_csv(input_, draw.x);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int run(const RunConfig& c, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = specseg::cli::run(c, out, err);
    stdout_ = out.str();
    if (err_text) *err_text = err.str();
    return code;
  }

  RunConfig segment_config(const fs::path& out) const {
    RunConfig c;
    c.command = Command::Segment;
    c.input = input_;
    c.out = out;
    return c;
  }

  fs::path dir_;
  fs::path input_;
  std::string stdout_;
};

nlohmann::json without_timestamp(nlohmann::json j) {
  j.erase("timestamp");
  return j;
}

TEST_F(CliTest, SegmentWritesSchema) {
  const auto out = dir_ / "seg.json";
  ASSERT_EQ(run(segment_config(out)), 0);
  const auto j = nlohmann::json::parse(slurp(out));
  for (const char* key : {"m_hat", "groups", "demixing", "mixing", "eigenvalues", "pvalues_raw",
                          "pvalues_adjusted", "adjacency", "config", "timestamp"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["config"]["kernel"], "bp");
  EXPECT_EQ(j["config"]["q"], 0.15);
  EXPECT_EQ(j["config"]["alpha"], 0.05);
  EXPECT_EQ(j["config"]["fdr"], "bh");
  EXPECT_TRUE(j["config"]["band"].is_null());
  EXPECT_EQ(j["demixing"].size(), 6u);
  EXPECT_EQ(j["demixing"][0].size(), 6u);
  int members = 0;
  for (const auto& g : j["groups"]) {
    for (const auto& i : g) {
      EXPECT_GE(i.get<int>(), 1);
      EXPECT_LE(i.get<int>(), 6);
      ++members;
    }
  }
  EXPECT_EQ(members, 6);
  EXPECT_EQ(j["m_hat"].get<std::size_t>(), j["groups"].size());
}

TEST_F(CliTest, SegmentBandIsEchoed) {
  auto c = segment_config(dir_ / "band.json");
  c.band = "0.5:1.5";
  ASSERT_EQ(run(c), 0);
  const auto j = nlohmann::json::parse(slurp(c.out));
  EXPECT_EQ(j["config"]["band"], nlohmann::json({0.5, 1.5}));
}

TEST_F(CliTest, SegmentIsReproducibleAcrossThreads) {
  auto a = segment_config(dir_ / "a.json");
  auto b = segment_config(dir_ / "b.json");
  b.threads = 3;
  ASSERT_EQ(run(a), 0);
  ASSERT_EQ(run(b), 0);
  auto ja = without_timestamp(nlohmann::json::parse(slurp(a.out)));
  auto jb = without_timestamp(nlohmann::json::parse(slurp(b.out)));
  ja.erase("threads");
  jb.erase("threads");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST_F(CliTest, SegmentToStdoutWhenNoOut) {
  auto c = segment_config({});
  ASSERT_EQ(run(c), 0);
  EXPECT_NO_THROW(nlohmann::json::parse(stdout_));
}

TEST_F(CliTest, InvalidConfigLeavesNoOutput) {
  auto c = segment_config(dir_ / "never.json");
  c.q = 0.7;
  std::string err;
  EXPECT_EQ(run(c, &err), 1);
  EXPECT_FALSE(fs::exists(c.out));
  EXPECT_EQ(err.rfind("error code=1 kind=invalid_config", 0), 0u) << err;
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);

  c.q.reset();
  c.band = "2:1";
  EXPECT_EQ(run(c), 1);
  c.band = "abc";
  EXPECT_EQ(run(c), 1);
  c.band.reset();
  c.alpha = 0.0;
  EXPECT_EQ(run(c), 1);
  EXPECT_FALSE(fs::exists(c.out));
}

TEST_F(CliTest, MissingInputIsIoFailure) {
  auto c = segment_config(dir_ / "x.json");
  c.input = dir_ / "missing.csv";
  std::string err;
  EXPECT_EQ(run(c, &err), 2);
  EXPECT_NE(err.find("kind=io"), std::string::npos);
  EXPECT_FALSE(fs::exists(c.out));
}

TEST_F(CliTest, DegenerateInputIsNumericalFailure) {
  std::ofstream(dir_ / "const.csv") << [] {
    std::string s;
    for (int t = 0; t < 50; ++t) s += std::to_string(t % 7) + ",3\n";
    return s;
  }();
  auto c = segment_config(dir_ / "c.json");
  c.input = dir_ / "const.csv";
  EXPECT_EQ(run(c), 3);
  EXPECT_FALSE(fs::exists(c.out));
}

TEST_F(CliTest, SimulateIsDeterministic) {
  RunConfig c;
  c.command = Command::Simulate;
  c.model = 2;
  c.lengths = {200, 300};
  c.reps = 5;
  c.seed = 7;
  c.out = dir_ / "sim_a";
  ASSERT_EQ(run(c), 0);
  c.out = dir_ / "sim_b";
  c.threads = 2;
  ASSERT_EQ(run(c), 0);
  for (const char* f : {"study.csv", "summary.csv"}) {
    EXPECT_EQ(slurp(dir_ / "sim_a" / f), slurp(dir_ / "sim_b" / f)) << f;
  }
  const auto study = slurp(dir_ / "sim_a" / "study.csv");
  EXPECT_EQ(study.rfind("model,T,rep,seed,correct,m_hat,max_m2,avg_m2\n", 0), 0u);
  EXPECT_EQ(std::count(study.begin(), study.end(), '\n'), 11);
  const auto summary = slurp(dir_ / "sim_a" / "summary.csv");
  EXPECT_EQ(summary.rfind("model,T,pct_correct,mean_max_m2,mean_avg_m2,reps\n", 0), 0u);
  const auto j = nlohmann::json::parse(slurp(dir_ / "sim_a" / "run.json"));
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["config"]["q"], 0.15);
  EXPECT_TRUE(j.contains("timestamp"));
}

TEST_F(CliTest, SimulateRequiresSeed) {
  RunConfig c;
  c.command = Command::Simulate;
  c.model = 1;
  c.out = dir_ / "noseed";
  EXPECT_EQ(run(c), 1);
  EXPECT_FALSE(fs::exists(c.out));
  c.seed = 1;
  c.lengths = {5};
  EXPECT_EQ(run(c), 1);
  EXPECT_FALSE(fs::exists(c.out));
}

TEST_F(CliTest, ForecastDemoAndInput) {
  RunConfig c;
  c.command = Command::Forecast;
  c.demo = true;
  EXPECT_EQ(run(c), 1);
  c.seed = 3;
  c.out = dir_ / "fc.json";
  ASSERT_EQ(run(c), 0);
  const auto j = nlohmann::json::parse(slurp(c.out));
  EXPECT_EQ(j["steps"], 2);
  EXPECT_EQ(j["forecast"].size(), 2u);
  EXPECT_EQ(j["forecast"][0].size(), 7u);
  EXPECT_EQ(j["config"]["q"], 0.1);
  EXPECT_EQ(j["per_group_orders"].size(), j["groups"].size());

  RunConfig d;
  d.command = Command::Forecast;
  d.input = input_;
  d.steps = 3;
  d.out = dir_ / "fc2.json";
  ASSERT_EQ(run(d), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(d.out))["forecast"].size(), 3u);
  d.demo = true;
  EXPECT_EQ(run(d), 1);
}

std::pair<int, std::string> run_binary(const std::string& args) {
  const std::string cmd = std::string(SPECSEG_CLI_PATH) + " " + args + " 2>&1 >/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string text;
  std::array<char, 256> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) text += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), text};
}

TEST_F(CliTest, BinaryReportsBadFlagsOnOneLine) {
  auto [code, err] = run_binary("segment --input " + input_.string() + " --q abc");
  EXPECT_EQ(code, 1);
  EXPECT_EQ(err.rfind("error code=1", 0), 0u) << err;
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);

  std::tie(code, err) = run_binary("simulate --model 1 --out " + (dir_ / "s").string());
  EXPECT_EQ(code, 1);
  EXPECT_FALSE(fs::exists(dir_ / "s"));

  std::tie(code, err) = run_binary("segment --input " + input_.string() + " --kernel parzen --fdr by");
  EXPECT_EQ(code, 0) << err;
}

}  // namespace
