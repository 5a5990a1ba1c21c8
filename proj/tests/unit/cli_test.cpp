#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli/commands.hpp"

namespace sivo::cli {
namespace {

namespace fs = std::filesystem;

// 100 frames around the standard loop with a thinner world, so a run is quick.
constexpr const char* kShortLoop = R"(name = "short"
seed = 7
strategies = ["all", "sivo-batch"]
[world]
landmarks = 1500
[trajectory]
frames = 100
)";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sivo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    scenario_ = dir_ / "short.toml";
    write(scenario_, kShortLoop);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
  }
  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "sivo");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    out_.str("");
    err_.str("");
    return run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  fs::path scenario_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST(RunLabel, NamingConvention) {
  EXPECT_EQ(run_label(Strategy::KaessBatch, 6, 4.0), "BS6E4");
  EXPECT_EQ(run_label(Strategy::KaessBatch, 12, 4.0), "BS12E4");
  EXPECT_EQ(run_label(Strategy::KaessBatch, 6, 2.5), "BS6E2.5");
  EXPECT_EQ(run_label(Strategy::DavisonGreedy, 6, 4.0), "BS6E4-greedy");
  EXPECT_EQ(run_label(Strategy::MiOnly, 6, 2.0), "MI-E2");
  EXPECT_EQ(run_label(Strategy::AllFeatures, 6, 2.0), "ALL");
}

TEST_F(CliTest, MissingScenarioIsConfigError) {
  EXPECT_EQ(invoke({"simulate", "--scenario", (dir_ / "absent.toml").string(), "--out",
                    (dir_ / "o").string()}),
            kConfigError);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_FALSE(fs::exists(dir_ / "o" / "manifest.json"));
}

TEST_F(CliTest, BadFlagsAreConfigErrors) {
  EXPECT_EQ(invoke({"simulate", "--strategy", "best"}), kConfigError);
  EXPECT_EQ(invoke({"simulate", "--mc-samples", "0", "--scenario", scenario_.string()}),
            kConfigError);
  EXPECT_EQ(invoke({"frobnicate"}), kConfigError);
  EXPECT_EQ(invoke({"--help"}), kOk);
}

TEST_F(CliTest, SimulateWritesLabelledOutputs) {
  const fs::path out = dir_ / "run";
  ASSERT_EQ(invoke({"simulate", "--scenario", scenario_.string(), "--strategy", "sivo",
                    "--threshold-bits", "4", "--mc-samples", "6", "--seed", "7", "--out",
                    out.string()}),
            kOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(out / "BS6E4" / "trajectory.txt"));
  EXPECT_TRUE(fs::exists(out / "BS6E4" / "selection_report.csv"));
  EXPECT_TRUE(fs::exists(out / "ground_truth.txt"));
  EXPECT_FALSE(fs::exists(out / "ALL"));
  const std::string manifest = read(out / "manifest.json");
  EXPECT_NE(manifest.find("\"status\": \"complete\""), std::string::npos);
  EXPECT_NE(manifest.find("\"label\": \"BS6E4\""), std::string::npos);
  EXPECT_NE(manifest.find("\"command_line\""), std::string::npos);
  EXPECT_NE(out_.str().find("BS6E4"), std::string::npos);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const auto once = [&](const std::string& name) {
    const fs::path out = dir_ / name;
    EXPECT_EQ(invoke({"simulate", "--scenario", scenario_.string(), "--seed", "3", "--out",
                      out.string()}),
              kOk);
    return out;
  };
  const fs::path a = once("a"), b = once("b");
  for (const char* f : {"ground_truth.txt", "ALL/trajectory.txt", "ALL/selection_report.csv",
                        "BS6E2/trajectory.txt", "BS6E2/selection_report.csv"}) {
    const std::string ta = read(a / f);
    EXPECT_FALSE(ta.empty()) << f;
    EXPECT_EQ(ta, read(b / f)) << f;
  }
}

TEST_F(CliTest, EvaluateAgainstItselfIsZero) {
  const fs::path out = dir_ / "run";
  ASSERT_EQ(invoke({"simulate", "--scenario", scenario_.string(), "--strategy", "all", "--out",
                    out.string()}),
            kOk);
  const std::string gt = (out / "ground_truth.txt").string();
  ASSERT_EQ(invoke({"evaluate", "--gt", gt, "--est", gt, "--out", (dir_ / "e.json").string()}),
            kOk)
      << err_.str();
  EXPECT_NE(out_.str().find("\"translation_error_percent\": 0.0"), std::string::npos) << out_.str();
  EXPECT_NE(out_.str().find("\"rotation_error_deg_per_m\": 0.0"), std::string::npos);
  EXPECT_EQ(read(dir_ / "e.json"), out_.str());
}

TEST_F(CliTest, EvaluateRejectsDisjointFrames) {
  write(dir_ / "gt.txt", "1 0 0 0 0 1 0 0 0 0 1 0\n1 0 0 1 0 1 0 0 0 0 1 0\n");
  // A single shared frame is not enough for any relative motion.
  write(dir_ / "est.txt", "1 0 0 0 0 1 0 0 0 0 1 0\n");
  EXPECT_EQ(invoke({"evaluate", "--gt", (dir_ / "gt.txt").string(), "--est",
                    (dir_ / "est.txt").string()}),
            kConfigError);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_EQ(invoke({"evaluate", "--gt", (dir_ / "missing.txt").string(), "--est",
                    (dir_ / "gt.txt").string()}),
            kConfigError);
}

std::string report_with(std::size_t selected) {
  std::string s = "frame,candidate,mi_bits,entropy_bits,delta_h_bits,verdict,reason\n";
  for (std::size_t i = 0; i < selected; ++i) {
    s += std::to_string(i % 1000) + "," + std::to_string(i) + ",3,0,3,selected,none\n";
  }
  s += "0,999999999,0.5,0,0.5,rejected,below_threshold\n";
  return s;
}

TEST_F(CliTest, EvaluateReportsMapReduction) {
  write(dir_ / "gt.txt", "1 0 0 0 0 1 0 0 0 0 1 0\n1 0 0 0 0 1 0 0 0 0 1 1\n");
  write(dir_ / "base.csv", report_with(64442));
  write(dir_ / "test.csv", report_with(18893));
  const std::string gt = (dir_ / "gt.txt").string();
  ASSERT_EQ(invoke({"evaluate", "--gt", gt, "--est", gt, "--baseline-report",
                    (dir_ / "base.csv").string(), "--test-report", (dir_ / "test.csv").string()}),
            kOk)
      << err_.str();
  const std::string json = out_.str();
  EXPECT_NE(json.find("\"map_points_baseline\": 64442"), std::string::npos);
  EXPECT_NE(json.find("\"map_points_test\": 18893"), std::string::npos);
  const std::size_t at = json.find("\"map_reduction_percent\": ");
  ASSERT_NE(at, std::string::npos);
  const double pct = std::stod(json.substr(at + 25));
  EXPECT_NEAR(pct, 70.68, 0.01);

  EXPECT_EQ(invoke({"evaluate", "--gt", gt, "--est", gt, "--baseline-report",
                    (dir_ / "base.csv").string()}),
            kConfigError);
}

std::vector<std::map<std::string, std::string>> read_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const auto split = [](const std::string& l) {
    std::vector<std::string> f;
    std::stringstream ss(l);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (!l.empty() && l.back() == ',') f.emplace_back();
    return f;
  };
  const std::vector<std::string> header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < f.size(); ++i) row[header[i]] = f[i];
    rows.push_back(row);
  }
  return rows;
}

TEST_F(CliTest, SweepGrid) {
  const fs::path out = dir_ / "sweep";
  ASSERT_EQ(invoke({"sweep", "--scenario", scenario_.string(), "--thresholds", "2,3,4",
                    "--samples", "2,6,12", "--out", out.string()}),
            kOk)
      << err_.str();
  const auto rows = read_csv(read(out / "summary.csv"));
  ASSERT_EQ(rows.size(), 9u);

  std::map<std::string, std::size_t> points;
  for (const auto& r : rows) {
    EXPECT_EQ(r.at("status"), "ok");
    EXPECT_EQ(r.at("scenario"), "short");
    points[r.at("config")] = std::stoul(r.at("map_points"));
  }
  for (const char* label : {"BS2E4", "BS6E2", "BS6E3", "BS6E4", "BS12E4"}) {
    EXPECT_TRUE(points.count(label)) << label;
    EXPECT_TRUE(fs::exists(out / label / "trajectory.txt")) << label;
  }
  for (int n : {2, 6, 12}) {
    const std::string p = "BS" + std::to_string(n) + "E";
    EXPECT_GE(points[p + "2"], points[p + "3"]) << n;
    EXPECT_GE(points[p + "3"], points[p + "4"]) << n;
  }
  EXPECT_EQ(invoke({"sweep", "--thresholds", "2", "--samples", "0", "--out", out.string()}),
            kConfigError);
}

}  // namespace
}  // namespace sivo::cli
