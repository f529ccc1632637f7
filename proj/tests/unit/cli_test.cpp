#include <cli.hpp>
#include <pipeline.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace resacc {
namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("resacc_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "resacc");
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  static std::string read(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"encode", "--bogus"}), cli::kExitUsage);
  EXPECT_EQ(run({"accumulate", "--input", p("x.crv")}), cli::kExitUsage);
  EXPECT_NE(err_.str().find("--out-dir"), std::string::npos);
  EXPECT_EQ(run({"synth", "--corpus", "nope", "--out-dir", p("c")}), cli::kExitUsage);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
}

TEST_F(CliTest, InputErrorsNameThePath) {
  EXPECT_EQ(run({"accumulate", "--input", p("missing.crv"), "--out-dir", p("o")}), cli::kExitInput);
  EXPECT_NE(err_.str().find("missing.crv"), std::string::npos);
  write("junk.crv", "XRV1 not a stream at all");
  EXPECT_EQ(run({"residuals", "--input", p("junk.crv"), "--out-dir", p("r")}), cli::kExitInput);
  EXPECT_NE(err_.str().find("offset 0"), std::string::npos);
  EXPECT_EQ(run({"evaluate", "--manifest", p("none.csv"), "--out-dir", p("e")}), cli::kExitInput);
  EXPECT_EQ(run({"accumulate", "--input", p("missing.crv"), "--out-dir", p("o"), "--window-size", "0"}),
            cli::kExitInput);
  EXPECT_NE(err_.str().find("window_size"), std::string::npos);
}

TEST_F(CliTest, NullClipChainGivesOneGroup) {
  write("null.clip", "width = 64\nheight = 48\nsprite_width = 16\nsprite_height = 16\nevent = 12 0 0\n");
  ASSERT_EQ(run({"synth", "--spec", p("null.clip"), "--out-dir", p("frames")}), 0) << err_.str();
  ASSERT_EQ(run({"encode", "--input", p("frames"), "--output", p("null.crv")}), 0) << err_.str();
  ASSERT_EQ(run({"residuals", "--input", p("null.crv"), "--out-dir", p("res")}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "res" / "residuals.csv"));
  ASSERT_EQ(run({"accumulate", "--input", p("null.crv"), "--out-dir", p("acc"), "--trace",
                 "--window-size", "4"}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("groups=1 "), std::string::npos) << out_.str();
  const auto groups = read(dir_ / "acc" / "groups.csv");
  EXPECT_EQ(groups, "group_id,first_index,last_index,member_count\n0,1,11,11\n");
  std::ifstream trace(dir_ / "acc" / "trace.csv");
  auto stats = pipeline::reduction_from_trace(trace);
  EXPECT_EQ(stats.input_frames, 12u);
  EXPECT_EQ(stats.emitted_groups, 1u);
  for (const auto& e : fs::directory_iterator(dir_ / "acc"))
    EXPECT_NE(e.path().extension(), ".tmp");
}

TEST_F(CliTest, TrainAndPredictWithEightPartitions) {
  write("h.clip",
        "width = 96\nheight = 64\nsprite_width = 16\nsprite_height = 16\nstart_x = 8\n"
        "start_y = 24\nevent = 30 2 0\n");
  write("v.clip",
        "width = 96\nheight = 64\nsprite_width = 16\nsprite_height = 16\nstart_x = 40\n"
        "start_y = 0\nevent = 30 0 1.5\n");
  for (const std::string c : {"h", "v"})
    ASSERT_EQ(run({"featurize", "--input", p(c + ".clip"), "--output", p(c + ".csv"),
                   "--search-range", "0", "--window-size", "3"}),
              0)
        << err_.str();
  write("labels.csv", "features,label\nh.csv,horizontal\nv.csv,vertical\n");
  ASSERT_EQ(run({"train", "--labels", p("labels.csv"), "--output", p("model.txt"), "--k", "1"}), 0)
      << err_.str();
  ASSERT_EQ(run({"predict", "--features", p("h.csv"), "--model", p("model.txt"), "--output",
                 p("decisions.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(out_.str(), "horizontal\n");
  std::istringstream lines(read(dir_ / "decisions.csv"));
  std::string line;
  int partitions = 0, votes = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "partition,label,score");
  while (std::getline(lines, line)) {
    if (line.rfind("vote,", 0) == 0) ++votes;
    else ++partitions;
  }
  EXPECT_EQ(partitions, 8);
  EXPECT_EQ(votes, 1);
}

TEST_F(CliTest, ManifestSettingsYieldToFlags) {
  pipeline::PipelineConfig cfg;
  pipeline::apply_settings({{"window_size", "25"}, {"qscale", "4"}}, cfg, {"window_size"});
  EXPECT_EQ(cfg.accumulator.window_size, 10);
  EXPECT_EQ(cfg.encoder.qscale, 4);
}

}  // namespace
}  // namespace resacc
