#ifdef DRIVECLONE_HAVE_CLI

#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "driveclone/io/tensor_file.hpp"
#include "driveclone/models/artifact.hpp"
#include "scratch_dir.hpp"

using namespace driveclone;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

class CliFlow : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new driveclone::testing::ScratchDir("cli");
    const auto p = [](const char* name) { return (dir_->path() / name).string(); };
    ASSERT_EQ(run({"generate", "--segments", "10", "--seed", "7", "--out", p("corpus"),
                   "--embedding-dim", "4"}).code, 0);
    ASSERT_EQ(run({"preprocess", "--input", p("corpus/train.jsonl"), "--out", p("train.dcw"),
                   "--normalizer", p("norm.json"), "--stride", "3"}).code, 0);
    ASSERT_EQ(run({"preprocess", "--input", p("corpus/val.jsonl"), "--out", p("val.dcw"),
                   "--stride", "3"}).code, 0);
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string path(const char* name) { return (dir_->path() / name).string(); }

  static driveclone::testing::ScratchDir* dir_;
};

driveclone::testing::ScratchDir* CliFlow::dir_ = nullptr;

}  // namespace

TEST_F(CliFlow, TrainEvaluatePlotEndToEnd) {
  const auto train = run({"train", "--train", path("train.dcw"), "--val", path("val.dcw"), "--out",
                          path("m.dcm"), "--variant", "lstm_12", "--epochs", "5", "--hidden", "8",
                          "--run-json", path("run.json")});
  ASSERT_EQ(train.code, 0) << train.err;
  EXPECT_NE(train.out.find("trained lstm_12-seed0"), std::string::npos) << train.out;

  const auto eval = run({"evaluate", "--model", path("m.dcm"), "--windows", path("val.dcw"),
                         "--baselines", "--report", path("report.json"), "--csv", path("t.csv")});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_NE(eval.out.find("persistence"), std::string::npos);
  EXPECT_EQ(first_line(io::read_text_file(path("t.csv"))), "model,mae_x,mae_y,best_x,best_y");

  const auto plot = run({"plot", "--model", path("m.dcm"), "--windows", path("val.dcw"), "--svg",
                         path("p.svg"), "--csv", path("p.csv")});
  ASSERT_EQ(plot.code, 0) << plot.err;
  const auto replot = run({"plot", "--from-csv", path("p.csv"), "--svg", path("p2.svg"), "--title",
                           "lstm_12-seed0 on " + std::string("synth-7-0008")});
  ASSERT_EQ(replot.code, 0) << replot.err;
  EXPECT_EQ(io::read_text_file(path("p.svg")), io::read_text_file(path("p2.svg")));
}

TEST_F(CliFlow, SameArgumentsSameBytes) {
  for (const char* out : {"d1.dcm", "d2.dcm"}) {
    ASSERT_EQ(run({"train", "--train", path("train.dcw"), "--val", path("val.dcw"), "--out",
                   path(out), "--variant", "lstm_front", "--epochs", "2", "--hidden", "6",
                   "--quiet"}).code, 0);
  }
  EXPECT_EQ(io::read_text_file(path("d1.dcm")), io::read_text_file(path("d2.dcm")));
}

TEST_F(CliFlow, ConfigFileSectionsAndFlagOverride) {
  const std::string ini = "[train]\nvariant = stacked_lr\nepochs = 3\n";
  io::write_text_file(path("run.ini"), ini);
  const auto r = run({"--config", path("run.ini"), "train", "--train", path("train.dcw"), "--val",
                      path("val.dcw"), "--out", path("cfg.dcm"), "--variant", "baseline_nn",
                      "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto artifact = models::load_artifact(path("cfg.dcm"));
  EXPECT_EQ(artifact.spec.variant, models::Architecture::baseline_nn);
  EXPECT_EQ(artifact.train.epochs, 3u);
  EXPECT_EQ(artifact.config_snapshot, ini);
}

TEST_F(CliFlow, MissingModelFileIsOneLineError) {
  const auto r = run({"evaluate", "--model", path("nope.dcm"), "--windows", path("val.dcw")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: io: ", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliFlow, WrongViewsForVariantIsConfigError) {
  const auto r = run({"train", "--train", path("train.dcw"), "--val", path("train.dcw"), "--out",
                      path("x.dcm"), "--epochs", "1"});
  // Training and validation archives share segments.
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: validation: ", 0), 0u) << r.err;
}

TEST(Cli, EvaluateWithoutModelIsUsageError) {
  const auto r = run({"evaluate", "--windows", "val.dcw"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: usage: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("Usage:"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndFlag) {
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"gradcheck", "--frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("gradcheck"), std::string::npos);
}

TEST(Cli, GradcheckReportsEachVariant) {
  const auto r = run({"gradcheck"});
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char* v : {"lstm_12", "lstm_front", "lstm_all"}) {
    EXPECT_NE(r.out.find(v), std::string::npos);
  }
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("max_rel_error="), std::string::npos);
}

TEST(Cli, BadValueIsConfigError) {
  driveclone::testing::ScratchDir dir("cli-bad");
  const auto r = run({"generate", "--out", dir.path().string(), "--profile", "zigzag"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: config: ", 0), 0u) << r.err;
}

#endif
