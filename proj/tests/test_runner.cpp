// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "levysir/presets.hpp"
#include "levysir/runner.hpp"

namespace levysir {
namespace {

namespace fs = std::filesystem;

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("levysir_test_" + std::string(info->name()) + "_" +
                                         std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path root_;
};

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

Scenario small_example1() {
  auto sc = *find_preset("example1");
  sc.n_paths = 12;
  sc.sim.t_end = 20.0;
  sc.sim.record_stride = 10;
  sc.outputs &= ~static_cast<unsigned>(Output::Histograms);
  sc.ergodicity_t_end = 0.0;
  return sc;
}

TEST_F(RunnerTest, WritesDocumentedArtifacts) {
  auto sc = small_example1();
  const auto res = run_scenario(sc, {2, root_});
  const auto dir = root_ / "example1";
  EXPECT_EQ(res.directory, dir);
  for (const char* f : {"config.ini", "thresholds.csv", "paths.csv", "moments.csv", "summary.csv",
                        "trajectory_0.csv", "jumps_0.csv", "trajectory_2.csv", "deterministic.csv",
                        "manifest.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir / "trajectory_3.csv"));
  EXPECT_FALSE(fs::exists(dir / "histogram_I.csv"));
  EXPECT_EQ(first_line(dir / "paths.csv"),
            "path_id,time_avg_S,time_avg_I,time_avg_R,time_avg_X,time_avg_X2,lyapunov_I,"
            "lyapunov_truncated,final_S,final_I,final_R,final_X,floor_activations,jump_count");
  EXPECT_EQ(first_line(dir / "trajectory_0.csv"), "t,S,I,R,X");
  EXPECT_EQ(first_line(dir / "jumps_0.csv"), "t,eta");
  EXPECT_EQ(first_line(dir / "moments.csv"), "t,moment_mean,moment_se,bound");
  EXPECT_EQ(first_line(dir / "summary.csv"), "metric,value");

  const auto thresholds = slurp(dir / "thresholds.csv");
  EXPECT_NE(thresholds.find(",1.0492743278199"), std::string::npos) << thresholds;
  EXPECT_NE(thresholds.find(",Persistent\n"), std::string::npos);

  const auto manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("config_sha256 = " + sha256_hex(to_ini(sc))), std::string::npos);
  EXPECT_NE(manifest.find("seed = 1\n"), std::string::npos);
  EXPECT_NE(manifest.find("levysir_version = "), std::string::npos);
  EXPECT_EQ(parse_scenario(slurp(dir / "config.ini")).scenario, sc);
}

TEST_F(RunnerTest, PerPathRowsIndependentOfWorkerCount) {
  const auto sc = small_example1();
  std::string reference;
  for (unsigned workers : {1u, 4u, 8u}) {
    const auto out = root_ / ("w" + std::to_string(workers));
    run_scenario(sc, {workers, out});
    const auto rows = slurp(out / "example1" / "paths.csv");
    if (reference.empty()) reference = rows;
    EXPECT_EQ(rows, reference) << "workers " << workers;
  }
}

TEST_F(RunnerTest, ThresholdArtifactIsByteStable) {
  const auto sc = small_example1();
  run_scenario(sc, {1, root_ / "a"});
  run_scenario(sc, {3, root_ / "b"});
  EXPECT_EQ(slurp(root_ / "a/example1/thresholds.csv"), slurp(root_ / "b/example1/thresholds.csv"));
}

TEST_F(RunnerTest, NoiseFreeSinglePathEqualsDeterministicRun) {
  const auto sc = *find_preset("deterministic");
  run_scenario(sc, {1, root_});
  const auto dir = root_ / "deterministic";
  std::ifstream em(dir / "trajectory_0.csv"), rk(dir / "deterministic.csv");
  std::string a, b;
  std::getline(em, a);
  std::getline(rk, b);
  double worst = 0.0;
  std::size_t rows = 0;
  while (std::getline(em, a) && std::getline(rk, b)) {
    double ta, sa, ia, ra, xa, tb, sb, ib, rb;
    char c;
    std::istringstream(a) >> ta >> c >> sa >> c >> ia >> c >> ra >> c >> xa;
    std::istringstream(b) >> tb >> c >> sb >> c >> ib >> c >> rb;
    ASSERT_DOUBLE_EQ(ta, tb);
    worst = std::max({worst, std::abs(sa - sb), std::abs(ia - ib), std::abs(ra - rb)});
    ++rows;
  }
  EXPECT_EQ(rows, 30001u);
  EXPECT_LE(worst, 10.0 * sc.sim.dt);
}

TEST_F(RunnerTest, HistogramsAndErgodicityFiles) {
  auto sc = *find_preset("example2a");
  sc.n_paths = 100;
  sc.sim.t_end = 30.0;
  sc.sim.record_stride = 100;
  sc.ergodicity_t_end = 300.0;
  const auto res = run_scenario(sc, {2, root_});
  const auto dir = root_ / "example2a";
  for (const char* f : {"histogram_S.csv", "histogram_I.csv", "histogram_R.csv", "ergodicity.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(first_line(dir / "histogram_I.csv"), "bin_left,bin_right,mass");
  EXPECT_TRUE(res.ergodicity.has_value());
  EXPECT_EQ(res.report.classification, Classification::Extinct);
}

TEST_F(RunnerTest, UnwritableOutputIsIoError) {
  std::ofstream(root_ / "blocker") << "x";
  try {
    run_scenario(small_example1(), {1, root_ / "blocker"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
    EXPECT_EQ(exit_code_for(e.code()), ExitCode::Io);
  }
}

TEST(ExitCodes, AreDistinctPerFailureClass) {
  EXPECT_EQ(exit_code_for(ErrorCode::ConfigError), ExitCode::Config);
  EXPECT_EQ(exit_code_for(ErrorCode::NumericalBlowup), ExitCode::Numerical);
  EXPECT_EQ(exit_code_for(ErrorCode::IoError), ExitCode::Io);
  EXPECT_NE(static_cast<int>(ExitCode::Config), static_cast<int>(ExitCode::Numerical));
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

// The CLI binary, driven through the shell.
class CliTest : public RunnerTest {
 protected:
  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + std::string(LEVYSIR_CLI) + "' " + args + " > '" +
                            (root_ / "stdout.txt").string() + "' 2> '" +
                            (root_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() { return slurp(root_ / "stdout.txt"); }
  std::string err() { return slurp(root_ / "stderr.txt"); }
};

TEST_F(CliTest, ValidateEchoesNormalizedPreset) {
  const std::string preset = std::string(LEVYSIR_PRESET_DIR) + "/example1.ini";
  ASSERT_EQ(run("validate '" + preset + "'"), 0) << err();
  EXPECT_EQ(out(), read_text_file(preset));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("validate /nonexistent/file.ini"), 2);

  {
    std::string bad = to_ini(small_example1());
    bad.replace(bad.find("mu2 = 0.09"), 10, "mu2 = 0.01");
    std::ofstream(root_ / "bad.ini") << bad;
  }
  EXPECT_EQ(run("validate '" + (root_ / "bad.ini").string() + "'"), 2);
  EXPECT_NE(err().find("model.mu2: mu2 must equal mu1 + alpha"), std::string::npos) << err();

  auto sc = small_example1();
  sc.sim.ceiling = 0.5;
  std::ofstream(root_ / "blowup.ini") << to_ini(sc);
  EXPECT_EQ(run("run '" + (root_ / "blowup.ini").string() + "' --output-dir '" +
                (root_ / "o").string() + "'"),
            3);
  EXPECT_NE(err().find("path_id"), std::string::npos) << err();

  std::ofstream(root_ / "blocker") << "x";
  std::ofstream(root_ / "ok.ini") << to_ini(small_example1());
  EXPECT_EQ(run("run '" + (root_ / "ok.ini").string() + "' --output-dir '" +
                (root_ / "blocker").string() + "'"),
            4);
}

TEST_F(CliTest, EnvironmentSuppliesOutputDirAndWorkers) {
  std::ofstream(root_ / "ok.ini") << to_ini(small_example1());
  const std::string env = "LEVYSIR_OUTPUT_DIR='" + (root_ / "envout").string() + "' LEVYSIR_WORKERS=3";
  ASSERT_EQ(run("run '" + (root_ / "ok.ini").string() + "' --seed 99", env), 0) << err();
  const auto manifest = slurp(root_ / "envout/example1/manifest.txt");
  EXPECT_NE(manifest.find("workers = 3\n"), std::string::npos);
  EXPECT_NE(manifest.find("seed = 99\n"), std::string::npos);
  EXPECT_EQ(run("run '" + (root_ / "ok.ini").string() + "'", "LEVYSIR_WORKERS=zero"), 2);
}

TEST_F(CliTest, PresetsAndThresholdsVerbs) {
  ASSERT_EQ(run("presets list"), 0);
  for (const auto& p : presets()) EXPECT_NE(out().find(std::string(p.name)), std::string::npos);
  ASSERT_EQ(run("thresholds example2a"), 0);
  EXPECT_NE(out().find(",Extinct\n"), std::string::npos) << out();
  EXPECT_EQ(run("presets show nope"), 2);
}

}  // namespace
}  // namespace levysir
