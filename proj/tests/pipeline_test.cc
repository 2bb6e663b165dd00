/*
 * Copyright 2026 The occtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "occtrack/error.h"
#include "occtrack/grid_io.h"
#include "occtrack/pipeline.h"
#include "test_support.h"

namespace occtrack {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> ManifestOutputs(const fs::path& manifest) {
  std::vector<std::string> outputs;
  std::ifstream in(manifest);
  std::string key, value;
  while (in >> key >> std::ws && std::getline(in, value)) {
    if (key == "output") outputs.push_back(value);
  }
  return outputs;
}

TEST(PipelineTest, FrameName) {
  EXPECT_EQ(FrameName(0), "000000");
  EXPECT_EQ(FrameName(1234), "001234");
}

TEST(PipelineTest, ToySequenceArtifacts) {
  testing::TempDir dir("pipeline");
  const fs::path config = testing::WriteToySequence(dir.path());
  const PipelineResult result = RunPipeline(LoadPipelineConfig(config), dir.path() / "seq",
                                            dir.path() / "out");
  // Two lift tables plus four artifacts per frame.
  EXPECT_EQ(result.outputs.size(), 2u + 3u * 4u);
  const auto listed = ManifestOutputs(dir.path() / "out" / "manifest.txt");
  EXPECT_EQ(listed, result.outputs);
  for (const auto& name : listed) EXPECT_TRUE(fs::exists(dir.path() / "out" / name)) << name;

  const std::string manifest = Slurp(dir.path() / "out" / "manifest.txt");
  EXPECT_NE(manifest.find("frame_rate_hz 2"), std::string::npos);
  EXPECT_NE(manifest.find("frames 3"), std::string::npos);
  EXPECT_NE(manifest.find("config_hash "), std::string::npos);

  // Centered grids agree with the hand-built fixture.
  const testing::CompletionFixture fx = testing::MakeCompletionFixture();
  for (int f = 0; f < 3; ++f) {
    EXPECT_EQ(ReadGridFile(dir.path() / "out" / ("centered_" + FrameName(f) + ".otg")), fx.expected[f]);
  }
}

TEST(PipelineTest, Deterministic) {
  testing::TempDir dir("determinism");
  const fs::path config = testing::WriteToySequence(dir.path());
  const PipelineConfig parsed = LoadPipelineConfig(config);
  const auto first = RunPipeline(parsed, dir.path() / "seq", dir.path() / "a");
  RunPipeline(parsed, dir.path() / "seq", dir.path() / "b");
  for (const auto& name : first.outputs) {
    EXPECT_EQ(Slurp(dir.path() / "a" / name), Slurp(dir.path() / "b" / name)) << name;
  }
  EXPECT_EQ(Slurp(dir.path() / "a" / "manifest.txt"), Slurp(dir.path() / "b" / "manifest.txt"));
}

TEST(PipelineTest, EmptySequenceWritesNothing) {
  testing::TempDir dir("empty");
  const fs::path config = testing::WriteToySequence(dir.path());
  fs::create_directories(dir.path() / "blank");
  EXPECT_THROW(RunPipeline(LoadPipelineConfig(config), dir.path() / "blank", dir.path() / "out"), Error);
  EXPECT_FALSE(fs::exists(dir.path() / "out"));
  EXPECT_FALSE(ValidateInputs(dir.path() / "blank").empty());
}

TEST(PipelineTest, ValidateCompleteSequence) {
  testing::TempDir dir("validate");
  testing::WriteToySequence(dir.path());
  EXPECT_TRUE(ValidateInputs(dir.path() / "seq").empty());
}

TEST(PipelineTest, ShortPoseLineNamed) {
  testing::TempDir dir("poses");
  testing::WriteToySequence(dir.path());
  {
    std::ofstream poses(dir.path() / "seq" / "poses.txt", std::ios::app);
    poses << "1 0 0 0 0 1 0 0 0 0 1\n";
  }
  const auto issues = ValidateInputs(dir.path() / "seq");
  ASSERT_FALSE(issues.empty());
  bool named = false;
  for (const auto& issue : issues) named |= issue.find("line 4") != std::string::npos;
  EXPECT_TRUE(named) << issues.front();
}

TEST(PipelineTest, MissingCalibrationKeyNamed) {
  testing::TempDir dir("calib");
  testing::WriteToySequence(dir.path());
  const fs::path calib = dir.path() / "seq" / "calib" / "left.txt";
  std::string text = Slurp(calib);
  std::istringstream lines(text);
  std::string kept, line;
  while (std::getline(lines, line)) {
    if (line.rfind("xi", 0) != 0) kept += line + "\n";
  }
  std::ofstream(calib) << kept;
  const auto issues = ValidateInputs(dir.path() / "seq");
  ASSERT_FALSE(issues.empty());
  EXPECT_NE(issues.front().find("xi"), std::string::npos) << issues.front();
}

TEST(PipelineTest, MissingGridNamesFrame) {
  testing::TempDir dir("grids");
  testing::WriteToySequence(dir.path());
  fs::remove(dir.path() / "seq" / "grids" / "000001.otg");
  const auto issues = ValidateInputs(dir.path() / "seq");
  ASSERT_FALSE(issues.empty());
  bool named = false;
  for (const auto& issue : issues) named |= issue.find("frame 1") != std::string::npos;
  EXPECT_TRUE(named);
  EXPECT_THROW(LoadSequence(dir.path() / "seq", ClassPartition::Default()), Error);
}

TEST(PipelineTest, ConfigErrors) {
  testing::TempDir dir("config");
  const fs::path path = dir.path() / "config.txt";
  std::ofstream(path) << "extent_min -1 -1 -1\nextent_max 1 1 1\nvoxel_size 1 1 1\nstride 0\n";
  EXPECT_THROW(LoadPipelineConfig(path), FormatError);
  std::ofstream(path) << "extent_min -1 -1 -1\nextent_max 1 1 1\n";
  EXPECT_THROW(LoadPipelineConfig(path), FormatError);
  std::ofstream(path) << "extent_min -1 -1 -1\nextent_max 1 1 1\nvoxel_size 1 1 1\n"
                         "occlusion_origins ego\nhistory_depth 3\n";
  const PipelineConfig config = LoadPipelineConfig(path);
  EXPECT_EQ(config.occlusion_origins, OcclusionOrigins::kEgo);
  EXPECT_EQ(config.history_depth, 3);
}

TEST(PipelineTest, EvaluateAgainstItself) {
  testing::TempDir dir("eval");
  const fs::path config = testing::WriteToySequence(dir.path());
  RunPipeline(LoadPipelineConfig(config), dir.path() / "seq", dir.path() / "out");
  const MetricReport report =
      EvaluateDirectories(dir.path() / "out", dir.path() / "out", ClassPartition::Default());
  EXPECT_DOUBLE_EQ(report.sq.overall, 1.0);
  EXPECT_DOUBLE_EQ(report.aq.overall, 1.0);
  EXPECT_DOUBLE_EQ(report.stq, 1.0);
}

// CLI smoke tests through the built binary.

int RunCli(const std::string& args, const fs::path& log) {
  const std::string command = std::string(OCCTRACK_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, RunValidateAndEval) {
  testing::TempDir dir("cli");
  const fs::path config = testing::WriteToySequence(dir.path());
  const fs::path log = dir.path() / "log.txt";
  const std::string seq = (dir.path() / "seq").string();
  const std::string out = (dir.path() / "out").string();
  EXPECT_EQ(RunCli("validate --seq " + seq, log), 0) << Slurp(log);
  EXPECT_EQ(RunCli("run --config " + config.string() + " --seq " + seq + " --out " + out, log), 0)
      << Slurp(log);
  EXPECT_EQ(RunCli("eval --pred " + out + " --gt " + out + " --report " + out + "/report.json", log), 0)
      << Slurp(log);
  EXPECT_NE(Slurp(dir.path() / "out" / "report.json").find("\"occ_stq\": 1.0000"), std::string::npos);
  EXPECT_EQ(RunCli("focus --grid " + out + "/centered_000000.otg --out " + out + "/focus", log), 0)
      << Slurp(log);
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "focus" / "offset_z-.otf"));
  EXPECT_EQ(RunCli("fov-mask --calib " + seq + "/calib --grid " + config.string() + " --out " + out +
                       "/fov.otm",
                   log),
            0)
      << Slurp(log);
  EXPECT_EQ(ReadMaskFile(dir.path() / "out" / "fov.otm"),
            ReadMaskFile(dir.path() / "out" / "fov_000000.otm"));
}

TEST(CliTest, ErrorsExitNonZero) {
  testing::TempDir dir("cli_errors");
  const fs::path log = dir.path() / "log.txt";
  fs::create_directories(dir.path() / "blank");
  EXPECT_EQ(RunCli("validate --seq " + (dir.path() / "blank").string(), log), 1);
  EXPECT_NE(RunCli("bogus", log), 0);
  std::ofstream(dir.path() / "bad.otg") << "nope";
  EXPECT_EQ(RunCli("focus --grid " + (dir.path() / "bad.otg").string() + " --out " +
                       (dir.path() / "f").string(),
                   log),
            1);
  EXPECT_NE(Slurp(log).find("error:"), std::string::npos);
}

}  // namespace
}  // namespace occtrack
