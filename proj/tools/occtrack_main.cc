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

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "occtrack/error.h"
#include "occtrack/focus_feature.h"
#include "occtrack/fov_mask.h"
#include "occtrack/grid_io.h"
#include "occtrack/label_builder.h"
#include "occtrack/occlusion_mask.h"
#include "occtrack/panoptic_metrics.h"
#include "occtrack/pipeline.h"
#include "occtrack/spherical_lift.h"
#include "occtrack/text_config.h"

namespace fs = std::filesystem;

namespace {

occtrack::ClassPartition LoadClasses(const std::string& path) {
  if (path.empty()) return occtrack::ClassPartition::Default();
  try {
    return occtrack::ClassPartitionFromKeyValues(occtrack::KeyValueFile::Load(path));
  } catch (const occtrack::FormatError& e) {
    throw occtrack::FormatError(path + ": " + e.what());
  }
}

// A single calibration file, or every *.txt in a directory.
std::vector<occtrack::FisheyeCamera> LoadCalibrationArg(const fs::path& path) {
  if (fs::is_directory(path)) {
    const auto files = occtrack::CalibrationFiles(path);
    if (files.empty()) throw occtrack::FormatError("no calibration files in " + path.string());
    return occtrack::LoadCameras(files);
  }
  return occtrack::LoadCameras({path});
}

void PrintWarnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisheye occupancy tracking labels, masks, features and metrics"};
  app.require_subcommand(1);

  std::string calib, grid, out, origins, seq, classes, bins, pred, gt, report, config;
  int history = 4;
  int stride = 16;
  double epsilon = 1e-6;

  auto* fov = app.add_subcommand("fov-mask", "FoV mask of a camera rig over a grid");
  fov->add_option("--calib", calib, "Calibration file or directory")->required();
  fov->add_option("--grid", grid, "Grid config (extent_min, extent_max, voxel_size)")
      ->required()
      ->check(CLI::ExistingFile);
  fov->add_option("--out", out, "Output mask (.otm)")->required();

  auto* occ = app.add_subcommand("occ-mask", "Occlusion mask from sensor origins");
  occ->add_option("--grid", grid, "Occupancy grid (.otg)")->required()->check(CLI::ExistingFile);
  occ->add_option("--origins", origins, "Poses whose translations are the ray origins")
      ->required()
      ->check(CLI::ExistingFile);
  occ->add_option("--out", out, "Output mask (.otm)")->required();

  auto* complete = app.add_subcommand("complete", "Ego-centered panoptic grids");
  complete->add_option("--seq", seq, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  complete->add_option("--history", history, "History frames per completion")
      ->check(CLI::NonNegativeNumber);
  complete->add_option("--classes", classes, "Class partition (stuff, thing)");
  complete->add_option("--out", out, "Output directory")->required();

  auto* focus = app.add_subcommand("focus", "Focus feature and directional offsets");
  focus->add_option("--grid", grid, "Panoptic grid (.otg)")->required()->check(CLI::ExistingFile);
  focus->add_option("--epsilon", epsilon, "Normalization epsilon")->check(CLI::PositiveNumber);
  focus->add_option("--out", out, "Output directory")->required();

  auto* lift = app.add_subcommand("lift", "Per-pixel depth-bin frustum table");
  lift->add_option("--calib", calib, "Calibration file")->required()->check(CLI::ExistingFile);
  lift->add_option("--bins", bins, "Depth bins, one per line")->required()->check(CLI::ExistingFile);
  lift->add_option("--stride", stride, "Pixel stride")->check(CLI::PositiveNumber);
  lift->add_option("--out", out, "Output table (.otl)")->required();

  auto* eval = app.add_subcommand("eval", "OccSQ, OccAQ and OccSTQ");
  eval->add_option("--pred", pred, "Predicted grids")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", gt, "Ground-truth grids and masks")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--classes", classes, "Class partition (stuff, thing)");
  eval->add_option("--report", report, "Output report")->required();

  auto* run = app.add_subcommand("run", "Full pipeline over a sequence");
  run->add_option("--config", config, "Pipeline config")->required()->check(CLI::ExistingFile);
  run->add_option("--seq", seq, "Sequence directory")->required();
  run->add_option("--out", out, "Output directory")->required();

  auto* validate = app.add_subcommand("validate", "Check a sequence directory");
  validate->add_option("--seq", seq, "Sequence directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fov->parsed()) {
      const auto cameras = LoadCalibrationArg(calib);
      occtrack::WriteMaskFile(out, occtrack::BuildFovMask(occtrack::LoadGridConfig(grid), cameras));
    } else if (occ->parsed()) {
      const occtrack::VoxelGrid occupancy = occtrack::ReadGridFile(grid);
      std::vector<Eigen::Vector3d> points;
      for (const auto& pose : occtrack::ReadPoseFile(origins)) points.push_back(pose.translation);
      occtrack::WriteMaskFile(out, occtrack::BuildOcclusionMask(occupancy, points));
    } else if (complete->parsed()) {
      const auto partition = LoadClasses(classes);
      const auto sequence = occtrack::LoadSequence(seq, partition);
      fs::create_directories(out);
      std::vector<std::string> warnings;
      for (int f = 0; f < static_cast<int>(sequence.panoptic.size()); ++f) {
        occtrack::WriteGridFile(
            fs::path(out) / ("centered_" + occtrack::FrameName(f) + ".otg"),
            occtrack::CompleteSequenceFrame(sequence, f, history, partition, &warnings));
      }
      PrintWarnings(warnings);
    } else if (focus->parsed()) {
      const occtrack::VoxelGrid panoptic = occtrack::ReadGridFile(grid);
      const auto& config = panoptic.config();
      fs::create_directories(out);
      const auto offsets = occtrack::DirectionalOffsets(panoptic);
      const auto raw = occtrack::FocusProduct(offsets, panoptic);
      occtrack::WriteFieldFile(fs::path(out) / "focus.otf",
                               occtrack::ToScalarField(config,
                                   occtrack::InstanceNormalize(raw, panoptic, epsilon)));
      const auto directional = occtrack::NormalizeOffsets(offsets, panoptic);
      for (auto d : occtrack::kAllDirections) {
        occtrack::WriteFieldFile(
            fs::path(out) / ("offset_" + occtrack::DirectionName(d) + ".otf"),
            occtrack::ToScalarField(config, directional[static_cast<int>(d)]));
      }
    } else if (lift->parsed()) {
      const auto camera = occtrack::LoadCalibration(calib);
      occtrack::WriteFrustumTableFile(
          out, occtrack::BuildFrustum(camera.intrinsics, occtrack::LoadDepthBins(bins), stride));
    } else if (eval->parsed()) {
      const auto result = occtrack::EvaluateDirectories(pred, gt, LoadClasses(classes));
      occtrack::WriteReportFile(report, result);
      occtrack::WriteReport(std::cout, result);
    } else if (run->parsed()) {
      const auto result =
          occtrack::RunPipeline(occtrack::LoadPipelineConfig(config), seq, out);
      PrintWarnings(result.warnings);
      std::cout << result.outputs.size() << " outputs written to " << out << '\n';
    } else if (validate->parsed()) {
      const auto issues = occtrack::ValidateInputs(seq);
      for (const auto& issue : issues) std::cout << issue << '\n';
      if (!issues.empty()) return 1;
      std::cout << "ok\n";
    }
  } catch (const occtrack::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
