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

#ifndef OCCTRACK_PIPELINE_H_
#define OCCTRACK_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "occtrack/fisheye_camera.h"
#include "occtrack/label_builder.h"
#include "occtrack/panoptic_metrics.h"
#include "occtrack/spherical_lift.h"
#include "occtrack/voxel_grid.h"

// Sequence directory layout:
//
//   poses.txt          ego-to-world pose per frame, 12 floats per line
//   boxes.txt          instance boxes (see ReadBoxes)
//   grids/NNNNNN.otg   forward-facing semantic grid per frame
//   calib/<name>.txt   one calibration file per camera

namespace occtrack {

enum class OcclusionOrigins { kCameras, kEgo };

struct PipelineConfig {
  GridConfig grid = GridConfig::FromDims(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(),
                                         VoxelIndex::Ones());
  // Empty: every calib/*.txt of the sequence.
  std::vector<std::filesystem::path> cameras;
  int history_depth = 4;
  double epsilon = 1e-6;
  int stride = 16;
  std::vector<double> depth_bins = {1.0, 45.0, 1.0};  // first, last, step
  ClassPartition classes = ClassPartition::Default();
  OcclusionOrigins occlusion_origins = OcclusionOrigins::kCameras;
  // Raw config text; hashed into the manifest with the calibration files.
  std::string source_text;
};

// Key-value text. Required: extent_min, extent_max, voxel_size. Optional:
// cameras (paths, relative to the config file), history_depth, epsilon,
// stride, depth_bins (first last step), stuff, thing,
// occlusion_origins (cameras | ego). Throws FormatError.
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

std::string FrameName(int frame);  // zero-padded to six digits

// Calibration files of a directory, sorted by file name.
std::vector<std::filesystem::path> CalibrationFiles(const std::filesystem::path& dir);
std::vector<FisheyeCamera> LoadCameras(const std::vector<std::filesystem::path>& files);

// Forward grids of a sequence with instance ids assigned from the boxes.
struct Sequence {
  std::vector<Pose> ego_to_world;
  std::vector<InstanceBox> instances;
  std::vector<VoxelGrid> panoptic;
};

// Errors name the file and the frame index.
Sequence LoadSequence(const std::filesystem::path& dir, const ClassPartition& classes);

// Centered grid of `frame` from up to history_depth preceding frames.
VoxelGrid CompleteSequenceFrame(const Sequence& sequence, int frame, int history_depth,
                                const ClassPartition& classes,
                                std::vector<std::string>* warnings = nullptr);

// Optical centers of the cameras in ego coordinates, or the ego origin.
std::vector<Eigen::Vector3d> OcclusionOriginsFor(const std::vector<FisheyeCamera>& cameras,
                                                 OcclusionOrigins mode);

struct PipelineResult {
  std::vector<std::string> outputs;  // relative to the output directory
  std::vector<std::string> warnings;
};

// Writes per frame centered_NNNNNN.otg, occlusion_NNNNNN.otm, fov_NNNNNN.otm
// and focus_NNNNNN.otf, per camera lift_<name>.otl, and manifest.txt. Inputs
// are validated before anything is written.
PipelineResult RunPipeline(const PipelineConfig& config,
                           const std::filesystem::path& sequence_dir,
                           const std::filesystem::path& out_dir);

// Problems found in a sequence directory; empty when it is complete.
std::vector<std::string> ValidateInputs(const std::filesystem::path& sequence_dir);

// Pairs sorted *.otg files of both directories with the occlusion_*.otm and
// fov_*.otm masks of the ground-truth directory.
MetricReport EvaluateDirectories(const std::filesystem::path& pred_dir,
                                 const std::filesystem::path& gt_dir,
                                 const ClassPartition& classes);

}  // namespace occtrack

#endif  // OCCTRACK_PIPELINE_H_
