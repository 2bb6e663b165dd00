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

#include "occtrack/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "occtrack/error.h"
#include "occtrack/focus_feature.h"
#include "occtrack/fov_mask.h"
#include "occtrack/grid_io.h"
#include "occtrack/occlusion_mask.h"
#include "occtrack/text_config.h"

namespace occtrack {
namespace {

namespace fs = std::filesystem;

constexpr int kFrameRateHz = 2;

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::uint64_t Fnv1a(std::uint64_t hash, const std::string& bytes) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// Sorted regular files in `dir` whose names start with `prefix` and end with
// `suffix`.
std::vector<fs::path> ListFiles(const fs::path& dir, const std::string& prefix,
                                const std::string& suffix) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() >= prefix.size() + suffix.size() && name.starts_with(prefix) &&
        name.ends_with(suffix)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

fs::path GridPath(const fs::path& dir, int frame) {
  return dir / "grids" / (FrameName(frame) + ".otg");
}

}  // namespace

std::string FrameName(int frame) {
  char name[16];
  std::snprintf(name, sizeof(name), "%06d", frame);
  return name;
}

PipelineConfig LoadPipelineConfig(const fs::path& path) {
  PipelineConfig config;
  config.source_text = ReadAll(path);
  std::istringstream text(config.source_text);
  try {
    const KeyValueFile file = KeyValueFile::Parse(text);
    config.grid = GridConfigFromKeyValues(file);
    config.classes = ClassPartitionFromKeyValues(file);
    if (file.Has("cameras")) {
      for (const auto& name : file.Get("cameras")) {
        const fs::path camera = fs::path(name).is_absolute()
                                    ? fs::path(name)
                                    : path.parent_path() / name;
        config.cameras.push_back(camera);
      }
    }
    if (file.Has("history_depth")) config.history_depth = file.GetInt("history_depth");
    if (config.history_depth < 0) throw FormatError("history_depth must be >= 0");
    if (file.Has("epsilon")) config.epsilon = file.GetDouble("epsilon");
    if (!(config.epsilon > 0.0)) throw FormatError("epsilon must be positive");
    if (file.Has("stride")) config.stride = file.GetInt("stride");
    if (config.stride < 1) throw FormatError("stride must be >= 1");
    if (file.Has("depth_bins")) config.depth_bins = file.GetDoubles("depth_bins", 3);
    if (file.Has("occlusion_origins")) {
      const std::string mode = file.GetString("occlusion_origins");
      if (mode == "cameras") {
        config.occlusion_origins = OcclusionOrigins::kCameras;
      } else if (mode == "ego") {
        config.occlusion_origins = OcclusionOrigins::kEgo;
      } else {
        throw FormatError("occlusion_origins must be 'cameras' or 'ego'");
      }
    }
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return config;
}

std::vector<fs::path> CalibrationFiles(const fs::path& dir) {
  return ListFiles(dir, "", ".txt");
}

std::vector<FisheyeCamera> LoadCameras(const std::vector<fs::path>& files) {
  std::vector<FisheyeCamera> cameras;
  std::set<std::string> names;
  for (const auto& file : files) {
    cameras.push_back(LoadCalibration(file));
    if (!names.insert(cameras.back().name).second) {
      throw FormatError(file.string() + ": duplicate camera name '" +
                        cameras.back().name + "'");
    }
  }
  return cameras;
}

Sequence LoadSequence(const fs::path& dir, const ClassPartition& classes) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  Sequence sequence;
  sequence.ego_to_world = ReadPoseFile(dir / "poses.txt");
  if (sequence.ego_to_world.empty()) {
    throw FormatError((dir / "poses.txt").string() + ": no frames");
  }
  sequence.instances = ReadBoxFile(dir / "boxes.txt");
  const int frames = static_cast<int>(sequence.ego_to_world.size());
  for (int f = 0; f < frames; ++f) {
    const fs::path path = GridPath(dir, f);
    std::optional<VoxelGrid> grid;
    try {
      grid = ReadGridFile(path);
    } catch (const Error& e) {
      throw FormatError("frame " + std::to_string(f) + ": " + e.what());
    }
    if (f > 0 && !grid->config().SameLattice(sequence.panoptic.front().config())) {
      throw ShapeError("frame " + std::to_string(f) + ": " + path.string() +
                       ": lattice differs from frame 0");
    }
    const auto boxes = BoxesAtFrame(sequence.instances, f, sequence.ego_to_world[f]);
    sequence.panoptic.push_back(
        AssignOrphans(VoxelizeBoxes(*grid, boxes, classes), boxes, classes));
  }
  return sequence;
}

VoxelGrid CompleteSequenceFrame(const Sequence& sequence, int frame, int history_depth,
                                const ClassPartition& classes,
                                std::vector<std::string>* warnings) {
  const FrameLabels current{frame, sequence.ego_to_world[frame], sequence.panoptic[frame],
                            std::nullopt};
  std::vector<FrameLabels> history;
  for (int i = 1; i <= history_depth && frame - i >= 0; ++i) {
    history.push_back(FrameLabels{frame - i, sequence.ego_to_world[frame - i],
                                  sequence.panoptic[frame - i], std::nullopt});
  }
  return CompleteFrame(current, history, sequence.instances, classes, warnings);
}

std::vector<Eigen::Vector3d> OcclusionOriginsFor(const std::vector<FisheyeCamera>& cameras,
                                                 OcclusionOrigins mode) {
  if (mode == OcclusionOrigins::kEgo) return {Eigen::Vector3d::Zero()};
  std::vector<Eigen::Vector3d> origins;
  for (const auto& camera : cameras) origins.push_back(camera.camera_to_ego.translation);
  return origins;
}

PipelineResult RunPipeline(const PipelineConfig& config, const fs::path& sequence_dir,
                           const fs::path& out_dir) {
  const std::vector<fs::path> camera_files =
      config.cameras.empty() ? CalibrationFiles(sequence_dir / "calib") : config.cameras;
  if (camera_files.empty()) throw FormatError("no calibration files");
  const std::vector<FisheyeCamera> cameras = LoadCameras(camera_files);
  const Sequence sequence = LoadSequence(sequence_dir, config.classes);
  if (!sequence.panoptic.front().config().SameLattice(config.grid)) {
    throw ShapeError("sequence grids do not match the configured lattice");
  }
  const std::vector<Eigen::Vector3d> origins =
      OcclusionOriginsFor(cameras, config.occlusion_origins);
  for (const auto& origin : origins) {
    if (!CenterToIndex(config.grid, origin)) {
      throw DomainError("occlusion origin outside the grid extent");
    }
  }
  const DepthBins bins =
      DepthBins::Uniform(config.depth_bins[0], config.depth_bins[1], config.depth_bins[2]);

  fs::create_directories(out_dir);
  PipelineResult result;
  std::uint64_t hash = Fnv1a(0xcbf29ce484222325ULL, config.source_text);
  for (const auto& file : camera_files) hash = Fnv1a(hash, ReadAll(file));

  for (const auto& camera : cameras) {
    const std::string name = "lift_" + camera.name + ".otl";
    WriteFrustumTableFile(out_dir / name, BuildFrustum(camera.intrinsics, bins, config.stride));
    result.outputs.push_back(name);
  }
  const FovMask fov = BuildFovMask(config.grid, cameras);
  // Frames run one after another; every stage parallelizes internally, and
  // completion reads only the loaded forward grids, so order cannot matter.
  for (int f = 0; f < static_cast<int>(sequence.panoptic.size()); ++f) {
    const std::string id = FrameName(f);
    const VoxelGrid centered = CompleteSequenceFrame(sequence, f, config.history_depth,
                                                     config.classes, &result.warnings);
    WriteGridFile(out_dir / ("centered_" + id + ".otg"), centered);
    WriteMaskFile(out_dir / ("occlusion_" + id + ".otm"),
                  BuildOcclusionMask(centered, origins));
    WriteMaskFile(out_dir / ("fov_" + id + ".otm"), fov);
    const FocusField focus = ComputeFocus(centered, config.epsilon);
    WriteFieldFile(out_dir / ("focus_" + id + ".otf"),
                   ToScalarField(config.grid, focus.normalized));
    for (const char* kind : {"centered_", "occlusion_", "fov_", "focus_"}) {
      const std::string ext = kind == std::string("centered_")   ? ".otg"
                              : kind == std::string("focus_") ? ".otf"
                                                              : ".otm";
      result.outputs.push_back(kind + id + ext);
    }
  }

  std::ofstream manifest(out_dir / "manifest.txt", std::ios::trunc);
  if (!manifest) throw FormatError("cannot write manifest in " + out_dir.string());
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  manifest << "config_hash " << hex << "\nframe_rate_hz " << kFrameRateHz << "\nframes "
           << sequence.panoptic.size() << "\ncameras " << cameras.size() << '\n';
  for (const auto& output : result.outputs) manifest << "output " << output << '\n';
  for (const auto& warning : result.warnings) manifest << "warning " << warning << '\n';
  return result;
}

std::vector<std::string> ValidateInputs(const fs::path& dir) {
  std::vector<std::string> issues;
  if (!fs::is_directory(dir)) {
    issues.push_back("sequence directory not found: " + dir.string());
    return issues;
  }
  std::size_t pose_count = 0;
  if (!fs::exists(dir / "poses.txt")) {
    issues.push_back("missing poses.txt");
  } else {
    try {
      pose_count = ReadPoseFile(dir / "poses.txt").size();
      if (pose_count == 0) issues.push_back("poses.txt: no frames");
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
  }
  if (!fs::exists(dir / "boxes.txt")) {
    issues.push_back("missing boxes.txt");
  } else {
    try {
      ReadBoxFile(dir / "boxes.txt");
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
  }
  const auto grids = ListFiles(dir / "grids", "", ".otg");
  if (!fs::is_directory(dir / "grids")) {
    issues.push_back("missing grids/ directory");
  } else {
    if (pose_count > 0 && grids.size() != pose_count) {
      issues.push_back("pose count mismatch: " + std::to_string(pose_count) + " poses, " +
                       std::to_string(grids.size()) + " grids");
    }
    std::optional<GridConfig> lattice;
    for (std::size_t f = 0; f < pose_count; ++f) {
      const fs::path path = GridPath(dir, static_cast<int>(f));
      if (!fs::exists(path)) {
        issues.push_back("frame " + std::to_string(f) + ": missing " + path.string());
        continue;
      }
      try {
        const VoxelGrid grid = ReadGridFile(path);
        if (!lattice) {
          lattice = grid.config();
        } else if (!lattice->SameLattice(grid.config())) {
          issues.push_back("frame " + std::to_string(f) + ": lattice differs from frame 0");
        }
      } catch (const Error& e) {
        issues.push_back("frame " + std::to_string(f) + ": " + e.what());
      }
    }
  }
  const auto calibrations = CalibrationFiles(dir / "calib");
  if (calibrations.empty()) issues.push_back("no calibration files in calib/");
  for (const auto& file : calibrations) {
    try {
      LoadCalibration(file);
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
  }
  return issues;
}

MetricReport EvaluateDirectories(const fs::path& pred_dir, const fs::path& gt_dir,
                                 const ClassPartition& classes) {
  const auto pred_files = ListFiles(pred_dir, "", ".otg");
  const auto gt_files = ListFiles(gt_dir, "", ".otg");
  const auto occlusion_files = ListFiles(gt_dir, "occlusion_", ".otm");
  const auto fov_files = ListFiles(gt_dir, "fov_", ".otm");
  if (gt_files.empty()) throw FormatError("no ground-truth grids in " + gt_dir.string());
  if (pred_files.size() != gt_files.size() || occlusion_files.size() != gt_files.size() ||
      fov_files.size() != gt_files.size()) {
    throw ShapeError("frame counts differ: " + std::to_string(pred_files.size()) +
                     " predicted, " + std::to_string(gt_files.size()) + " ground truth, " +
                     std::to_string(occlusion_files.size()) + " occlusion masks, " +
                     std::to_string(fov_files.size()) + " FoV masks");
  }
  std::vector<VoxelGrid> pred;
  TrackedSequence gt;
  for (std::size_t f = 0; f < gt_files.size(); ++f) {
    pred.push_back(ReadGridFile(pred_files[f]));
    gt.push_back(TrackedFrame{ReadGridFile(gt_files[f]), ReadMaskFile(occlusion_files[f]),
                              ReadMaskFile(fov_files[f])});
  }
  return Evaluate(pred, gt, classes);
}

}  // namespace occtrack
