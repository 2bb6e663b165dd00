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

#include "occtrack/label_builder.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "Eigen/LU"
#include "Eigen/SVD"
#include "occtrack/error.h"
#include "occtrack/parallel.h"

namespace occtrack {
namespace {

constexpr double kInsideTolerance = 1e-9;

// max_k |local_k / half_k| of a point in the box frame.
double NormalizedChebyshev(const EgoBox& box, const Pose& ego_to_box,
                           const Eigen::Vector3d& point) {
  const Eigen::Vector3d local = ego_to_box * point;
  return (local.array().abs() / box.half_extents.array()).maxCoeff();
}

bool InsideBox(const EgoBox& box, const Pose& ego_to_box, const Eigen::Vector3d& point) {
  const Eigen::Vector3d local = ego_to_box * point;
  return (local.array().abs() <= box.half_extents.array() + kInsideTolerance).all();
}

std::vector<Pose> Inverses(const std::vector<EgoBox>& boxes) {
  std::vector<Pose> result;
  result.reserve(boxes.size());
  for (const auto& box : boxes) result.push_back(box.box_to_ego.Inverse());
  return result;
}

// Copy of `grid` keeping only voxels accepted by keep(label).
template <typename Keep>
VoxelGrid Filter(const VoxelGrid& grid, Keep&& keep) {
  VoxelGrid result(grid.config());
  for (std::size_t i = 0; i < grid.config().num_voxels(); ++i) {
    if (keep(grid.at(i))) result.at(i) = grid.at(i);
  }
  return result;
}

bool AnyReachesGrid(const VoxelGrid& source, const Pose& pose, const GridConfig& config) {
  for (std::size_t i = 0; i < source.config().num_voxels(); ++i) {
    if (!source.at(i).occupied()) continue;
    const Eigen::Vector3d moved =
        pose * IndexToCenter(source.config(), source.config().Unravel(i));
    if (moved.x() >= config.extent_min().x()) return true;
  }
  return false;
}

}  // namespace

std::vector<EgoBox> BoxesAtFrame(const std::vector<InstanceBox>& instances, int frame,
                                 const Pose& ego_to_world) {
  const Pose world_to_ego = ego_to_world.Inverse();
  std::vector<EgoBox> boxes;
  for (const auto& instance : instances) {
    const auto* observation = instance.At(frame);
    if (!observation) continue;
    boxes.push_back(EgoBox{instance.instance_id, instance.semantic_id,
                           world_to_ego * observation->box_to_world,
                           observation->half_extents});
  }
  return boxes;
}

std::vector<InstanceBox> ReadBoxes(std::istream& in) {
  std::map<std::uint32_t, InstanceBox> by_id;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> fields;
    for (std::string token; tokens >> token;) fields.push_back(token);
    if (fields.empty()) continue;
    const std::string where = "boxes line " + std::to_string(line_number) + ": ";
    if (fields.size() != 18) {
      throw FormatError(where + "expected 18 fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values;
    for (const auto& field : fields) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != field.size() || !std::isfinite(v)) {
        throw FormatError(where + "not a number: '" + field + "'");
      }
      values.push_back(v);
    }
    for (int k = 0; k < 3; ++k) {
      if (values[k] != std::floor(values[k])) {
        throw FormatError(where + "frame and ids must be integers");
      }
    }
    if (values[0] < 0 || values[1] <= 0 || values[2] <= 0 ||
        values[2] >= PanopticLabel::kUnknown) {
      throw FormatError(where + "frame, instance or class out of range");
    }
    const int frame = static_cast<int>(values[0]);
    const auto id = static_cast<std::uint32_t>(values[1]);
    const auto semantic = static_cast<std::uint16_t>(values[2]);
    std::array<double, 12> matrix{};
    std::copy(values.begin() + 3, values.begin() + 15, matrix.begin());
    InstanceBox::Observation observation;
    observation.box_to_world = Pose::FromRowMajor(matrix);
    if (!observation.box_to_world.IsValid(1e-6)) {
      throw FormatError(where + "box rotation is not a proper rotation");
    }
    observation.half_extents = Eigen::Vector3d(values[15], values[16], values[17]);
    if (!(observation.half_extents.array() > 0.0).all()) {
      throw FormatError(where + "half-extents must be positive");
    }
    InstanceBox& instance = by_id[id];
    if (instance.instance_id == 0) {
      instance.instance_id = id;
      instance.semantic_id = semantic;
    } else if (instance.semantic_id != semantic) {
      throw FormatError(where + "instance " + std::to_string(id) + " changes class");
    }
    if (!instance.frames.emplace(frame, observation).second) {
      throw FormatError(where + "duplicate box for instance " + std::to_string(id) +
                        " at frame " + std::to_string(frame));
    }
  }
  std::vector<InstanceBox> result;
  for (auto& [id, instance] : by_id) result.push_back(std::move(instance));
  return result;
}

std::vector<InstanceBox> ReadBoxFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open: " + path.string());
  try {
    return ReadBoxes(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteBoxes(std::ostream& out, const std::vector<InstanceBox>& instances) {
  out << std::setprecision(17);
  for (const auto& instance : instances) {
    for (const auto& [frame, observation] : instance.frames) {
      out << frame << ' ' << instance.instance_id << ' ' << instance.semantic_id;
      for (double v : observation.box_to_world.ToRowMajor()) out << ' ' << v;
      for (int k = 0; k < 3; ++k) out << ' ' << observation.half_extents[k];
      out << '\n';
    }
  }
}

VoxelGrid VoxelizeBoxes(const VoxelGrid& semantic_grid, const std::vector<EgoBox>& boxes,
                        const ClassPartition& classes) {
  VoxelGrid result = semantic_grid;
  const GridConfig& config = semantic_grid.config();
  const std::vector<Pose> inverse = Inverses(boxes);
  for (std::size_t i = 0; i < config.num_voxels(); ++i) {
    PanopticLabel& label = result.at(i);
    if (!classes.IsThing(label.semantic)) continue;
    const Eigen::Vector3d center = IndexToCenter(config, config.Unravel(i));
    double best_distance = std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (boxes[b].semantic_id != label.semantic) continue;
      if (!InsideBox(boxes[b], inverse[b], center)) continue;
      const double distance = (center - boxes[b].box_to_ego.translation).norm();
      if (distance < best_distance ||
          (distance == best_distance && boxes[b].instance_id < best_id)) {
        best_distance = distance;
        best_id = boxes[b].instance_id;
      }
    }
    if (best_id != 0) label.instance = best_id;
  }
  return result;
}

VoxelGrid AssignOrphans(const VoxelGrid& panoptic_grid, const std::vector<EgoBox>& boxes,
                        const ClassPartition& classes, double cutoff) {
  VoxelGrid result = panoptic_grid;
  const GridConfig& config = panoptic_grid.config();
  const std::vector<Pose> inverse = Inverses(boxes);
  for (std::size_t i = 0; i < config.num_voxels(); ++i) {
    PanopticLabel& label = result.at(i);
    if (label.instance != 0 || !classes.IsThing(label.semantic)) continue;
    const Eigen::Vector3d center = IndexToCenter(config, config.Unravel(i));
    double best_norm = std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (boxes[b].semantic_id != label.semantic) continue;
      const double norm = NormalizedChebyshev(boxes[b], inverse[b], center);
      if (norm < best_norm || (norm == best_norm && boxes[b].instance_id < best_id)) {
        best_norm = norm;
        best_id = boxes[b].instance_id;
      }
    }
    if (best_id != 0 && best_norm <= cutoff) label.instance = best_id;
  }
  return result;
}

Pose PlanarizeTransform(const Pose& transform) {
  const Eigen::Matrix2d block = transform.rotation.topLeftCorner<2, 2>();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if ((svd.singularValues().array() < 1e-9).all()) {
    throw DegenerateRotationError("horizontal rotation block is degenerate");
  }
  Eigen::Matrix2d sign = Eigen::Matrix2d::Identity();
  sign(1, 1) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  Pose result;
  result.rotation.topLeftCorner<2, 2>() =
      svd.matrixU() * sign * svd.matrixV().transpose();
  result.translation = transform.translation;
  result.translation.z() = 0.0;
  return result;
}

FillRange ComputeFillRange(const VoxelGrid& previous, const Pose& relative_pose,
                           const GridConfig& config) {
  const GridConfig& source = previous.config();
  double max_depth = 0.0;
  for (std::size_t i = 0; i < source.num_voxels(); ++i) {
    if (!previous.at(i).occupied()) continue;
    const Eigen::Vector3d moved = relative_pose * IndexToCenter(source, source.Unravel(i));
    max_depth = std::max(max_depth, BackwardDepth(moved));
  }
  const double rear = BackwardDepth(config.extent_min());
  if (rear > 0.0) max_depth = std::min(max_depth, rear);
  FillRange range{VoxelMask(config), max_depth};
  for (std::size_t i = 0; i < config.num_voxels(); ++i) {
    range.mask.Set(i, BackwardDepth(IndexToCenter(config, config.Unravel(i))) <= max_depth);
  }
  return range;
}

void MergeInto(VoxelGrid& destination, const VoxelGrid& source, const VoxelMask& mask) {
  if (!destination.config().SameLattice(source.config()) ||
      !destination.config().SameLattice(mask.config())) {
    throw ShapeError("merge operands use different lattices");
  }
  for (std::size_t i = 0; i < destination.config().num_voxels(); ++i) {
    const PanopticLabel& incoming = source.at(i);
    if (!incoming.occupied() || !mask[i]) continue;
    PanopticLabel& cell = destination.at(i);
    if (!cell.occupied() || (cell.unknown() && !incoming.unknown())) cell = incoming;
  }
}

VoxelGrid CompleteStatic(const FrameLabels& current, const std::vector<FrameLabels>& history,
                         const ClassPartition& classes) {
  const GridConfig& config = current.forward_grid.config();
  VoxelGrid result = current.forward_grid;
  struct Contribution {
    bool empty = true;
    bool reaches = false;
    std::optional<VoxelGrid> moved;
    std::optional<FillRange> range;
  };
  std::vector<Contribution> contributions(history.size());
  const Pose world_to_current = current.ego_to_world.Inverse();
  ParallelFor(history.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t h = begin; h < end; ++h) {
      if (!history[h].forward_grid.config().SameLattice(config)) {
        throw ShapeError("history frame " + std::to_string(history[h].frame_index) +
                         " uses a different lattice");
      }
      const VoxelGrid statics = Filter(history[h].forward_grid, [&](const PanopticLabel& l) {
        return l.occupied() && l.instance == 0 && !classes.IsThing(l.semantic);
      });
      Contribution& c = contributions[h];
      c.empty = statics.CountOccupied() == 0;
      if (c.empty) continue;
      const Pose relative =
          PlanarizeTransform(world_to_current * history[h].ego_to_world);
      c.reaches = AnyReachesGrid(statics, relative, config);
      if (!c.reaches) continue;
      c.moved = TransformGrid(statics, relative, config);
      c.range = ComputeFillRange(statics, relative, config);
    }
  });
  for (const auto& c : contributions) {
    if (c.empty) continue;
    if (!c.reaches) break;
    MergeInto(result, *c.moved, c.range->mask);
  }
  return result;
}

VoxelGrid CompleteDynamic(const VoxelGrid& base, const FrameLabels& current,
                          const std::vector<FrameLabels>& history,
                          const std::vector<InstanceBox>& instances,
                          const ClassPartition& classes, std::vector<std::string>* warnings) {
  const GridConfig& config = current.forward_grid.config();
  VoxelGrid result = base;
  struct Contribution {
    VoxelGrid moved;
    FillRange range;
  };
  std::vector<std::vector<Contribution>> contributions(history.size());
  std::vector<std::vector<std::string>> notes(history.size());
  const Pose world_to_current = current.ego_to_world.Inverse();
  ParallelFor(history.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t h = begin; h < end; ++h) {
      const FrameLabels& past = history[h];
      if (!past.forward_grid.config().SameLattice(config)) {
        throw ShapeError("history frame " + std::to_string(past.frame_index) +
                         " uses a different lattice");
      }
      const Pose ego_relative = PlanarizeTransform(world_to_current * past.ego_to_world);
      const Pose world_to_past = past.ego_to_world.Inverse();
      for (const auto& instance : instances) {
        if (!classes.IsThing(instance.semantic_id)) continue;
        const VoxelGrid voxels = Filter(past.forward_grid, [&](const PanopticLabel& l) {
          return l.instance == instance.instance_id && classes.IsThing(l.semantic);
        });
        if (voxels.CountOccupied() == 0) continue;
        const auto* now = instance.At(current.frame_index);
        const auto* then = instance.At(past.frame_index);
        if (!now || !then) {
          notes[h].push_back("instance " + std::to_string(instance.instance_id) +
                             " has no pose at frame " +
                             std::to_string(!now ? current.frame_index : past.frame_index) +
                             "; skipped for history frame " +
                             std::to_string(past.frame_index));
          continue;
        }
        // Object motion expressed in the past ego frame, then the planarized
        // ego motion.
        const Pose object_motion = world_to_past * now->box_to_world *
                                   then->box_to_world.Inverse() * past.ego_to_world;
        const Pose transform = ego_relative * object_motion;
        contributions[h].push_back(Contribution{TransformGrid(voxels, transform, config),
                                                ComputeFillRange(voxels, transform, config)});
      }
    }
  });
  for (std::size_t h = 0; h < history.size(); ++h) {
    for (const auto& c : contributions[h]) MergeInto(result, c.moved, c.range.mask);
    if (warnings) warnings->insert(warnings->end(), notes[h].begin(), notes[h].end());
  }
  return result;
}

VoxelGrid CompleteFrame(const FrameLabels& current, const std::vector<FrameLabels>& history,
                        const std::vector<InstanceBox>& instances,
                        const ClassPartition& classes, std::vector<std::string>* warnings) {
  const VoxelGrid statics = CompleteStatic(current, history, classes);
  return CompleteDynamic(statics, current, history, instances, classes, warnings);
}

}  // namespace occtrack
