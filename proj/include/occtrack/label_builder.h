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

#ifndef OCCTRACK_LABEL_BUILDER_H_
#define OCCTRACK_LABEL_BUILDER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "occtrack/voxel_grid.h"
#include "occtrack/voxel_mask.h"

namespace occtrack {

// Tracked object with a world pose and size for every frame it was annotated.
struct InstanceBox {
  struct Observation {
    Pose box_to_world;
    Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
  };

  std::uint32_t instance_id = 0;
  std::uint16_t semantic_id = 0;
  std::map<int, Observation> frames;

  const Observation* At(int frame) const {
    const auto it = frames.find(frame);
    return it == frames.end() ? nullptr : &it->second;
  }
};

// A box expressed in one frame's ego coordinates.
struct EgoBox {
  std::uint32_t instance_id = 0;
  std::uint16_t semantic_id = 0;
  Pose box_to_ego;
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
};

// Boxes annotated at `frame`, moved into the ego frame given by ego_to_world.
std::vector<EgoBox> BoxesAtFrame(const std::vector<InstanceBox>& instances, int frame,
                                 const Pose& ego_to_world);

// One line per box: frame instance_id semantic_id, 12 floats of the
// box-to-world [R|t], 3 half-extents. '#' and blank lines are skipped.
// Throws FormatError on malformed lines, non-positive ids or extents, a
// class change for one instance, or a repeated (frame, instance) pair.
std::vector<InstanceBox> ReadBoxes(std::istream& in);
std::vector<InstanceBox> ReadBoxFile(const std::filesystem::path& path);
void WriteBoxes(std::ostream& out, const std::vector<InstanceBox>& instances);

struct FrameLabels {
  int frame_index = 0;
  Pose ego_to_world;
  VoxelGrid forward_grid;
  std::optional<VoxelGrid> centered_grid;
};

// Gives each thing voxel whose center lies inside a same-class box that box's
// instance id. Overlaps go to the box with the nearest center, then the lower
// id. Other voxels are copied unchanged.
VoxelGrid VoxelizeBoxes(const VoxelGrid& semantic_grid, const std::vector<EgoBox>& boxes,
                        const ClassPartition& classes);

// Thing voxels still without an instance take the same-class box with the
// smallest normalized Chebyshev distance max_k |local_k / half_k|, ties to the
// lower id. Voxels beyond `cutoff` stay unassigned.
VoxelGrid AssignOrphans(const VoxelGrid& panoptic_grid, const std::vector<EgoBox>& boxes,
                        const ClassPartition& classes, double cutoff = 2.0);

// Nearest yaw-only rotation (orthogonal Procrustes on the horizontal 2x2
// block) with the vertical translation dropped. Throws
// DegenerateRotationError when both singular values of the block are below
// 1e-9.
Pose PlanarizeTransform(const Pose& transform);

// Filling range. Depth is measured backwards from the current ego origin,
// i.e. along -x.
struct FillRange {
  VoxelMask mask;
  double max_depth = 0.0;
};

inline double BackwardDepth(const Eigen::Vector3d& point) { return -point.x(); }

// Moves the occupied voxels of `previous` by relative_pose into `config`.
// max_depth is the largest backward depth among them, at least zero and
// clipped to the rear boundary; the mask holds voxels no deeper than that.
FillRange ComputeFillRange(const VoxelGrid& previous, const Pose& relative_pose,
                           const GridConfig& config);

// Writes occupied source cells where the mask allows and the destination is
// free, or unknown while the source is known.
void MergeInto(VoxelGrid& destination, const VoxelGrid& source, const VoxelMask& mask);

// Current forward grid plus the static (stuff, no instance) voxels of each
// history frame, moved by the planarized relative ego pose. History is
// most-recent-first; the first frame whose moved content lies entirely
// behind the rear boundary ends the accumulation.
VoxelGrid CompleteStatic(const FrameLabels& current, const std::vector<FrameLabels>& history,
                         const ClassPartition& classes);

// Adds each instance's voxels from the history frames, carried along with the
// instance's own motion. (instance, frame) pairs with a missing pose are
// skipped and reported through `warnings` when given.
VoxelGrid CompleteDynamic(const VoxelGrid& base, const FrameLabels& current,
                          const std::vector<FrameLabels>& history,
                          const std::vector<InstanceBox>& instances,
                          const ClassPartition& classes,
                          std::vector<std::string>* warnings = nullptr);

// CompleteStatic followed by CompleteDynamic.
VoxelGrid CompleteFrame(const FrameLabels& current, const std::vector<FrameLabels>& history,
                        const std::vector<InstanceBox>& instances,
                        const ClassPartition& classes,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace occtrack

#endif  // OCCTRACK_LABEL_BUILDER_H_
