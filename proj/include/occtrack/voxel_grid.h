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

#ifndef OCCTRACK_VOXEL_GRID_H_
#define OCCTRACK_VOXEL_GRID_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "Eigen/Core"

namespace occtrack {

using VoxelIndex = Eigen::Vector3i;

// Axis-aligned lattice: half-open cells [min + i * size, min + (i + 1) * size)
// along each axis. Linear order is x fastest, then y, then z.
class GridConfig {
 public:
  // Tolerance used when checking that the extent is an integer number of
  // voxels, and when comparing two configurations.
  static constexpr double kTolerance = 1e-9;

  // Derives dims from the extent. Throws DomainError when the extent is not
  // an exact multiple of voxel_size or any size is non-positive.
  static GridConfig FromExtent(const Eigen::Vector3d& extent_min,
                               const Eigen::Vector3d& extent_max,
                               const Eigen::Vector3d& voxel_size);
  static GridConfig FromDims(const Eigen::Vector3d& extent_min,
                             const Eigen::Vector3d& voxel_size,
                             const VoxelIndex& dims);

  const Eigen::Vector3d& extent_min() const { return extent_min_; }
  const Eigen::Vector3d& extent_max() const { return extent_max_; }
  const Eigen::Vector3d& voxel_size() const { return voxel_size_; }
  const VoxelIndex& dims() const { return dims_; }
  std::size_t num_voxels() const {
    return static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z();
  }

  bool Contains(const VoxelIndex& index) const {
    return (index.array() >= 0).all() && (index.array() < dims_.array()).all();
  }
  // Caller guarantees Contains(index).
  std::size_t LinearIndex(const VoxelIndex& index) const {
    return static_cast<std::size_t>(index.x()) +
           static_cast<std::size_t>(dims_.x()) *
               (static_cast<std::size_t>(index.y()) +
                static_cast<std::size_t>(dims_.y()) * index.z());
  }
  VoxelIndex Unravel(std::size_t linear) const;

  // True when both describe the same lattice within kTolerance.
  bool SameLattice(const GridConfig& other) const;

 private:
  GridConfig(const Eigen::Vector3d& extent_min, const Eigen::Vector3d& voxel_size,
             const VoxelIndex& dims);

  Eigen::Vector3d extent_min_;
  Eigen::Vector3d extent_max_;
  Eigen::Vector3d voxel_size_;
  VoxelIndex dims_;
};

// Throws BoundsError for indices outside the lattice.
Eigen::Vector3d IndexToCenter(const GridConfig& config, const VoxelIndex& index);

// floor((point - extent_min) / voxel_size); nullopt outside the half-open
// extent.
std::optional<VoxelIndex> CenterToIndex(const GridConfig& config,
                                        const Eigen::Vector3d& point);

struct PanopticLabel {
  static constexpr std::uint16_t kFree = 0;
  static constexpr std::uint16_t kUnknown = 255;

  std::uint16_t semantic = kFree;
  std::uint32_t instance = 0;

  bool occupied() const { return semantic != kFree; }
  bool unknown() const { return semantic == kUnknown; }
  friend bool operator==(const PanopticLabel&, const PanopticLabel&) = default;
};

class VoxelGrid {
 public:
  explicit VoxelGrid(const GridConfig& config);
  // Throws ShapeError if labels.size() does not match the config.
  VoxelGrid(const GridConfig& config, std::vector<PanopticLabel> labels);

  const GridConfig& config() const { return config_; }
  std::span<const PanopticLabel> labels() const { return labels_; }
  std::span<PanopticLabel> mutable_labels() { return labels_; }

  const PanopticLabel& at(std::size_t linear) const { return labels_[linear]; }
  PanopticLabel& at(std::size_t linear) { return labels_[linear]; }
  const PanopticLabel& at(const VoxelIndex& index) const {
    return labels_[config_.LinearIndex(index)];
  }
  PanopticLabel& at(const VoxelIndex& index) {
    return labels_[config_.LinearIndex(index)];
  }

  std::size_t CountOccupied() const;

  friend bool operator==(const VoxelGrid& a, const VoxelGrid& b) {
    return a.config_.SameLattice(b.config_) && a.labels_ == b.labels_;
  }

 private:
  GridConfig config_;
  std::vector<PanopticLabel> labels_;
};

// Rigid transform p -> rotation * p + translation.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose Identity() { return Pose{}; }
  // Row-major 3x4 [R|t].
  static Pose FromRowMajor(std::span<const double, 12> values);
  std::array<double, 12> ToRowMajor() const;

  Pose Inverse() const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const {
    return rotation * point + translation;
  }
  Pose operator*(const Pose& other) const {
    return Pose{rotation * other.rotation,
                rotation * other.translation + translation};
  }

  // Orthonormal with determinant +1 within `tolerance`.
  bool IsValid(double tolerance = 1e-9) const;
};

// Rotation about +z by `angle` radians.
Pose YawPose(double angle, const Eigen::Vector3d& translation = Eigen::Vector3d::Zero());

// Moves every occupied source voxel by `pose` and writes it into the
// destination cell containing the transformed center. When several sources
// land in one cell, the one farther from the destination frame origin wins;
// ties go to the lower source linear index.
VoxelGrid TransformGrid(const VoxelGrid& src, const Pose& pose,
                        const GridConfig& dst_config);

// Semantic classes with per-object identities ("things") versus amorphous
// ones ("stuff"). Classes 0 and 255 belong to neither.
struct ClassPartition {
  std::set<std::uint16_t> stuff;
  std::set<std::uint16_t> thing;

  // Classes 1-6 tracked, 7-18 segmented only.
  static ClassPartition Default();
  bool IsThing(std::uint16_t semantic) const { return thing.contains(semantic); }
  bool IsStuff(std::uint16_t semantic) const { return stuff.contains(semantic); }
};

}  // namespace occtrack

#endif  // OCCTRACK_VOXEL_GRID_H_
