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

#include "occtrack/voxel_grid.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "Eigen/LU"
#include "occtrack/error.h"

namespace occtrack {

GridConfig::GridConfig(const Eigen::Vector3d& extent_min,
                       const Eigen::Vector3d& voxel_size, const VoxelIndex& dims)
    : extent_min_(extent_min),
      extent_max_(extent_min + voxel_size.cwiseProduct(dims.cast<double>())),
      voxel_size_(voxel_size),
      dims_(dims) {}

GridConfig GridConfig::FromExtent(const Eigen::Vector3d& extent_min,
                                  const Eigen::Vector3d& extent_max,
                                  const Eigen::Vector3d& voxel_size) {
  VoxelIndex dims;
  for (int i = 0; i < 3; ++i) {
    if (!(voxel_size[i] > 0.0) || !std::isfinite(voxel_size[i])) {
      throw DomainError("voxel_size must be positive and finite");
    }
    const double span = extent_max[i] - extent_min[i];
    const double count = std::round(span / voxel_size[i]);
    if (count < 1.0 || std::abs(count * voxel_size[i] - span) > kTolerance) {
      std::ostringstream msg;
      msg << "extent along axis " << i << " (" << span
          << " m) is not a positive multiple of voxel size " << voxel_size[i];
      throw DomainError(msg.str());
    }
    dims[i] = static_cast<int>(count);
  }
  GridConfig config(extent_min, voxel_size, dims);
  // Keep the caller's exact max rather than the recomputed product.
  config.extent_max_ = extent_max;
  return config;
}

GridConfig GridConfig::FromDims(const Eigen::Vector3d& extent_min,
                                const Eigen::Vector3d& voxel_size,
                                const VoxelIndex& dims) {
  for (int i = 0; i < 3; ++i) {
    if (!(voxel_size[i] > 0.0) || !std::isfinite(voxel_size[i])) {
      throw DomainError("voxel_size must be positive and finite");
    }
    if (dims[i] < 1) throw DomainError("dims must be >= 1 along every axis");
  }
  return GridConfig(extent_min, voxel_size, dims);
}

VoxelIndex GridConfig::Unravel(std::size_t linear) const {
  const std::size_t nx = dims_.x();
  const std::size_t ny = dims_.y();
  return VoxelIndex(static_cast<int>(linear % nx),
                    static_cast<int>((linear / nx) % ny),
                    static_cast<int>(linear / (nx * ny)));
}

bool GridConfig::SameLattice(const GridConfig& other) const {
  return dims_ == other.dims_ &&
         (extent_min_ - other.extent_min_).cwiseAbs().maxCoeff() <= kTolerance &&
         (voxel_size_ - other.voxel_size_).cwiseAbs().maxCoeff() <= kTolerance;
}

Eigen::Vector3d IndexToCenter(const GridConfig& config, const VoxelIndex& index) {
  if (!config.Contains(index)) {
    std::ostringstream msg;
    msg << "voxel index (" << index.transpose() << ") outside dims ("
        << config.dims().transpose() << ")";
    throw BoundsError(msg.str());
  }
  return config.extent_min() +
         (index.cast<double>().array() + 0.5).matrix().cwiseProduct(
             config.voxel_size());
}

std::optional<VoxelIndex> CenterToIndex(const GridConfig& config,
                                        const Eigen::Vector3d& point) {
  VoxelIndex index;
  for (int i = 0; i < 3; ++i) {
    if (!(point[i] >= config.extent_min()[i]) ||
        !(point[i] < config.extent_max()[i])) {
      return std::nullopt;
    }
    const double cell =
        std::floor((point[i] - config.extent_min()[i]) / config.voxel_size()[i]);
    // Rounding can push a point just below extent_max onto dims.
    index[i] = std::clamp(static_cast<int>(cell), 0, config.dims()[i] - 1);
  }
  return index;
}

VoxelGrid::VoxelGrid(const GridConfig& config)
    : config_(config), labels_(config.num_voxels()) {}

VoxelGrid::VoxelGrid(const GridConfig& config, std::vector<PanopticLabel> labels)
    : config_(config), labels_(std::move(labels)) {
  if (labels_.size() != config_.num_voxels()) {
    throw ShapeError("label count does not match grid dims");
  }
}

std::size_t VoxelGrid::CountOccupied() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(),
                    [](const PanopticLabel& l) { return l.occupied(); }));
}

Pose Pose::FromRowMajor(std::span<const double, 12> values) {
  Pose pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = values[r * 4 + c];
    pose.translation[r] = values[r * 4 + 3];
  }
  return pose;
}

std::array<double, 12> Pose::ToRowMajor() const {
  std::array<double, 12> values{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) values[r * 4 + c] = rotation(r, c);
    values[r * 4 + 3] = translation[r];
  }
  return values;
}

Pose Pose::Inverse() const {
  const Eigen::Matrix3d rt = rotation.transpose();
  return Pose{rt, -(rt * translation)};
}

bool Pose::IsValid(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho =
      (rotation * rotation.transpose() - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  return ortho <= tolerance && std::abs(rotation.determinant() - 1.0) <= tolerance;
}

Pose YawPose(double angle, const Eigen::Vector3d& translation) {
  Pose pose;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  pose.rotation << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  pose.translation = translation;
  return pose;
}

VoxelGrid TransformGrid(const VoxelGrid& src, const Pose& pose,
                        const GridConfig& dst_config) {
  VoxelGrid dst(dst_config);
  std::vector<double> winner_depth(dst_config.num_voxels(),
                                   -std::numeric_limits<double>::infinity());
  const GridConfig& src_config = src.config();
  // Sources are visited in increasing linear index, so a strict comparison
  // keeps the lower index on exact depth ties.
  for (std::size_t i = 0; i < src_config.num_voxels(); ++i) {
    const PanopticLabel& label = src.at(i);
    if (!label.occupied()) continue;
    const Eigen::Vector3d moved =
        pose * IndexToCenter(src_config, src_config.Unravel(i));
    const auto target = CenterToIndex(dst_config, moved);
    if (!target) continue;
    const std::size_t cell = dst_config.LinearIndex(*target);
    const double depth = moved.norm();
    if (depth > winner_depth[cell]) {
      winner_depth[cell] = depth;
      dst.at(cell) = label;
    }
  }
  return dst;
}

ClassPartition ClassPartition::Default() {
  ClassPartition partition;
  for (std::uint16_t c = 1; c <= 6; ++c) partition.thing.insert(c);
  for (std::uint16_t c = 7; c <= 18; ++c) partition.stuff.insert(c);
  return partition;
}

}  // namespace occtrack
