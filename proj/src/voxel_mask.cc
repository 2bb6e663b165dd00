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

#include "occtrack/voxel_mask.h"

#include <algorithm>

#include "occtrack/error.h"

namespace occtrack {

VoxelMask::VoxelMask(const GridConfig& config, bool value)
    : config_(config), values_(config.num_voxels(), value ? 1 : 0) {}

VoxelMask::VoxelMask(const GridConfig& config, std::vector<std::uint8_t> values)
    : config_(config), values_(std::move(values)) {
  if (values_.size() != config_.num_voxels()) {
    throw ShapeError("mask size does not match grid dims");
  }
  for (auto& v : values_) v = v ? 1 : 0;
}

std::size_t VoxelMask::Count() const {
  return static_cast<std::size_t>(
      std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

VoxelMask VoxelMask::And(const VoxelMask& other) const {
  if (!config_.SameLattice(other.config_)) {
    throw ShapeError("cannot combine masks over different lattices");
  }
  VoxelMask result(config_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    result.values_[i] = values_[i] & other.values_[i];
  }
  return result;
}

VoxelMask VoxelMask::Or(const VoxelMask& other) const {
  if (!config_.SameLattice(other.config_)) {
    throw ShapeError("cannot combine masks over different lattices");
  }
  VoxelMask result(config_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    result.values_[i] = values_[i] | other.values_[i];
  }
  return result;
}

}  // namespace occtrack
