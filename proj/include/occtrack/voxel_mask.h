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

#ifndef OCCTRACK_VOXEL_MASK_H_
#define OCCTRACK_VOXEL_MASK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "occtrack/voxel_grid.h"

namespace occtrack {

// Dense boolean field over a lattice, same layout as VoxelGrid labels. Stored
// one byte per voxel so disjoint ranges can be written from separate threads.
class VoxelMask {
 public:
  VoxelMask(const GridConfig& config, bool value = false);
  VoxelMask(const GridConfig& config, std::vector<std::uint8_t> values);

  const GridConfig& config() const { return config_; }
  std::size_t size() const { return values_.size(); }
  bool operator[](std::size_t linear) const { return values_[linear] != 0; }
  bool at(const VoxelIndex& index) const {
    return values_[config_.LinearIndex(index)] != 0;
  }
  void Set(std::size_t linear, bool value) { values_[linear] = value ? 1 : 0; }
  std::span<const std::uint8_t> values() const { return values_; }
  std::span<std::uint8_t> mutable_values() { return values_; }

  std::size_t Count() const;
  bool All() const { return Count() == values_.size(); }

  // Pointwise combinations; throw ShapeError on lattice mismatch.
  VoxelMask And(const VoxelMask& other) const;
  VoxelMask Or(const VoxelMask& other) const;

  friend bool operator==(const VoxelMask& a, const VoxelMask& b) {
    return a.config_.SameLattice(b.config_) && a.values_ == b.values_;
  }

 private:
  GridConfig config_;
  std::vector<std::uint8_t> values_;
};

// Voxels visible from the sensor origins.
using OcclusionMask = VoxelMask;
// Voxels inside the field of view of at least one camera.
using FovMask = VoxelMask;

// Dense float field over a lattice (focus features, offsets).
struct ScalarField {
  explicit ScalarField(const GridConfig& grid_config)
      : config(grid_config), values(grid_config.num_voxels(), 0.0f) {}

  GridConfig config;
  std::vector<float> values;
};

}  // namespace occtrack

#endif  // OCCTRACK_VOXEL_MASK_H_
