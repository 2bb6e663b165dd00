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

#ifndef OCCTRACK_FOCUS_FEATURE_H_
#define OCCTRACK_FOCUS_FEATURE_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "occtrack/voxel_grid.h"
#include "occtrack/voxel_mask.h"

namespace occtrack {

enum class Direction { kXPlus, kXMinus, kYPlus, kYMinus, kZPlus, kZMinus };
inline constexpr std::array<Direction, 6> kAllDirections = {
    Direction::kXPlus, Direction::kXMinus, Direction::kYPlus,
    Direction::kYMinus, Direction::kZPlus, Direction::kZMinus};
// "x+", "x-", ...; also used in output file names.
std::string DirectionName(Direction direction);

// Run length of identical panoptic labels ending at each voxel, counted from
// the side the direction scans from. Free and unknown voxels hold 0.
struct OffsetField {
  Direction direction = Direction::kXPlus;
  std::vector<std::int32_t> values;
};

std::array<OffsetField, 6> DirectionalOffsets(const VoxelGrid& panoptic);

// Normalization scope per voxel: one region per (semantic, instance) with a
// non-zero instance, and one per 26-connected component of identical labels
// otherwise. Free and unknown voxels get -1.
struct Regions {
  std::vector<std::int32_t> id;
  int count = 0;
};
Regions LabelRegions(const VoxelGrid& panoptic);

struct FocusField {
  std::vector<double> raw;
  std::vector<double> normalized;
  double epsilon = 1e-6;
};

// Product of the six offsets; 0 at free voxels.
std::vector<double> FocusProduct(const std::array<OffsetField, 6>& offsets,
                                 const VoxelGrid& panoptic);

// raw / (region max + epsilon). Throws DomainError unless epsilon > 0.
std::vector<double> InstanceNormalize(const std::vector<double>& raw,
                                      const VoxelGrid& panoptic, double epsilon = 1e-6);

// Each directional offset divided by its maximum within the region, in (0, 1]
// at labelled voxels.
std::array<std::vector<double>, 6> NormalizeOffsets(
    const std::array<OffsetField, 6>& offsets, const VoxelGrid& panoptic);

FocusField ComputeFocus(const VoxelGrid& panoptic, double epsilon = 1e-6);

// Narrows a per-voxel vector to a float field on the grid's lattice.
ScalarField ToScalarField(const GridConfig& config, const std::vector<double>& values);

}  // namespace occtrack

#endif  // OCCTRACK_FOCUS_FEATURE_H_
