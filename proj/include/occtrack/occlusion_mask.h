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

#ifndef OCCTRACK_OCCLUSION_MASK_H_
#define OCCTRACK_OCCLUSION_MASK_H_

#include <vector>

#include "Eigen/Core"
#include "occtrack/voxel_grid.h"
#include "occtrack/voxel_mask.h"

namespace occtrack {

// Indices with at least one coordinate on the first or last layer, in linear
// order.
std::vector<VoxelIndex> BoundaryVoxels(const GridConfig& config);

// Voxels crossed by the segment origin -> target in order of increasing ray
// parameter. At exact face, edge or corner crossings x steps first, then y,
// then z. Stops at the voxel containing the target or at the grid boundary.
// Throws DomainError when the origin lies outside the extent.
std::vector<VoxelIndex> TraverseRay(const GridConfig& config, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& target);

// A voxel blocks rays when it holds a known, non-free label. Unknown (255)
// cells are unobserved space and let rays through.
inline bool BlocksRay(const PanopticLabel& label) {
  return label.occupied() && !label.unknown();
}

// Casts a ray from every origin to every boundary voxel center and marks
// voxels up to and including the first blocking one. Throws DomainError when
// an origin lies outside the extent or no origin is given.
OcclusionMask BuildOcclusionMask(const VoxelGrid& occupancy,
                                 const std::vector<Eigen::Vector3d>& origins);

}  // namespace occtrack

#endif  // OCCTRACK_OCCLUSION_MASK_H_
