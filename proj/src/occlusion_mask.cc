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

#include "occtrack/occlusion_mask.h"

#include <cmath>
#include <limits>

#include "occtrack/error.h"
#include "occtrack/parallel.h"

namespace occtrack {

std::vector<VoxelIndex> BoundaryVoxels(const GridConfig& config) {
  const VoxelIndex& dims = config.dims();
  std::vector<VoxelIndex> result;
  for (std::size_t i = 0; i < config.num_voxels(); ++i) {
    const VoxelIndex index = config.Unravel(i);
    if ((index.array() == 0).any() || (index.array() == dims.array() - 1).any()) {
      result.push_back(index);
    }
  }
  return result;
}

namespace {

// Walks the segment and calls visit(index) per voxel; stops early when visit
// returns false.
template <typename Visit>
void Walk(const GridConfig& config, const Eigen::Vector3d& origin,
          const Eigen::Vector3d& target, Visit&& visit) {
  const auto start = CenterToIndex(config, origin);
  if (!start) throw DomainError("ray origin outside the grid extent");
  VoxelIndex index = *start;
  const Eigen::Vector3d direction = target - origin;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::Vector3i step;
  Eigen::Vector3d t_max;
  Eigen::Vector3d t_delta;
  for (int axis = 0; axis < 3; ++axis) {
    const double d = direction[axis];
    const double size = config.voxel_size()[axis];
    if (d > 0.0) {
      step[axis] = 1;
      const double face = config.extent_min()[axis] + (index[axis] + 1) * size;
      t_max[axis] = (face - origin[axis]) / d;
      t_delta[axis] = size / d;
    } else if (d < 0.0) {
      step[axis] = -1;
      const double face = config.extent_min()[axis] + index[axis] * size;
      t_max[axis] = (face - origin[axis]) / d;
      t_delta[axis] = -size / d;
    } else {
      step[axis] = 0;
      t_max[axis] = kInf;
      t_delta[axis] = kInf;
    }
  }
  while (true) {
    if (!visit(index)) return;
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (!(t_max[axis] <= 1.0)) return;
    index[axis] += step[axis];
    if (!config.Contains(index)) return;
    t_max[axis] += t_delta[axis];
  }
}

}  // namespace

std::vector<VoxelIndex> TraverseRay(const GridConfig& config, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& target) {
  std::vector<VoxelIndex> visited;
  Walk(config, origin, target, [&](const VoxelIndex& index) {
    visited.push_back(index);
    return true;
  });
  return visited;
}

OcclusionMask BuildOcclusionMask(const VoxelGrid& occupancy,
                                 const std::vector<Eigen::Vector3d>& origins) {
  const GridConfig& config = occupancy.config();
  if (origins.empty()) throw DomainError("at least one sensor origin is required");
  for (const auto& origin : origins) {
    if (!CenterToIndex(config, origin)) {
      throw DomainError("sensor origin outside the grid extent");
    }
  }
  const std::vector<VoxelIndex> targets = BoundaryVoxels(config);
  const std::size_t rays = targets.size() * origins.size();
  // One mask per worker, OR-reduced afterwards, so the result does not depend
  // on scheduling.
  std::vector<VoxelMask> partial(static_cast<std::size_t>(WorkerCount()),
                                 VoxelMask(config));
  ParallelFor(rays, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    auto visible = partial[worker].mutable_values();
    for (std::size_t r = begin; r < end; ++r) {
      const Eigen::Vector3d& origin = origins[r / targets.size()];
      const Eigen::Vector3d target = IndexToCenter(config, targets[r % targets.size()]);
      Walk(config, origin, target, [&](const VoxelIndex& index) {
        const std::size_t linear = config.LinearIndex(index);
        visible[linear] = 1;
        return !BlocksRay(occupancy.at(linear));
      });
    }
  });
  VoxelMask mask = partial.front();
  for (std::size_t w = 1; w < partial.size(); ++w) mask = mask.Or(partial[w]);
  return mask;
}

}  // namespace occtrack
