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

#include <random>

#include "gtest/gtest.h"
#include "occtrack/error.h"
#include "occtrack/occlusion_mask.h"
#include "test_support.h"

namespace occtrack {
namespace {

GridConfig Cube(int n, double size = 1.0) {
  return GridConfig::FromDims(Eigen::Vector3d::Zero(), Eigen::Vector3d::Constant(size),
                              VoxelIndex::Constant(n));
}

TEST(BoundaryVoxelsTest, Count) {
  for (int n : {1, 2, 3, 5, 8}) {
    const int inner = std::max(0, n - 2);
    EXPECT_EQ(BoundaryVoxels(Cube(n)).size(),
              static_cast<std::size_t>(n * n * n - inner * inner * inner));
  }
  const auto boundary = BoundaryVoxels(Cube(4));
  const GridConfig config = Cube(4);
  for (std::size_t i = 1; i < boundary.size(); ++i) {
    EXPECT_LT(config.LinearIndex(boundary[i - 1]), config.LinearIndex(boundary[i]));
  }
}

TEST(TraverseRayTest, AxisRay) {
  const auto cells = TraverseRay(Cube(5), Eigen::Vector3d(0.5, 2.5, 2.5), Eigen::Vector3d(4.5, 2.5, 2.5));
  ASSERT_EQ(cells.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(cells[i], VoxelIndex(i, 2, 2));
}

TEST(TraverseRayTest, ZeroLength) {
  const auto cells = TraverseRay(Cube(3), Eigen::Vector3d(1.5, 1.5, 1.5), Eigen::Vector3d(1.5, 1.5, 1.5));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0], VoxelIndex(1, 1, 1));
}

TEST(TraverseRayTest, CornerCrossingStepsXThenYThenZ) {
  const auto cells = TraverseRay(Cube(2), Eigen::Vector3d(0.5, 0.5, 0.5), Eigen::Vector3d(1.5, 1.5, 1.5));
  const std::vector<VoxelIndex> expected = {VoxelIndex(0, 0, 0), VoxelIndex(1, 0, 0),
                                            VoxelIndex(1, 1, 0), VoxelIndex(1, 1, 1)};
  EXPECT_EQ(cells, expected);
}

TEST(TraverseRayTest, OriginOutsideThrows) {
  EXPECT_THROW(TraverseRay(Cube(3), Eigen::Vector3d(-0.1, 1, 1), Eigen::Vector3d(1, 1, 1)),
               DomainError);
  EXPECT_THROW(BuildOcclusionMask(VoxelGrid(Cube(3)), {Eigen::Vector3d(5, 5, 5)}), DomainError);
  EXPECT_THROW(BuildOcclusionMask(VoxelGrid(Cube(3)), {}), DomainError);
}

// Cells a ray visits, sampled densely away from grazing corners; the
// traversal must contain each of them in the same order.
TEST(TraverseRayTest, ContainsDenseSamples) {
  const GridConfig config = Cube(12, 0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coordinate(0.01, 5.99);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector3d a(coordinate(rng), coordinate(rng), coordinate(rng));
    const Eigen::Vector3d b(coordinate(rng), coordinate(rng), coordinate(rng));
    const auto cells = TraverseRay(config, a, b);
    EXPECT_EQ(cells.front(), *CenterToIndex(config, a));
    EXPECT_EQ(cells.back(), *CenterToIndex(config, b));
    std::size_t cursor = 0;
    for (int k = 0; k <= 4000; ++k) {
      const auto cell = CenterToIndex(config, a + (b - a) * (k / 4000.0));
      while (cursor < cells.size() && cells[cursor] != *cell) ++cursor;
      ASSERT_LT(cursor, cells.size()) << "trial " << trial << " sample " << k;
    }
    for (std::size_t i = 1; i < cells.size(); ++i) {
      EXPECT_EQ((cells[i] - cells[i - 1]).cwiseAbs().sum(), 1);
    }
  }
}

TEST(OcclusionMaskTest, EmptyGridAllVisible) {
  EXPECT_TRUE(BuildOcclusionMask(VoxelGrid(Cube(6)), {Eigen::Vector3d(3.2, 2.9, 3.1)}).All());
}

TEST(OcclusionMaskTest, WallHidesVoxelsBehind) {
  const GridConfig config = Cube(9);
  VoxelGrid grid(config);
  for (int y = 0; y < 9; ++y) {
    for (int z = 0; z < 9; ++z) grid.at(VoxelIndex(6, y, z)) = PanopticLabel{11, 0};
  }
  // Off the lattice symmetry lines: from (2.5, 4.5, 4.5) the rays to the
  // wall's edge cells cross exact corners and the x-first tie enters the
  // neighbouring wall cell.
  const VoxelMask mask = BuildOcclusionMask(grid, {Eigen::Vector3d(2.3, 4.6, 4.45)});
  for (std::size_t i = 0; i < config.num_voxels(); ++i) {
    const int x = config.Unravel(i).x();
    EXPECT_EQ(mask[i], x <= 6) << "voxel " << config.Unravel(i).transpose();
  }
}

TEST(OcclusionMaskTest, UnknownDoesNotBlock) {
  const GridConfig config = Cube(9);
  VoxelGrid grid(config);
  for (int y = 0; y < 9; ++y) {
    for (int z = 0; z < 9; ++z) grid.at(VoxelIndex(6, y, z)) = PanopticLabel{255, 0};
  }
  EXPECT_TRUE(BuildOcclusionMask(grid, {Eigen::Vector3d(2.5, 4.5, 4.5)}).All());
}

TEST(OcclusionMaskTest, MoreOriginsNeverHideMore) {
  const GridConfig config = Cube(10, 0.5);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    VoxelGrid grid = testing::RandomOccupancy(config, 0.15, rng);
    const Eigen::Vector3d a(1.1, 2.3, 2.6), b(3.9, 1.2, 2.1);
    grid.at(*CenterToIndex(config, a)) = PanopticLabel{};
    grid.at(*CenterToIndex(config, b)) = PanopticLabel{};
    const VoxelMask one = BuildOcclusionMask(grid, {a});
    const VoxelMask both = BuildOcclusionMask(grid, {a, b});
    EXPECT_EQ(one.And(both), one);
    EXPECT_EQ(both, one.Or(BuildOcclusionMask(grid, {b})));
  }
}

TEST(OcclusionMaskTest, AddingOccupancyNeverRevealsVoxels) {
  const GridConfig config = Cube(10, 0.5);
  std::mt19937_64 rng(7);
  const Eigen::Vector3d origin(2.6, 2.4, 2.2);
  VoxelGrid grid = testing::RandomOccupancy(config, 0.05, rng);
  grid.at(*CenterToIndex(config, origin)) = PanopticLabel{};
  VoxelGrid denser = grid;
  std::bernoulli_distribution extra(0.1);
  for (std::size_t i = 0; i < config.num_voxels(); ++i) {
    if (extra(rng)) denser.at(i) = PanopticLabel{12, 0};
  }
  denser.at(*CenterToIndex(config, origin)) = PanopticLabel{};
  const VoxelMask sparse_mask = BuildOcclusionMask(grid, {origin});
  const VoxelMask dense_mask = BuildOcclusionMask(denser, {origin});
  EXPECT_EQ(dense_mask.And(sparse_mask), dense_mask);
}

// The mask against a dense march along the same boundary rays. Residual
// disagreement comes from rays grazing voxel edges.
TEST(OcclusionMaskTest, AgreesWithBoundaryRayMarch) {
  const GridConfig config = Cube(16, 0.5);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coordinate(1.0, 7.0);
  for (int trial = 0; trial < 4; ++trial) {
    VoxelGrid grid = testing::RandomOccupancy(config, 0.1, rng);
    const Eigen::Vector3d origin(coordinate(rng), coordinate(rng), coordinate(rng));
    grid.at(*CenterToIndex(config, origin)) = PanopticLabel{};
    const VoxelMask mask = BuildOcclusionMask(grid, {origin});
    const VoxelMask march = testing::MarchBoundaryRays(grid, origin, 0.01);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) agree += mask[i] == march[i];
    EXPECT_GE(static_cast<double>(agree) / mask.size(), 0.98);
  }
}

}  // namespace
}  // namespace occtrack
