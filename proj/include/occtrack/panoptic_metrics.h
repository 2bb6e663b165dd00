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

#ifndef OCCTRACK_PANOPTIC_METRICS_H_
#define OCCTRACK_PANOPTIC_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "occtrack/voxel_grid.h"
#include "occtrack/voxel_mask.h"

namespace occtrack {

struct TrackedFrame {
  VoxelGrid panoptic;
  OcclusionMask occlusion;
  FovMask fov;
};

// Ground truth with its masks. Predictions are plain grid sequences.
using TrackedSequence = std::vector<TrackedFrame>;

// Occlusion AND FoV. Throws ShapeError when the lattices differ.
VoxelMask EvalMask(const TrackedFrame& frame);

struct SqResult {
  // IoU for every class seen in either sequence inside the evaluated region.
  std::map<std::uint16_t, double> per_class;
  // Mean over the stuff classes present in the ground truth.
  double overall = 0.0;
};

struct AqResult {
  // Mean track AQ per thing class that has at least one ground-truth track.
  std::map<std::uint16_t, double> per_class;
  // Mean over those classes.
  double overall = 0.0;
};

struct MetricReport {
  SqResult sq;
  AqResult aq;
  double stq = 0.0;
};

// Voxels count when inside EvalMask of the ground-truth frame and not
// labelled unknown in the ground truth. Throws ShapeError on frame count or
// lattice mismatch.
SqResult OccSq(const std::vector<VoxelGrid>& pred, const TrackedSequence& gt,
               const ClassPartition& classes);

// Tracks are (class, instance) pairs with a thing class and a non-zero
// instance, collected over the whole sequence. For a gt track g,
//   AQ(g) = 1/|g| * sum_p |p & g| * |p & g| / |p | g|
// with overlaps counted class-agnostically.
AqResult OccAq(const std::vector<VoxelGrid>& pred, const TrackedSequence& gt,
               const ClassPartition& classes);

double OccStq(double sq, double aq);

MetricReport Evaluate(const std::vector<VoxelGrid>& pred, const TrackedSequence& gt,
                      const ClassPartition& classes);

// Flat JSON object: occ_sq, occ_aq, occ_stq, sq/<class>, aq/<class>, with
// four decimals.
void WriteReport(std::ostream& out, const MetricReport& report);
void WriteReportFile(const std::filesystem::path& path, const MetricReport& report);

}  // namespace occtrack

#endif  // OCCTRACK_PANOPTIC_METRICS_H_
