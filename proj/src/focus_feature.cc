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

#include "occtrack/focus_feature.h"

#include <algorithm>
#include <map>
#include <utility>

#include "occtrack/error.h"
#include "occtrack/parallel.h"

namespace occtrack {
namespace {

bool Labelled(const PanopticLabel& label) { return label.occupied() && !label.unknown(); }

int AxisOf(Direction d) { return static_cast<int>(d) / 2; }
int StepOf(Direction d) { return static_cast<int>(d) % 2 == 0 ? 1 : -1; }

}  // namespace

std::string DirectionName(Direction direction) {
  static const char* kNames[] = {"x+", "x-", "y+", "y-", "z+", "z-"};
  return kNames[static_cast<int>(direction)];
}

std::array<OffsetField, 6> DirectionalOffsets(const VoxelGrid& panoptic) {
  const GridConfig& config = panoptic.config();
  const VoxelIndex& dims = config.dims();
  std::array<OffsetField, 6> fields;
  for (Direction direction : kAllDirections) {
    OffsetField& field = fields[static_cast<int>(direction)];
    field.direction = direction;
    field.values.assign(config.num_voxels(), 0);
    const int axis = AxisOf(direction);
    const int step = StepOf(direction);
    const int u_axis = (axis + 1) % 3;
    const int v_axis = (axis + 2) % 3;
    const std::size_t lines = static_cast<std::size_t>(dims[u_axis]) * dims[v_axis];
    // Each scan line is independent.
    ParallelFor(lines, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t line = begin; line < end; ++line) {
        VoxelIndex index;
        index[u_axis] = static_cast<int>(line % dims[u_axis]);
        index[v_axis] = static_cast<int>(line / dims[u_axis]);
        std::int32_t run = 0;
        const PanopticLabel* previous = nullptr;
        for (int k = 0; k < dims[axis]; ++k) {
          index[axis] = step > 0 ? k : dims[axis] - 1 - k;
          const std::size_t linear = config.LinearIndex(index);
          const PanopticLabel& label = panoptic.at(linear);
          if (!Labelled(label)) {
            run = 0;
            previous = nullptr;
            continue;
          }
          run = (previous && *previous == label) ? run + 1 : 1;
          field.values[linear] = run;
          previous = &label;
        }
      }
    });
  }
  return fields;
}

Regions LabelRegions(const VoxelGrid& panoptic) {
  const GridConfig& config = panoptic.config();
  Regions regions;
  regions.id.assign(config.num_voxels(), -1);
  std::map<std::pair<std::uint16_t, std::uint32_t>, std::int32_t> instances;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < config.num_voxels(); ++i) {
    const PanopticLabel& label = panoptic.at(i);
    if (!Labelled(label) || regions.id[i] >= 0) continue;
    if (label.instance != 0) {
      const auto [it, inserted] =
          instances.emplace(std::make_pair(label.semantic, label.instance), regions.count);
      if (inserted) ++regions.count;
      regions.id[i] = it->second;
      continue;
    }
    // Flood fill over the 26-neighbourhood.
    const std::int32_t id = regions.count++;
    regions.id[i] = id;
    stack.assign(1, i);
    while (!stack.empty()) {
      const VoxelIndex at = config.Unravel(stack.back());
      stack.pop_back();
      for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const VoxelIndex next = at + VoxelIndex(dx, dy, dz);
            if (!config.Contains(next)) continue;
            const std::size_t n = config.LinearIndex(next);
            if (regions.id[n] >= 0 || !(panoptic.at(n) == label)) continue;
            regions.id[n] = id;
            stack.push_back(n);
          }
        }
      }
    }
  }
  return regions;
}

std::vector<double> FocusProduct(const std::array<OffsetField, 6>& offsets,
                                 const VoxelGrid& panoptic) {
  const std::size_t n = panoptic.config().num_voxels();
  for (const auto& field : offsets) {
    if (field.values.size() != n) throw ShapeError("offset field size mismatch");
  }
  std::vector<double> raw(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!Labelled(panoptic.at(i))) continue;
    double product = 1.0;
    for (const auto& field : offsets) product *= field.values[i];
    raw[i] = product;
  }
  return raw;
}

std::vector<double> InstanceNormalize(const std::vector<double>& raw,
                                      const VoxelGrid& panoptic, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (raw.size() != panoptic.config().num_voxels()) {
    throw ShapeError("focus field size mismatch");
  }
  const Regions regions = LabelRegions(panoptic);
  std::vector<double> peak(static_cast<std::size_t>(regions.count), 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (regions.id[i] >= 0) peak[regions.id[i]] = std::max(peak[regions.id[i]], raw[i]);
  }
  std::vector<double> normalized(raw.size(), 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (regions.id[i] >= 0) normalized[i] = raw[i] / (peak[regions.id[i]] + epsilon);
  }
  return normalized;
}

std::array<std::vector<double>, 6> NormalizeOffsets(
    const std::array<OffsetField, 6>& offsets, const VoxelGrid& panoptic) {
  const Regions regions = LabelRegions(panoptic);
  std::array<std::vector<double>, 6> result;
  for (int d = 0; d < 6; ++d) {
    const auto& values = offsets[d].values;
    std::vector<std::int32_t> peak(static_cast<std::size_t>(regions.count), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (regions.id[i] >= 0) peak[regions.id[i]] = std::max(peak[regions.id[i]], values[i]);
    }
    result[d].assign(values.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (regions.id[i] >= 0) {
        result[d][i] = static_cast<double>(values[i]) / peak[regions.id[i]];
      }
    }
  }
  return result;
}

FocusField ComputeFocus(const VoxelGrid& panoptic, double epsilon) {
  FocusField field;
  field.epsilon = epsilon;
  field.raw = FocusProduct(DirectionalOffsets(panoptic), panoptic);
  field.normalized = InstanceNormalize(field.raw, panoptic, epsilon);
  return field;
}

ScalarField ToScalarField(const GridConfig& config, const std::vector<double>& values) {
  if (values.size() != config.num_voxels()) throw ShapeError("field size mismatch");
  ScalarField field(config);
  std::transform(values.begin(), values.end(), field.values.begin(),
                 [](double v) { return static_cast<float>(v); });
  return field;
}

}  // namespace occtrack
