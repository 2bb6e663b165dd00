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

#ifndef OCCTRACK_GRID_IO_H_
#define OCCTRACK_GRID_IO_H_

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "occtrack/voxel_grid.h"
#include "occtrack/voxel_mask.h"

// Binary layouts, all little-endian:
//
//   header  := magic[4] dims[3 x u32] voxel_size[3 x f64] extent_min[3 x f64]
//   OTG1    := header { semantic u16, instance u32 } per voxel
//   OTM1    := header, 1 bit per voxel, LSB-first, zero-padded final byte
//   OTF1    := header, f32 per voxel
//
// Voxels are in linear order (x fastest).

namespace occtrack {

void WriteGrid(std::ostream& out, const VoxelGrid& grid);
VoxelGrid ReadGrid(std::istream& in);
void WriteGridFile(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid ReadGridFile(const std::filesystem::path& path);

void WriteMask(std::ostream& out, const VoxelMask& mask);
VoxelMask ReadMask(std::istream& in);
void WriteMaskFile(const std::filesystem::path& path, const VoxelMask& mask);
VoxelMask ReadMaskFile(const std::filesystem::path& path);

void WriteField(std::ostream& out, const ScalarField& field);
ScalarField ReadField(std::istream& in);
void WriteFieldFile(const std::filesystem::path& path, const ScalarField& field);
ScalarField ReadFieldFile(const std::filesystem::path& path);

// One pose per line, 12 whitespace-separated floats (row-major [R|t]). Blank
// lines and lines starting with '#' are skipped. Throws FormatError naming the
// offending line.
std::vector<Pose> ReadPoses(std::istream& in);
std::vector<Pose> ReadPoseFile(const std::filesystem::path& path);
void WritePoses(std::ostream& out, const std::vector<Pose>& poses);
void WritePoseFile(const std::filesystem::path& path, const std::vector<Pose>& poses);

}  // namespace occtrack

#endif  // OCCTRACK_GRID_IO_H_
