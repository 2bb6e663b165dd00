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

#ifndef OCCTRACK_FOV_MASK_H_
#define OCCTRACK_FOV_MASK_H_

#include <vector>

#include "Eigen/Core"
#include "occtrack/fisheye_camera.h"
#include "occtrack/voxel_mask.h"

namespace occtrack {

// Largest radial ratio, per viewing azimuth, whose projection stays inside
// the image. Samples are evenly spaced over [0, 2 pi).
struct FovContour {
  struct Sample {
    double phi = 0.0;
    double a_rect = 0.0;
  };
  std::vector<Sample> samples;

  // Linear interpolation in phi with wrap-around.
  double RadiusAt(double phi) const;
};

struct FovContourOptions {
  int n_phi = 3600;
  double radial_tolerance = 1e-6;
};

// Radial start value: the feasible limit for xi > 1, otherwise a radius that
// projects beyond every image corner.
double ContourStartRadius(const FisheyeIntrinsics& intrinsics);

// Throws DomainError when n_phi < 8.
FovContour BuildFovContour(const FisheyeIntrinsics& intrinsics,
                           const FovContourOptions& options = {});

// Contour samples lifted to unit rays in the camera frame.
std::vector<Eigen::Vector3d> LiftContour(const FovContour& contour, double xi);

// True when the ego-frame point projects to a pixel of the camera.
bool VoxelInFov(const Eigen::Vector3d& center, const FisheyeCamera& camera);

struct FovMaskOptions {
  // Decide clear cases from the azimuth contour and only run the projection
  // test near its edge. The result is identical to the per-voxel test unless
  // guard_band is set to zero.
  bool use_contour = true;
  // Relative radial band around the contour that is re-checked per voxel.
  double guard_band = 0.01;
  FovContourOptions contour;
};

// OR over cameras of VoxelInFov at each voxel center. Throws DomainError with
// no cameras.
FovMask BuildFovMask(const GridConfig& config, const std::vector<FisheyeCamera>& cameras,
                     const FovMaskOptions& options = {});

// Per-voxel projection test, no fast path.
FovMask BuildFovMaskReference(const GridConfig& config,
                              const std::vector<FisheyeCamera>& cameras);

}  // namespace occtrack

#endif  // OCCTRACK_FOV_MASK_H_
