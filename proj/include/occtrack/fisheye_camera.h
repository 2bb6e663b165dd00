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

#ifndef OCCTRACK_FISHEYE_CAMERA_H_
#define OCCTRACK_FISHEYE_CAMERA_H_

#include <filesystem>
#include <optional>
#include <string>

#include "Eigen/Core"
#include "occtrack/voxel_grid.h"

namespace occtrack {

class KeyValueFile;

// Unified projection (MEI) intrinsics with Brown-Conrady distortion. Camera
// axes: x right, y down, z forward.
struct FisheyeIntrinsics {
  double xi = 0.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double u0 = 0.0;
  double v0 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  int width = 1;
  int height = 1;

  // Throws DomainError on non-positive focal lengths, empty images or xi < 0.
  void Validate() const;
  bool HasDistortion() const {
    return k1 != 0.0 || k2 != 0.0 || p1 != 0.0 || p2 != 0.0;
  }
  bool InImage(const Eigen::Vector2d& pixel) const {
    return pixel.x() >= 0.0 && pixel.x() < width && pixel.y() >= 0.0 &&
           pixel.y() < height;
  }
};

// Intrinsics plus the camera-to-ego mounting pose.
struct FisheyeCamera {
  std::string name;
  FisheyeIntrinsics intrinsics;
  Pose camera_to_ego;
};

// Point on the unit viewing sphere centred at the camera.
struct SpherePoint {
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
};

// sin(theta) / (cos(theta) + xi): distance from the principal axis on the
// undistorted normalized plane for a ray at incidence angle theta. Throws
// InvalidRayError when cos(theta) + xi <= 0.
double RadialRatio(double theta, double xi);

// 1 - a^2 (xi^2 - 1). Non-negative exactly when the radial ratio a has a real
// incidence angle.
double Discriminant(double a, double xi);

// Inverse of RadialRatio on the forward branch:
//   cos(theta) = (-a^2 xi + sqrt(delta)) / (a^2 + 1).
// Throws InfeasibleRadiusError when the discriminant is negative or a < 0.
double CosThetaFromRadialRatio(double a, double xi);

// sqrt(1 / (xi^2 - 1)), the largest feasible radial ratio. nullopt when
// xi <= 1: every finite ratio is then feasible.
std::optional<double> MaxRadialRatio(double xi);

// Brown-Conrady: radial (k1, k2) and tangential (p1, p2) terms on the
// normalized plane.
Eigen::Vector2d Distort(const Eigen::Vector2d& undistorted,
                        const FisheyeIntrinsics& intrinsics);

struct UndistortOptions {
  double tolerance = 1e-10;
  int max_iterations = 50;
};

// Fixed-point inversion of Distort, x <- x_d - residual(x), started at x_d.
// Stops once |Distort(x) - x_d| <= tolerance; throws ConvergenceError after
// max_iterations.
Eigen::Vector2d Undistort(const Eigen::Vector2d& distorted,
                          const FisheyeIntrinsics& intrinsics,
                          const UndistortOptions& options = {});

// Undistorted normalized-plane coordinates of a camera-frame point, or nullopt
// when the shifted depth z / |X| + xi is not positive. Throws DomainError for
// the zero vector.
std::optional<Eigen::Vector2d> ProjectToNormalizedPlane(const Eigen::Vector3d& point,
                                                        double xi);

// Distorts and applies the affine pixel mapping. No image bounds check.
Eigen::Vector2d NormalizedToPixel(const Eigen::Vector2d& undistorted,
                                  const FisheyeIntrinsics& intrinsics);

// Pixel of a camera-frame point, or nullopt when the ray is behind the shifted
// viewpoint or lands outside [0, width) x [0, height).
std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& point,
                                       const FisheyeIntrinsics& intrinsics);

// Unit viewing ray through a pixel: normalized plane, undistortion, polar
// form, radial rectification, forward-branch incidence angle.
SpherePoint Unproject(const Eigen::Vector2d& pixel,
                      const FisheyeIntrinsics& intrinsics,
                      const UndistortOptions& options = {});

// Unit ray for an undistorted normalized-plane point given directly in polar
// form (a, phi); a is rectified first.
SpherePoint SpherePointFromPolar(double a, double phi, double xi);

// Calibration text (see KeyValueFile): xi gamma1 gamma2 u0 v0 k1 k2 p1 p2
// width height, plus `extrinsic` as 12 floats (camera-to-ego [R|t]).
FisheyeCamera CameraFromKeyValues(const KeyValueFile& file);
FisheyeCamera LoadCalibration(const std::filesystem::path& path);
void WriteCalibration(const std::filesystem::path& path, const FisheyeCamera& camera);

}  // namespace occtrack

#endif  // OCCTRACK_FISHEYE_CAMERA_H_
