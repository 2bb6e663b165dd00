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

#include "occtrack/fov_mask.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "occtrack/error.h"
#include "occtrack/parallel.h"
#include "occtrack/spherical_lift.h"

namespace occtrack {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool PolarInImage(double a, double phi, const FisheyeIntrinsics& intrinsics) {
  const Eigen::Vector2d plane(a * std::cos(phi), a * std::sin(phi));
  return intrinsics.InImage(NormalizedToPixel(plane, intrinsics));
}

}  // namespace

double FovContour::RadiusAt(double phi) const {
  if (samples.empty()) return 0.0;
  const double step = kTwoPi / static_cast<double>(samples.size());
  double wrapped = std::fmod(phi, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  const double position = wrapped / step;
  const auto lower = static_cast<std::size_t>(position) % samples.size();
  const std::size_t upper = (lower + 1) % samples.size();
  const double w = position - std::floor(position);
  return (1.0 - w) * samples[lower].a_rect + w * samples[upper].a_rect;
}

double ContourStartRadius(const FisheyeIntrinsics& intrinsics) {
  if (const auto limit = MaxRadialRatio(intrinsics.xi)) return *limit;
  double radius = 0.0;
  for (double u : {0.0, static_cast<double>(intrinsics.width)}) {
    for (double v : {0.0, static_cast<double>(intrinsics.height)}) {
      radius = std::max(radius, std::hypot((u - intrinsics.u0) / intrinsics.gamma1,
                                           (v - intrinsics.v0) / intrinsics.gamma2));
    }
  }
  // Barrel distortion pulls points inward, so grow until the circle clears
  // the image in every direction.
  for (int i = 0; i < 40; ++i) {
    bool clear = true;
    for (int k = 0; k < 64 && clear; ++k) {
      clear = !PolarInImage(radius, kTwoPi * k / 64.0, intrinsics);
    }
    if (clear) break;
    radius *= 2.0;
  }
  return radius;
}

FovContour BuildFovContour(const FisheyeIntrinsics& intrinsics,
                           const FovContourOptions& options) {
  if (options.n_phi < 8) throw DomainError("n_phi must be >= 8");
  intrinsics.Validate();
  const double start = ContourStartRadius(intrinsics);
  FovContour contour;
  contour.samples.resize(static_cast<std::size_t>(options.n_phi));
  for (int k = 0; k < options.n_phi; ++k) {
    const double phi = kTwoPi * k / options.n_phi;
    double a = start;
    if (!PolarInImage(start, phi, intrinsics)) {
      double lo = 0.0;
      double hi = start;
      if (!PolarInImage(0.0, phi, intrinsics)) {
        hi = 0.0;
      }
      while (hi - lo > options.radial_tolerance) {
        const double mid = 0.5 * (lo + hi);
        (PolarInImage(mid, phi, intrinsics) ? lo : hi) = mid;
      }
      a = lo;
    }
    contour.samples[k] = {phi, RectifyRadialRatio(a, intrinsics.xi).value};
  }
  return contour;
}

std::vector<Eigen::Vector3d> LiftContour(const FovContour& contour, double xi) {
  std::vector<Eigen::Vector3d> rays;
  rays.reserve(contour.samples.size());
  for (const auto& s : contour.samples) {
    rays.push_back(SpherePointFromPolar(s.a_rect, s.phi, xi).direction);
  }
  return rays;
}

bool VoxelInFov(const Eigen::Vector3d& center, const FisheyeCamera& camera) {
  const Eigen::Vector3d local = camera.camera_to_ego.Inverse() * center;
  if (!(local.norm() > 0.0)) return false;
  return Project(local, camera.intrinsics).has_value();
}

FovMask BuildFovMaskReference(const GridConfig& config,
                              const std::vector<FisheyeCamera>& cameras) {
  FovMaskOptions options;
  options.use_contour = false;
  return BuildFovMask(config, cameras, options);
}

FovMask BuildFovMask(const GridConfig& config, const std::vector<FisheyeCamera>& cameras,
                     const FovMaskOptions& options) {
  if (cameras.empty()) throw DomainError("at least one camera is required");
  std::vector<FovContour> contours;
  std::vector<Pose> ego_to_camera;
  for (const auto& camera : cameras) {
    camera.intrinsics.Validate();
    ego_to_camera.push_back(camera.camera_to_ego.Inverse());
    if (options.use_contour) {
      contours.push_back(BuildFovContour(camera.intrinsics, options.contour));
    }
  }
  FovMask mask(config);
  auto values = mask.mutable_values();
  ParallelFor(config.num_voxels(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector3d center = IndexToCenter(config, config.Unravel(i));
      bool inside = false;
      for (std::size_t c = 0; c < cameras.size() && !inside; ++c) {
        if (!options.use_contour) {
          inside = VoxelInFov(center, cameras[c]);
          continue;
        }
        const Eigen::Vector3d local = ego_to_camera[c] * center;
        if (!(local.norm() > 0.0)) continue;
        const auto plane = ProjectToNormalizedPlane(local, cameras[c].intrinsics.xi);
        if (!plane) continue;
        const double a = plane->norm();
        const double radius =
            contours[c].RadiusAt(std::atan2(plane->y(), plane->x()));
        if (a < radius * (1.0 - options.guard_band)) {
          inside = true;
        } else if (a > radius * (1.0 + options.guard_band)) {
          inside = false;
        } else if (options.guard_band > 0.0) {
          inside = VoxelInFov(center, cameras[c]);
        } else {
          inside = a <= radius;
        }
      }
      values[i] = inside ? 1 : 0;
    }
  });
  return mask;
}

}  // namespace occtrack
