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

#include "occtrack/fisheye_camera.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "occtrack/error.h"
#include "occtrack/spherical_lift.h"
#include "occtrack/text_config.h"

namespace occtrack {

void FisheyeIntrinsics::Validate() const {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) {
    throw DomainError("gamma1 and gamma2 must be positive");
  }
  if (width < 1 || height < 1) throw DomainError("image size must be >= 1");
  if (!(xi >= 0.0)) throw DomainError("xi must be non-negative");
  for (double v : {u0, v0, k1, k2, p1, p2}) {
    if (!std::isfinite(v)) throw DomainError("intrinsics must be finite");
  }
}

double RadialRatio(double theta, double xi) {
  const double denominator = std::cos(theta) + xi;
  if (!(denominator > 0.0)) {
    throw InvalidRayError("cos(theta) + xi <= 0: ray has no image");
  }
  return std::sin(theta) / denominator;
}

double Discriminant(double a, double xi) {
  return 1.0 - a * a * (xi * xi - 1.0);
}

double CosThetaFromRadialRatio(double a, double xi) {
  if (!(a >= 0.0)) throw InfeasibleRadiusError("radial ratio must be >= 0");
  const double delta = Discriminant(a, xi);
  if (delta < 0.0) {
    std::ostringstream msg;
    msg << "radial ratio " << a << " beyond feasible bound for xi=" << xi;
    throw InfeasibleRadiusError(msg.str());
  }
  const double a2 = a * a;
  return (-a2 * xi + std::sqrt(delta)) / (a2 + 1.0);
}

std::optional<double> MaxRadialRatio(double xi) {
  if (!(xi > 1.0)) return std::nullopt;
  return std::sqrt(1.0 / (xi * xi - 1.0));
}

Eigen::Vector2d Distort(const Eigen::Vector2d& undistorted,
                        const FisheyeIntrinsics& in) {
  const double x = undistorted.x();
  const double y = undistorted.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + in.k1 * r2 + in.k2 * r2 * r2;
  return Eigen::Vector2d(
      x * radial + 2.0 * in.p1 * x * y + in.p2 * (r2 + 2.0 * x * x),
      y * radial + in.p1 * (r2 + 2.0 * y * y) + 2.0 * in.p2 * x * y);
}

Eigen::Vector2d Undistort(const Eigen::Vector2d& distorted,
                          const FisheyeIntrinsics& intrinsics,
                          const UndistortOptions& options) {
  if (!distorted.allFinite()) throw DomainError("non-finite distorted point");
  if (!intrinsics.HasDistortion()) return distorted;
  Eigen::Vector2d estimate = distorted;
  for (int i = 0; i <= options.max_iterations; ++i) {
    const Eigen::Vector2d error = Distort(estimate, intrinsics) - distorted;
    if (!error.allFinite()) break;
    if (error.norm() <= options.tolerance) return estimate;
    // Equivalent to estimate = distorted - residual(estimate).
    estimate -= error;
  }
  std::ostringstream msg;
  msg << "undistortion did not converge for (" << distorted.transpose()
      << ") within " << options.max_iterations << " iterations";
  throw ConvergenceError(msg.str());
}

std::optional<Eigen::Vector2d> ProjectToNormalizedPlane(const Eigen::Vector3d& point,
                                                        double xi) {
  const double norm = point.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("cannot project a zero-length or non-finite point");
  }
  const Eigen::Vector3d ray = point / norm;
  const double shifted_depth = ray.z() + xi;
  if (!(shifted_depth > 0.0)) return std::nullopt;
  return Eigen::Vector2d(ray.x() / shifted_depth, ray.y() / shifted_depth);
}

Eigen::Vector2d NormalizedToPixel(const Eigen::Vector2d& undistorted,
                                  const FisheyeIntrinsics& intrinsics) {
  const Eigen::Vector2d d = Distort(undistorted, intrinsics);
  return Eigen::Vector2d(intrinsics.gamma1 * d.x() + intrinsics.u0,
                         intrinsics.gamma2 * d.y() + intrinsics.v0);
}

std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& point,
                                       const FisheyeIntrinsics& intrinsics) {
  const auto plane = ProjectToNormalizedPlane(point, intrinsics.xi);
  if (!plane) return std::nullopt;
  const Eigen::Vector2d pixel = NormalizedToPixel(*plane, intrinsics);
  if (!intrinsics.InImage(pixel)) return std::nullopt;
  return pixel;
}

namespace {

// Ray for an undistorted point (x, y) with radial ratio a = |(x, y)|. Uses
// sin(theta) = a_rect (cos(theta) + xi) and (cos phi, sin phi) = (x, y) / a,
// which avoids the cancellation of sqrt(1 - cos^2) near the axis.
SpherePoint LiftNormalized(double x, double y, double xi) {
  const double a = std::hypot(x, y);
  const RectifiedRatio rect = RectifyRadialRatio(a, xi);
  const double cos_theta = CosThetaFromRadialRatio(rect.value, xi);
  SpherePoint point;
  if (a == 0.0) {
    point.direction = Eigen::Vector3d(0.0, 0.0, cos_theta);
    point.direction.normalize();
    return point;
  }
  const double sin_theta = rect.value * (cos_theta + xi);
  point.direction = Eigen::Vector3d(sin_theta * x / a, sin_theta * y / a, cos_theta);
  return point;
}

}  // namespace

SpherePoint Unproject(const Eigen::Vector2d& pixel,
                      const FisheyeIntrinsics& intrinsics,
                      const UndistortOptions& options) {
  if (!pixel.allFinite()) throw DomainError("non-finite pixel");
  const Eigen::Vector2d distorted((pixel.x() - intrinsics.u0) / intrinsics.gamma1,
                                  (pixel.y() - intrinsics.v0) / intrinsics.gamma2);
  const Eigen::Vector2d undistorted = Undistort(distorted, intrinsics, options);
  return LiftNormalized(undistorted.x(), undistorted.y(), intrinsics.xi);
}

SpherePoint SpherePointFromPolar(double a, double phi, double xi) {
  if (!(a >= 0.0)) throw DomainError("radial ratio must be >= 0");
  return LiftNormalized(a * std::cos(phi), a * std::sin(phi), xi);
}

FisheyeCamera CameraFromKeyValues(const KeyValueFile& file) {
  FisheyeCamera camera;
  FisheyeIntrinsics& in = camera.intrinsics;
  in.xi = file.GetDouble("xi");
  in.gamma1 = file.GetDouble("gamma1");
  in.gamma2 = file.GetDouble("gamma2");
  in.u0 = file.GetDouble("u0");
  in.v0 = file.GetDouble("v0");
  in.k1 = file.GetDouble("k1");
  in.k2 = file.GetDouble("k2");
  in.p1 = file.GetDouble("p1");
  in.p2 = file.GetDouble("p2");
  in.width = file.GetInt("width");
  in.height = file.GetInt("height");
  try {
    in.Validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid intrinsics: ") + e.what());
  }
  const auto values = file.GetDoubles("extrinsic", 12);
  std::array<double, 12> extrinsic{};
  std::copy(values.begin(), values.end(), extrinsic.begin());
  camera.camera_to_ego = Pose::FromRowMajor(extrinsic);
  if (!camera.camera_to_ego.IsValid(1e-6)) {
    throw FormatError("extrinsic rotation is not a proper rotation");
  }
  if (file.Has("name")) camera.name = file.GetString("name");
  return camera;
}

FisheyeCamera LoadCalibration(const std::filesystem::path& path) {
  const KeyValueFile file = KeyValueFile::Load(path);
  try {
    FisheyeCamera camera = CameraFromKeyValues(file);
    if (camera.name.empty()) camera.name = path.stem().string();
    return camera;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteCalibration(const std::filesystem::path& path, const FisheyeCamera& camera) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  const FisheyeIntrinsics& in = camera.intrinsics;
  out << std::setprecision(17);
  if (!camera.name.empty()) out << "name " << camera.name << '\n';
  out << "xi " << in.xi << "\ngamma1 " << in.gamma1 << "\ngamma2 " << in.gamma2
      << "\nu0 " << in.u0 << "\nv0 " << in.v0 << "\nk1 " << in.k1 << "\nk2 "
      << in.k2 << "\np1 " << in.p1 << "\np2 " << in.p2 << "\nwidth " << in.width
      << "\nheight " << in.height << "\nextrinsic";
  for (double v : camera.camera_to_ego.ToRowMajor()) out << ' ' << v;
  out << '\n';
}

}  // namespace occtrack
