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

#ifndef OCCTRACK_SPHERICAL_LIFT_H_
#define OCCTRACK_SPHERICAL_LIFT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "Eigen/Core"
#include "occtrack/fisheye_camera.h"

namespace occtrack {

enum class RectifyClamp {
  kNone,
  // sqrt((1 + xi) / (xi - 1)), the nominal cap on the radial ratio.
  kRadialCap,
  // sqrt(1 / (xi^2 - 1)), the discriminant root. Always the tighter of the two.
  kFeasibleLimit,
};

struct RectifiedRatio {
  double value = 0.0;
  RectifyClamp clamp = RectifyClamp::kNone;
};

// Clamps a radial ratio so the incidence angle has a real solution. For
// xi <= 1 the ratio is returned unchanged. The result always satisfies
// Discriminant(value, xi) >= 0 in floating point.
RectifiedRatio RectifyRadialRatio(double a, double xi);

// Strictly increasing positive depths in meters.
class DepthBins {
 public:
  explicit DepthBins(std::vector<double> depths);
  // Uniform bins: first, first + step, ... up to and including last.
  static DepthBins Uniform(double first, double last, double step);

  const std::vector<double>& depths() const { return depths_; }
  std::size_t size() const { return depths_.size(); }

 private:
  std::vector<double> depths_;
};

// One depth per line; '#' comments and blank lines allowed.
DepthBins ReadDepthBins(std::istream& in);
DepthBins LoadDepthBins(const std::filesystem::path& path);

// Per feature pixel, per depth bin, a camera-frame 3D point.
class FrustumTable {
 public:
  FrustumTable(int rows, int cols, int bins, int stride);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int bins() const { return bins_; }
  int stride() const { return stride_; }

  // Image pixel sampled by feature cell (row, col).
  Eigen::Vector2d PixelOf(int row, int col) const {
    return Eigen::Vector2d(static_cast<double>(col) * stride_,
                           static_cast<double>(row) * stride_);
  }

  const Eigen::Vector3d& point(int row, int col, int bin) const {
    return points_[Offset(row, col, bin)];
  }
  Eigen::Vector3d& point(int row, int col, int bin) {
    return points_[Offset(row, col, bin)];
  }
  bool valid(int row, int col) const { return valid_[row * cols_ + col] != 0; }
  void set_valid(int row, int col, bool v) { valid_[row * cols_ + col] = v ? 1 : 0; }
  std::size_t CountValid() const;

 private:
  std::size_t Offset(int row, int col, int bin) const {
    return (static_cast<std::size_t>(row) * cols_ + col) * bins_ + bin;
  }

  int rows_;
  int cols_;
  int bins_;
  int stride_;
  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint8_t> valid_;
};

// Lifts every stride-th pixel onto the unit sphere and scales the ray by each
// depth bin. Pixels whose undistortion fails, or whose radial ratio had to be
// clamped, are marked invalid and carry zero points. Throws DomainError
// unless stride >= 1 divides both image dimensions.
FrustumTable BuildFrustum(const FisheyeIntrinsics& intrinsics, const DepthBins& bins,
                          int stride = 16, const UndistortOptions& options = {});

// "OTL1", rows u32, cols u32, bins u32, then per (row, col, bin) entry
// x, y, z as f32 followed by a u8 validity flag. Little-endian.
void WriteFrustumTable(std::ostream& out, const FrustumTable& table);
void WriteFrustumTableFile(const std::filesystem::path& path, const FrustumTable& table);
// Stride is not stored; the returned table reports stride 1.
FrustumTable ReadFrustumTable(std::istream& in);

}  // namespace occtrack

#endif  // OCCTRACK_SPHERICAL_LIFT_H_
