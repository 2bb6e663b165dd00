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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "occtrack/error.h"
#include "occtrack/fisheye_camera.h"
#include "occtrack/fov_mask.h"
#include "occtrack/spherical_lift.h"
#include "occtrack/text_config.h"
#include "test_support.h"

namespace occtrack {
namespace {

constexpr double kPi = std::numbers::pi;

FisheyeIntrinsics Pinhole(int size = 200, double focal = 100.0) {
  FisheyeIntrinsics in;
  in.xi = 0.0;
  in.gamma1 = in.gamma2 = focal;
  in.u0 = in.v0 = size / 2.0;
  in.width = in.height = size;
  return in;
}

TEST(RadialRatioTest, KnownValues) {
  EXPECT_NEAR(RadialRatio(kPi / 2, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(RadialRatio(kPi / 4, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(RadialRatio(kPi / 3, 2.0), std::sin(kPi / 3) / 2.5, 1e-15);
  EXPECT_THROW(RadialRatio(kPi, 0.5), InvalidRayError);
}

TEST(RadialRatioTest, DiscriminantAndLimit) {
  EXPECT_DOUBLE_EQ(Discriminant(0.5, 2.0), 1.0 - 0.25 * 3.0);
  EXPECT_FALSE(MaxRadialRatio(1.0).has_value());
  ASSERT_TRUE(MaxRadialRatio(2.0).has_value());
  EXPECT_NEAR(*MaxRadialRatio(2.0), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(Discriminant(*MaxRadialRatio(2.0), 2.0), 0.0, 1e-15);
  EXPECT_THROW(CosThetaFromRadialRatio(0.6, 2.0), InfeasibleRadiusError);
  EXPECT_THROW(CosThetaFromRadialRatio(-0.1, 2.0), InfeasibleRadiusError);
}

// Forward/backward consistency on a grid of angles and mirror parameters.
TEST(RadialRatioTest, InverseOnForwardBranch) {
  for (double xi : {0.0, 0.5, 1.0, 1.5, 3.0}) {
    const double theta_max = xi > 1.0 ? std::acos(-1.0 / xi) : (xi == 1.0 ? kPi - 1e-3 : kPi / 2);
    for (int i = 0; i <= 50; ++i) {
      const double theta = 0.98 * theta_max * i / 50.0;
      const double a = RadialRatio(theta, xi);
      EXPECT_NEAR(CosThetaFromRadialRatio(a, xi), std::cos(theta), 1e-9)
          << "xi " << xi << " theta " << theta;
    }
  }
}

TEST(RadialRatioTest, CosThetaMonotoneInRatio) {
  for (double xi : {0.3, 1.0, 2.0}) {
    double previous = 2.0;
    const double limit = MaxRadialRatio(xi).value_or(20.0);
    for (int i = 0; i <= 200; ++i) {
      const double c = CosThetaFromRadialRatio(limit * i / 200.0, xi);
      EXPECT_LE(c, previous + 1e-15);
      previous = c;
    }
  }
}

TEST(DistortionTest, RadialExample) {
  FisheyeIntrinsics in = Pinhole();
  in.k1 = 0.1;
  const Eigen::Vector2d d = Distort(Eigen::Vector2d(0.5, 0.0), in);
  EXPECT_NEAR(d.x(), 0.5125, 1e-15);
  EXPECT_NEAR(d.y(), 0.0, 1e-15);
}

TEST(DistortionTest, UndistortRoundTrip) {
  const FisheyeIntrinsics in = testing::CroppedFisheye();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> coordinate(-0.6, 0.6);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector2d x(coordinate(rng), coordinate(rng));
    EXPECT_LT((Undistort(Distort(x, in), in) - x).norm(), 1e-8);
  }
}

TEST(DistortionTest, ConvergenceFailureThrows) {
  FisheyeIntrinsics in = Pinhole();
  in.k1 = 5.0;
  EXPECT_THROW(Undistort(Eigen::Vector2d(3.0, 3.0), in), ConvergenceError);
}

TEST(ProjectionTest, PinholeAgreement) {
  const FisheyeIntrinsics in = Pinhole();
  const auto pixel = Project(Eigen::Vector3d(0.2, -0.3, 1.0), in);
  ASSERT_TRUE(pixel.has_value());
  EXPECT_NEAR(pixel->x(), 120.0, 1e-12);
  EXPECT_NEAR(pixel->y(), 70.0, 1e-12);
  EXPECT_FALSE(Project(Eigen::Vector3d(0, 0, -1), in).has_value());
  EXPECT_FALSE(Project(Eigen::Vector3d(5, 0, 1), in).has_value());
  EXPECT_THROW(ProjectToNormalizedPlane(Eigen::Vector3d::Zero(), 1.0), DomainError);
}

// Round trip through the pixel, with a tolerance derived from the undistort
// residual bound and the local slope of the inverse mapping.
TEST(ProjectionTest, DistortedRoundTrip) {
  const FisheyeIntrinsics in = testing::CroppedFisheye();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  int tested = 0;
  for (int i = 0; i < 2000 && tested < 300; ++i) {
    const Eigen::Vector3d ray = Eigen::Vector3d(uniform(rng), uniform(rng), uniform(rng)).normalized();
    // Beyond cos(theta) = -1 / xi the radial ratio decreases again and the
    // pixel belongs to a forward-branch ray.
    if (ray.z() < -1.0 / in.xi + 0.05) continue;
    const auto pixel = Project(ray, in);
    if (!pixel) continue;
    ++tested;
    const Eigen::Vector3d back = Unproject(*pixel, in).direction;
    // Residual 1e-10 on the normalized plane; d(theta)/da stays below 10 for
    // the cropped image.
    EXPECT_LT((back - ray).norm(), 1e-8);
  }
  EXPECT_GT(tested, 100);
}

TEST(ProjectionTest, UnprojectIsUnit) {
  const FisheyeIntrinsics in = testing::CroppedFisheye();
  for (int v = 0; v < in.height; v += 97) {
    for (int u = 0; u < in.width; u += 101) {
      EXPECT_NEAR(Unproject(Eigen::Vector2d(u, v), in).direction.norm(), 1.0, 1e-12);
    }
  }
}

TEST(CalibrationTest, RoundTripAndMissingKey) {
  testing::TempDir dir("calib");
  const FisheyeCamera camera = testing::SideCamera(true, testing::CroppedFisheye(), 1.0, 1.5);
  WriteCalibration(dir.path() / "left.txt", camera);
  const FisheyeCamera back = LoadCalibration(dir.path() / "left.txt");
  EXPECT_EQ(back.intrinsics.width, 1280);
  EXPECT_DOUBLE_EQ(back.intrinsics.k2, 0.01);
  EXPECT_TRUE(back.camera_to_ego.rotation.isApprox(camera.camera_to_ego.rotation));

  std::stringstream in("gamma1 1\ngamma2 1\nu0 0\nv0 0\nk1 0\nk2 0\np1 0\np2 0\n"
                       "width 10\nheight 10\nextrinsic 1 0 0 0 0 1 0 0 0 0 1 0\n");
  try {
    CameraFromKeyValues(KeyValueFile::Parse(in));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("xi"), std::string::npos) << e.what();
  }
}

TEST(IntrinsicsTest, Validate) {
  FisheyeIntrinsics in = Pinhole();
  EXPECT_NO_THROW(in.Validate());
  in.gamma1 = 0.0;
  EXPECT_THROW(in.Validate(), DomainError);
  in = Pinhole();
  in.xi = -0.1;
  EXPECT_THROW(in.Validate(), DomainError);
}

TEST(RectifyTest, Examples) {
  const RectifiedRatio inside = RectifyRadialRatio(0.3, 2.0);
  EXPECT_EQ(inside.clamp, RectifyClamp::kNone);
  EXPECT_DOUBLE_EQ(inside.value, 0.3);

  const RectifiedRatio beyond = RectifyRadialRatio(5.0, 2.0);
  EXPECT_EQ(beyond.clamp, RectifyClamp::kFeasibleLimit);
  EXPECT_NEAR(beyond.value, 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_GE(Discriminant(beyond.value, 2.0), 0.0);

  EXPECT_DOUBLE_EQ(RectifyRadialRatio(50.0, 0.8).value, 50.0);
  EXPECT_DOUBLE_EQ(RectifyRadialRatio(50.0, 1.0).value, 50.0);
}

TEST(RectifyTest, IdempotentAndFeasible) {
  for (double xi : {1.0001, 1.2, 2.0, 5.0, 30.0}) {
    for (double a : {0.0, 0.1, 0.5, 1.0, 3.0, 100.0}) {
      const double once = RectifyRadialRatio(a, xi).value;
      EXPECT_EQ(RectifyRadialRatio(once, xi).value, once);
      EXPECT_GE(Discriminant(once, xi), 0.0);
      EXPECT_NO_THROW(CosThetaFromRadialRatio(once, xi));
    }
  }
}

TEST(DepthBinsTest, UniformAndParsing) {
  EXPECT_EQ(DepthBins::Uniform(1.0, 45.0, 1.0).size(), 45u);
  EXPECT_THROW(DepthBins({2.0, 1.0}), DomainError);
  EXPECT_THROW(DepthBins({0.0, 1.0}), DomainError);
  std::stringstream in("# bins\n1.5\n\n3\n");
  EXPECT_EQ(ReadDepthBins(in).depths(), (std::vector<double>{1.5, 3.0}));
}

TEST(FrustumTest, PinholeTable) {
  const FisheyeIntrinsics in = Pinhole(64, 50.0);
  const FrustumTable table = BuildFrustum(in, DepthBins({1.0, 5.0}), 8);
  EXPECT_EQ(table.rows(), 8);
  EXPECT_EQ(table.cols(), 8);
  EXPECT_EQ(table.CountValid(), 64u);
  for (int r = 0; r < table.rows(); ++r) {
    for (int c = 0; c < table.cols(); ++c) {
      const Eigen::Vector2d pixel = table.PixelOf(r, c);
      const Eigen::Vector3d expected =
          Eigen::Vector3d((pixel.x() - 32.0) / 50.0, (pixel.y() - 32.0) / 50.0, 1.0).normalized();
      EXPECT_LT((table.point(r, c, 0) - expected).norm(), 1e-9);
      EXPECT_LT((table.point(r, c, 1) - 5.0 * expected).norm(), 1e-9);
    }
  }
  // Pixel (32, 32) sits on the principal point.
  EXPECT_LT((table.point(4, 4, 1) - Eigen::Vector3d(0, 0, 5)).norm(), 1e-12);
}

TEST(FrustumTest, StrideMustDivide) {
  EXPECT_THROW(BuildFrustum(Pinhole(64), DepthBins({1.0}), 7), DomainError);
  EXPECT_THROW(BuildFrustum(Pinhole(64), DepthBins({1.0}), 0), DomainError);
}

TEST(FrustumTest, ClampedPixelsInvalid) {
  // xi = 2, wide focal: image corners lie beyond the feasible ratio.
  FisheyeIntrinsics in = Pinhole(128, 40.0);
  in.xi = 2.0;
  const FrustumTable table = BuildFrustum(in, DepthBins({1.0}), 16);
  EXPECT_GT(table.CountValid(), 0u);
  EXPECT_LT(table.CountValid(), 64u);
  EXPECT_FALSE(table.valid(0, 0));
  EXPECT_EQ(table.point(0, 0, 0), Eigen::Vector3d::Zero());
}

TEST(FrustumTest, BinaryRoundTrip) {
  const FrustumTable table = BuildFrustum(testing::CroppedFisheye(), DepthBins({2.0, 4.0}), 160);
  std::stringstream buffer;
  WriteFrustumTable(buffer, table);
  EXPECT_EQ(buffer.str().size(), 16u + 6u * 8u * 2u * 13u);
  const FrustumTable back = ReadFrustumTable(buffer);
  ASSERT_EQ(back.rows(), table.rows());
  EXPECT_EQ(back.stride(), 1);
  for (int r = 0; r < table.rows(); ++r) {
    for (int c = 0; c < table.cols(); ++c) {
      EXPECT_EQ(back.valid(r, c), table.valid(r, c));
      EXPECT_LT((back.point(r, c, 1) - table.point(r, c, 1)).norm(), 1e-5);
    }
  }
}

TEST(FovContourTest, PinholeSquareImage) {
  // Undistorted pinhole: the contour is the image rectangle in normalized
  // coordinates.
  const FisheyeIntrinsics in = Pinhole(200, 100.0);
  const FovContour contour = BuildFovContour(in, {720, 1e-9});
  EXPECT_NEAR(contour.RadiusAt(0.0), 1.0, 1e-6);
  EXPECT_NEAR(contour.RadiusAt(kPi / 4), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(contour.RadiusAt(kPi / 2), 1.0, 1e-6);
  EXPECT_NEAR(contour.RadiusAt(2 * kPi - 1e-9), contour.RadiusAt(0.0), 1e-6);
}

TEST(FovContourTest, FullCircleUntruncated) {
  FisheyeIntrinsics in = Pinhole(2000, 100.0);
  in.xi = 2.0;
  const FovContour contour = BuildFovContour(in, {360, 1e-9});
  for (const auto& s : contour.samples) EXPECT_NEAR(s.a_rect, *MaxRadialRatio(2.0), 1e-6);
}

TEST(FovContourTest, HalfWidthCrop) {
  // Principal point on the left edge: rays with negative x are cut at zero.
  FisheyeIntrinsics in = Pinhole(200, 100.0);
  in.u0 = 0.0;
  const FovContour contour = BuildFovContour(in, {360, 1e-9});
  EXPECT_LT(contour.RadiusAt(kPi), 1e-6);
  EXPECT_NEAR(contour.RadiusAt(0.0), 2.0, 1e-6);
}

TEST(FovContourTest, LiftedRaysUnitAndInside) {
  const FisheyeIntrinsics in = testing::CroppedFisheye();
  const FovContour contour = BuildFovContour(in, {360, 1e-9});
  EXPECT_THROW(BuildFovContour(in, {4, 1e-6}), DomainError);
  for (const Eigen::Vector3d& ray : LiftContour(contour, in.xi)) {
    EXPECT_NEAR(ray.norm(), 1.0, 1e-12);
  }
}

GridConfig FovGrid() {
  return GridConfig::FromExtent(Eigen::Vector3d(-8, -8, -2), Eigen::Vector3d(8, 8, 2),
                                Eigen::Vector3d(0.5, 0.5, 0.5));
}

TEST(FovMaskTest, NoCamerasThrows) {
  EXPECT_THROW(BuildFovMask(FovGrid(), {}), DomainError);
}

TEST(FovMaskTest, MatchesReference) {
  const std::vector<FisheyeCamera> cameras = {
      testing::SideCamera(true, testing::CroppedFisheye(), 1.0, 1.5),
      testing::SideCamera(false, testing::CroppedFisheye(), 1.0, 1.5)};
  EXPECT_EQ(BuildFovMask(FovGrid(), cameras), BuildFovMaskReference(FovGrid(), cameras));
}

TEST(FovMaskTest, MonotoneUnderCameraAddition) {
  const FisheyeCamera left = testing::SideCamera(true, testing::CroppedFisheye(), 1.0, 1.5);
  const FisheyeCamera right = testing::SideCamera(false, testing::CroppedFisheye(), 1.0, 1.5);
  const VoxelMask one = BuildFovMask(FovGrid(), {left});
  const VoxelMask both = BuildFovMask(FovGrid(), {left, right});
  EXPECT_EQ(one.And(both), one);
  EXPECT_GT(both.Count(), one.Count());
}

TEST(FovMaskTest, GridBehindCameraIsEmpty) {
  FisheyeIntrinsics in = Pinhole(200, 100.0);
  FisheyeCamera camera;
  camera.intrinsics = in;
  // Camera looks along +x; the grid lies entirely at x < 0.
  camera.camera_to_ego.rotation = testing::AxesToRotation(
      Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(0, 0, -1), Eigen::Vector3d(1, 0, 0));
  const GridConfig behind = GridConfig::FromExtent(Eigen::Vector3d(-6, -3, -1),
                                                   Eigen::Vector3d(-1, 3, 1),
                                                   Eigen::Vector3d::Constant(0.5));
  EXPECT_EQ(BuildFovMask(behind, {camera}).Count(), 0u);
}

TEST(FovMaskTest, VoxelAtCameraCenterOutside) {
  const FisheyeCamera left = testing::SideCamera(true, testing::CroppedFisheye(), 1.0, 1.5);
  EXPECT_FALSE(VoxelInFov(left.camera_to_ego.translation, left));
  EXPECT_TRUE(VoxelInFov(Eigen::Vector3d(0, 5, 1.5), left));
}

}  // namespace
}  // namespace occtrack
