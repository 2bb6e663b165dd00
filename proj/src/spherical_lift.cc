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

#include "occtrack/spherical_lift.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "occtrack/error.h"
#include "occtrack/parallel.h"

namespace occtrack {

RectifiedRatio RectifyRadialRatio(double a, double xi) {
  RectifiedRatio result{a, RectifyClamp::kNone};
  if (!(xi > 1.0)) return result;
  const double cap = std::sqrt((1.0 + xi) / (xi - 1.0));
  const double limit = std::sqrt(1.0 / (xi * xi - 1.0));
  if (result.value > cap) result = {cap, RectifyClamp::kRadialCap};
  if (result.value > limit) result = {limit, RectifyClamp::kFeasibleLimit};
  // The rounded limit can sit an ulp past the true root.
  while (Discriminant(result.value, xi) < 0.0) {
    result = {std::nextafter(result.value, 0.0), RectifyClamp::kFeasibleLimit};
  }
  return result;
}

DepthBins::DepthBins(std::vector<double> depths) : depths_(std::move(depths)) {
  if (depths_.empty()) throw DomainError("depth bins must not be empty");
  for (std::size_t i = 0; i < depths_.size(); ++i) {
    if (!(depths_[i] > 0.0) || !std::isfinite(depths_[i])) {
      throw DomainError("depth bins must be positive and finite");
    }
    if (i > 0 && !(depths_[i] > depths_[i - 1])) {
      throw DomainError("depth bins must be strictly increasing");
    }
  }
}

DepthBins DepthBins::Uniform(double first, double last, double step) {
  if (!(step > 0.0)) throw DomainError("depth step must be positive");
  std::vector<double> depths;
  const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) depths.push_back(first + step * i);
  return DepthBins(std::move(depths));
}

DepthBins ReadDepthBins(std::istream& in) {
  std::vector<double> depths;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;
    std::size_t used = 0;
    double depth = 0.0;
    try {
      depth = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    std::string extra;
    if (used == 0 || used != token.size() || (tokens >> extra)) {
      throw FormatError("depth bins line " + std::to_string(line_number) +
                        ": expected one number");
    }
    depths.push_back(depth);
  }
  try {
    return DepthBins(std::move(depths));
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

DepthBins LoadDepthBins(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open: " + path.string());
  try {
    return ReadDepthBins(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

FrustumTable::FrustumTable(int rows, int cols, int bins, int stride)
    : rows_(rows),
      cols_(cols),
      bins_(bins),
      stride_(stride),
      points_(static_cast<std::size_t>(rows) * cols * bins, Eigen::Vector3d::Zero()),
      valid_(static_cast<std::size_t>(rows) * cols, 0) {}

std::size_t FrustumTable::CountValid() const {
  std::size_t count = 0;
  for (auto v : valid_) count += v;
  return count;
}

FrustumTable BuildFrustum(const FisheyeIntrinsics& intrinsics, const DepthBins& bins,
                          int stride, const UndistortOptions& options) {
  intrinsics.Validate();
  if (stride < 1 || intrinsics.width % stride != 0 ||
      intrinsics.height % stride != 0) {
    throw DomainError("stride must be >= 1 and divide the image size");
  }
  FrustumTable table(intrinsics.height / stride, intrinsics.width / stride,
                     static_cast<int>(bins.size()), stride);
  ParallelFor(static_cast<std::size_t>(table.rows()),
              [&](std::size_t begin, std::size_t end, std::size_t) {
    for (int row = static_cast<int>(begin); row < static_cast<int>(end); ++row) {
      for (int col = 0; col < table.cols(); ++col) {
        const Eigen::Vector2d pixel = table.PixelOf(row, col);
        const Eigen::Vector2d distorted(
            (pixel.x() - intrinsics.u0) / intrinsics.gamma1,
            (pixel.y() - intrinsics.v0) / intrinsics.gamma2);
        Eigen::Vector2d undistorted;
        try {
          undistorted = Undistort(distorted, intrinsics, options);
        } catch (const ConvergenceError&) {
          continue;
        }
        const double a = undistorted.norm();
        // A clamped ratio lies outside the imaged disc; no ray reaches it.
        if (RectifyRadialRatio(a, intrinsics.xi).clamp != RectifyClamp::kNone) {
          continue;
        }
        const double phi = std::atan2(undistorted.y(), undistorted.x());
        const Eigen::Vector3d ray =
            SpherePointFromPolar(a, phi, intrinsics.xi).direction;
        for (int bin = 0; bin < table.bins(); ++bin) {
          table.point(row, col, bin) = bins.depths()[bin] * ray;
        }
        table.set_valid(row, col, true);
      }
    }
  });
  return table;
}

namespace {

void PutU32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF),
                         static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t GetU32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw FormatError("unexpected end of frustum table");
  }
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void WriteFrustumTable(std::ostream& out, const FrustumTable& table) {
  out.write("OTL1", 4);
  PutU32(out, static_cast<std::uint32_t>(table.rows()));
  PutU32(out, static_cast<std::uint32_t>(table.cols()));
  PutU32(out, static_cast<std::uint32_t>(table.bins()));
  for (int row = 0; row < table.rows(); ++row) {
    for (int col = 0; col < table.cols(); ++col) {
      const char valid = table.valid(row, col) ? 1 : 0;
      for (int bin = 0; bin < table.bins(); ++bin) {
        const Eigen::Vector3d& p = table.point(row, col, bin);
        for (int i = 0; i < 3; ++i) {
          PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p[i])));
        }
        out.write(&valid, 1);
      }
    }
  }
  if (!out) throw FormatError("write failed");
}

void WriteFrustumTableFile(const std::filesystem::path& path,
                           const FrustumTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  WriteFrustumTable(out, table);
}

FrustumTable ReadFrustumTable(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "OTL1") {
    throw FormatError("bad frustum table magic");
  }
  const auto rows = static_cast<int>(GetU32(in));
  const auto cols = static_cast<int>(GetU32(in));
  const auto bins = static_cast<int>(GetU32(in));
  FrustumTable table(rows, cols, bins, 1);
  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      bool valid = false;
      for (int bin = 0; bin < bins; ++bin) {
        Eigen::Vector3d& p = table.point(row, col, bin);
        for (int i = 0; i < 3; ++i) p[i] = std::bit_cast<float>(GetU32(in));
        char flag = 0;
        if (!in.read(&flag, 1)) throw FormatError("unexpected end of frustum table");
        valid = flag != 0;
      }
      table.set_valid(row, col, valid);
    }
  }
  return table;
}

}  // namespace occtrack
