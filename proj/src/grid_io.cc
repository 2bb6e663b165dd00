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

#include "occtrack/grid_io.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "occtrack/error.h"

namespace occtrack {
namespace {

constexpr std::string_view kGridMagic = "OTG1";
constexpr std::string_view kMaskMagic = "OTM1";
constexpr std::string_view kFieldMagic = "OTF1";

template <typename T>
void PutLittleEndian(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  U bits = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(bits & 0xFF);
    bits = static_cast<U>(bits >> 8);
  }
  out.write(bytes, sizeof(T));
}

template <typename T>
T GetLittleEndian(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError("unexpected end of file");
  }
  std::make_unsigned_t<T> bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) {
    bits = static_cast<std::make_unsigned_t<T>>((bits << 8) | bytes[i]);
  }
  return static_cast<T>(bits);
}

void PutDouble(std::ostream& out, double value) {
  PutLittleEndian(out, std::bit_cast<std::uint64_t>(value));
}
double GetDouble(std::istream& in) {
  return std::bit_cast<double>(GetLittleEndian<std::uint64_t>(in));
}
void PutFloat(std::ostream& out, float value) {
  PutLittleEndian(out, std::bit_cast<std::uint32_t>(value));
}
float GetFloat(std::istream& in) {
  return std::bit_cast<float>(GetLittleEndian<std::uint32_t>(in));
}

void WriteHeader(std::ostream& out, std::string_view magic,
                 const GridConfig& config) {
  out.write(magic.data(), 4);
  for (int i = 0; i < 3; ++i) {
    PutLittleEndian(out, static_cast<std::uint32_t>(config.dims()[i]));
  }
  for (int i = 0; i < 3; ++i) PutDouble(out, config.voxel_size()[i]);
  for (int i = 0; i < 3; ++i) PutDouble(out, config.extent_min()[i]);
}

GridConfig ReadHeader(std::istream& in, std::string_view magic) {
  char found[4];
  if (!in.read(found, 4)) throw FormatError("file too short for header");
  if (std::string_view(found, 4) != magic) {
    throw FormatError("bad magic: expected " + std::string(magic) + ", got '" +
                      std::string(found, 4) + "'");
  }
  VoxelIndex dims;
  for (int i = 0; i < 3; ++i) {
    const std::uint32_t d = GetLittleEndian<std::uint32_t>(in);
    if (d == 0 || d > (1u << 20)) throw FormatError("implausible grid dims");
    dims[i] = static_cast<int>(d);
  }
  Eigen::Vector3d voxel_size;
  Eigen::Vector3d extent_min;
  for (int i = 0; i < 3; ++i) voxel_size[i] = GetDouble(in);
  for (int i = 0; i < 3; ++i) extent_min[i] = GetDouble(in);
  try {
    return GridConfig::FromDims(extent_min, voxel_size, dims);
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid grid header: ") + e.what());
  }
}

void ExpectEnd(std::istream& in) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after payload");
  }
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path.string());
  return in;
}

template <typename Fn>
auto WithPath(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

void WriteGrid(std::ostream& out, const VoxelGrid& grid) {
  WriteHeader(out, kGridMagic, grid.config());
  for (const PanopticLabel& label : grid.labels()) {
    PutLittleEndian(out, label.semantic);
    PutLittleEndian(out, label.instance);
  }
  if (!out) throw FormatError("write failed");
}

VoxelGrid ReadGrid(std::istream& in) {
  const GridConfig config = ReadHeader(in, kGridMagic);
  std::vector<PanopticLabel> labels(config.num_voxels());
  for (PanopticLabel& label : labels) {
    label.semantic = GetLittleEndian<std::uint16_t>(in);
    label.instance = GetLittleEndian<std::uint32_t>(in);
  }
  ExpectEnd(in);
  return VoxelGrid(config, std::move(labels));
}

void WriteGridFile(const std::filesystem::path& path, const VoxelGrid& grid) {
  auto out = OpenOut(path);
  WriteGrid(out, grid);
}

VoxelGrid ReadGridFile(const std::filesystem::path& path) {
  return WithPath(path, [&] {
    auto in = OpenIn(path);
    return ReadGrid(in);
  });
}

void WriteMask(std::ostream& out, const VoxelMask& mask) {
  WriteHeader(out, kMaskMagic, mask.config());
  const auto values = mask.values();
  for (std::size_t start = 0; start < values.size(); start += 8) {
    std::uint8_t byte = 0;
    for (std::size_t bit = 0; bit < 8 && start + bit < values.size(); ++bit) {
      if (values[start + bit]) byte |= static_cast<std::uint8_t>(1u << bit);
    }
    PutLittleEndian(out, byte);
  }
  if (!out) throw FormatError("write failed");
}

VoxelMask ReadMask(std::istream& in) {
  const GridConfig config = ReadHeader(in, kMaskMagic);
  std::vector<std::uint8_t> values(config.num_voxels());
  for (std::size_t start = 0; start < values.size(); start += 8) {
    const auto byte = GetLittleEndian<std::uint8_t>(in);
    for (std::size_t bit = 0; bit < 8 && start + bit < values.size(); ++bit) {
      values[start + bit] = (byte >> bit) & 1u;
    }
  }
  ExpectEnd(in);
  return VoxelMask(config, std::move(values));
}

void WriteMaskFile(const std::filesystem::path& path, const VoxelMask& mask) {
  auto out = OpenOut(path);
  WriteMask(out, mask);
}

VoxelMask ReadMaskFile(const std::filesystem::path& path) {
  return WithPath(path, [&] {
    auto in = OpenIn(path);
    return ReadMask(in);
  });
}

void WriteField(std::ostream& out, const ScalarField& field) {
  WriteHeader(out, kFieldMagic, field.config);
  for (float v : field.values) PutFloat(out, v);
  if (!out) throw FormatError("write failed");
}

ScalarField ReadField(std::istream& in) {
  ScalarField field(ReadHeader(in, kFieldMagic));
  for (float& v : field.values) v = GetFloat(in);
  ExpectEnd(in);
  return field;
}

void WriteFieldFile(const std::filesystem::path& path, const ScalarField& field) {
  auto out = OpenOut(path);
  WriteField(out, field);
}

ScalarField ReadFieldFile(const std::filesystem::path& path) {
  return WithPath(path, [&] {
    auto in = OpenIn(path);
    return ReadField(in);
  });
}

std::vector<Pose> ReadPoses(std::istream& in) {
  std::vector<Pose> poses;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string token; fields >> token;) tokens.push_back(token);
    if (tokens.size() != 12) {
      throw FormatError("line " + std::to_string(line_number) +
                        ": expected 12 floats, got " +
                        std::to_string(tokens.size()));
    }
    std::array<double, 12> values{};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::size_t used = 0;
      try {
        values[i] = std::stod(tokens[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tokens[i].size()) {
        throw FormatError("line " + std::to_string(line_number) +
                          ": not a number: '" + tokens[i] + "'");
      }
    }
    poses.push_back(Pose::FromRowMajor(values));
  }
  return poses;
}

std::vector<Pose> ReadPoseFile(const std::filesystem::path& path) {
  return WithPath(path, [&] {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open");
    return ReadPoses(in);
  });
}

void WritePoses(std::ostream& out, const std::vector<Pose>& poses) {
  out << std::setprecision(17);
  for (const Pose& pose : poses) {
    const auto values = pose.ToRowMajor();
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << (i ? " " : "") << values[i];
    }
    out << '\n';
  }
}

void WritePoseFile(const std::filesystem::path& path, const std::vector<Pose>& poses) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  WritePoses(out, poses);
}

}  // namespace occtrack
