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

#include "occtrack/text_config.h"

#include <fstream>
#include <istream>
#include <sstream>

#include "occtrack/error.h"

namespace occtrack {
namespace {

double ParseDouble(const std::string& key, const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw FormatError("key '" + key + "': not a number: '" + token + "'");
  }
  return value;
}

int ParseInt(const std::string& key, const std::string& token) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw FormatError("key '" + key + "': not an integer: '" + token + "'");
  }
  return value;
}

}  // namespace

KeyValueFile KeyValueFile::Parse(std::istream& in) {
  KeyValueFile file;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream tokens(line);
    std::string key;
    if (!(tokens >> key)) continue;
    std::vector<std::string> values;
    if (!key.empty() && (key.back() == ':' || key.back() == '=')) key.pop_back();
    for (std::string token; tokens >> token;) {
      if (values.empty() && (token == ":" || token == "=")) continue;
      values.push_back(token);
    }
    if (key.empty()) {
      throw FormatError("line " + std::to_string(line_number) + ": empty key");
    }
    if (file.entries_.contains(key)) {
      throw FormatError("line " + std::to_string(line_number) +
                        ": duplicate key '" + key + "'");
    }
    file.entries_[key] = Entry{std::move(values), line_number};
  }
  return file;
}

KeyValueFile KeyValueFile::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open: " + path.string());
  try {
    return Parse(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

const std::vector<std::string>& KeyValueFile::Get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw FormatError("missing key '" + key + "'");
  return it->second.values;
}

std::string KeyValueFile::GetString(const std::string& key) const {
  const auto& values = Get(key);
  if (values.size() != 1) {
    throw FormatError("key '" + key + "': expected a single value");
  }
  return values.front();
}

double KeyValueFile::GetDouble(const std::string& key) const {
  return ParseDouble(key, GetString(key));
}

int KeyValueFile::GetInt(const std::string& key) const {
  return ParseInt(key, GetString(key));
}

std::vector<double> KeyValueFile::GetDoubles(const std::string& key,
                                             std::size_t count) const {
  const auto& values = Get(key);
  if (values.size() != count) {
    throw FormatError("key '" + key + "': expected " + std::to_string(count) +
                      " values, got " + std::to_string(values.size()));
  }
  std::vector<double> result;
  result.reserve(count);
  for (const auto& token : values) result.push_back(ParseDouble(key, token));
  return result;
}

std::vector<int> KeyValueFile::GetInts(const std::string& key) const {
  std::vector<int> result;
  for (const auto& token : Get(key)) result.push_back(ParseInt(key, token));
  return result;
}

std::vector<std::string> KeyValueFile::Keys() const {
  std::vector<std::string> keys;
  for (const auto& [key, entry] : entries_) keys.push_back(key);
  return keys;
}

int KeyValueFile::LineOf(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

GridConfig GridConfigFromKeyValues(const KeyValueFile& file) {
  const auto to_vec = [&](const std::string& key) {
    const auto v = file.GetDoubles(key, 3);
    return Eigen::Vector3d(v[0], v[1], v[2]);
  };
  return GridConfig::FromExtent(to_vec("extent_min"), to_vec("extent_max"),
                                to_vec("voxel_size"));
}

GridConfig LoadGridConfig(const std::filesystem::path& path) {
  return GridConfigFromKeyValues(KeyValueFile::Load(path));
}

ClassPartition ClassPartitionFromKeyValues(const KeyValueFile& file) {
  ClassPartition partition = ClassPartition::Default();
  const auto read = [&](const std::string& key, std::set<std::uint16_t>& out) {
    if (!file.Has(key)) return;
    out.clear();
    for (int c : file.GetInts(key)) {
      if (c <= 0 || c >= PanopticLabel::kUnknown) {
        throw FormatError("key '" + key + "': class id out of range: " +
                          std::to_string(c));
      }
      out.insert(static_cast<std::uint16_t>(c));
    }
  };
  read("stuff", partition.stuff);
  read("thing", partition.thing);
  for (auto c : partition.thing) {
    if (partition.stuff.contains(c)) {
      throw FormatError("class " + std::to_string(c) + " is both stuff and thing");
    }
  }
  return partition;
}

}  // namespace occtrack
