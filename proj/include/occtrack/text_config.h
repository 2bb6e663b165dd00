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

#ifndef OCCTRACK_TEXT_CONFIG_H_
#define OCCTRACK_TEXT_CONFIG_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "occtrack/voxel_grid.h"

namespace occtrack {

// Flat key-value text: one `key value...` entry per line. The key may be
// followed by ':' or '='. Values are whitespace separated; '#' starts a
// comment. Used for calibration, grid, class and pipeline configuration.
class KeyValueFile {
 public:
  static KeyValueFile Parse(std::istream& in);
  static KeyValueFile Load(const std::filesystem::path& path);

  bool Has(const std::string& key) const { return entries_.contains(key); }
  const std::vector<std::string>& Get(const std::string& key) const;
  std::string GetString(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  int GetInt(const std::string& key) const;
  // Throws FormatError unless exactly `count` values are present.
  std::vector<double> GetDoubles(const std::string& key, std::size_t count) const;
  std::vector<int> GetInts(const std::string& key) const;

  std::vector<std::string> Keys() const;
  int LineOf(const std::string& key) const;

 private:
  struct Entry {
    std::vector<std::string> values;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
};

// Keys: extent_min, extent_max, voxel_size (three floats each).
GridConfig GridConfigFromKeyValues(const KeyValueFile& file);
GridConfig LoadGridConfig(const std::filesystem::path& path);

// Keys: stuff, thing (integer class lists). Missing keys fall back to the
// default partition.
ClassPartition ClassPartitionFromKeyValues(const KeyValueFile& file);

}  // namespace occtrack

#endif  // OCCTRACK_TEXT_CONFIG_H_
