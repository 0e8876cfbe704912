// Copyright 2026 The pegsafe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEGSAFE_KEYVALUE_HPP_
#define PEGSAFE_KEYVALUE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pegsafe {

// Flat `key = value` text format shared by every config file.
//
//   # comment
//   top_level = 1
//   [env]
//   noise_sigma = 0.5      -> stored as "env.noise_sigma"
//
// Values are kept verbatim (trimmed); typed getters parse on access and throw
// InvalidConfig on malformed input. Keys are kept sorted so serialization is
// deterministic.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text,
                              const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma- or whitespace-separated numbers.
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;
  // Comma-separated items, trimmed; empty items dropped.
  std::vector<std::string> get_list(const std::string& key) const;

  // All entries whose key starts with "section.", with the prefix removed.
  KeyValueConfig section(const std::string& name) const;
  // Section names in order of first appearance in the key set.
  std::vector<std::string> section_names() const;

  // Copies every entry of `other` over this one.
  void merge(const KeyValueConfig& other);

  // Keys never read through a getter. Used to reject typos.
  std::vector<std::string> unused_keys() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Serializes with dotted keys grouped into [section] blocks.
  std::string to_string() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  std::string origin_ = "<string>";
  mutable std::set<std::string> used_;
};

}  // namespace pegsafe

#endif  // PEGSAFE_KEYVALUE_HPP_
