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

#ifndef PEGSAFE_CATALOGUE_HPP_
#define PEGSAFE_CATALOGUE_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pegsafe/geometry.hpp"
#include "pegsafe/keyvalue.hpp"

namespace pegsafe::geometry {

// Named peg shapes. The built-in set (tr, cir, rtr, trm, b-rtr, b-trm) is
// compiled in and mirrors data/shapes.cfg.
class ShapeCatalogue {
 public:
  static ShapeCatalogue from_config(const KeyValueConfig& cfg);
  static ShapeCatalogue load(const std::filesystem::path& path);
  static const ShapeCatalogue& builtin();

  bool has(const std::string& name) const { return shapes_.count(name) > 0; }
  // Throws InvalidConfig for unknown names.
  const CrossSection& get(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, CrossSection> shapes_;
};

// Builds one shape from a catalogue section (kind, dimensions, scale).
CrossSection shape_from_config(const KeyValueConfig& section);

}  // namespace pegsafe::geometry

#endif  // PEGSAFE_CATALOGUE_HPP_
