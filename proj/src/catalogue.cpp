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

#include "pegsafe/catalogue.hpp"

#include "pegsafe/errors.hpp"

namespace pegsafe::geometry {

namespace {

// Kept in sync with data/shapes.cfg.
constexpr const char* kBuiltinShapes = R"(
[tr]
kind = triangle
side = 82

[cir]
kind = circle
radius = 30

[rtr]
kind = reuleaux
width = 64
segments = 96

[trm]
kind = truncated_triangle
side = 82
cut = 16

[b-rtr]
kind = reuleaux
width = 64
segments = 96
scale = 1.25

[b-trm]
kind = truncated_triangle
side = 82
cut = 16
scale = 1.25
)";

}  // namespace

CrossSection shape_from_config(const KeyValueConfig& section) {
  const std::string kind = section.get_string("kind");
  const double scale = section.get_double("scale", 1.0);
  CrossSection shape = [&] {
    if (kind == "triangle") return equilateral_triangle(section.get_double("side"));
    if (kind == "circle") return CrossSection::circle(section.get_double("radius"));
    if (kind == "reuleaux") {
      return reuleaux_triangle(section.get_double("width"),
                               static_cast<int>(section.get_int("segments", 96)));
    }
    if (kind == "truncated_triangle") {
      return truncated_triangle(section.get_double("side"), section.get_double("cut"));
    }
    if (kind == "polygon") {
      const std::vector<double> xy = section.get_doubles("vertices", {});
      if (xy.size() % 2 != 0) throw InvalidShape("odd number of vertex coordinates");
      std::vector<Vec2> v;
      for (std::size_t i = 0; i < xy.size(); i += 2) v.emplace_back(xy[i], xy[i + 1]);
      return CrossSection::polygon(std::move(v));
    }
    throw InvalidConfig("unknown shape kind '" + kind + "'");
  }();
  if (scale != 1.0) shape = shape.scaled(scale);
  const auto unused = section.unused_keys();
  if (!unused.empty()) throw InvalidConfig("unknown shape key '" + unused.front() + "'");
  return shape;
}

ShapeCatalogue ShapeCatalogue::from_config(const KeyValueConfig& cfg) {
  ShapeCatalogue cat;
  for (const std::string& name : cfg.section_names()) {
    cat.shapes_.emplace(name, shape_from_config(cfg.section(name)));
  }
  for (const auto& [k, v] : cfg.entries()) {
    if (k.find('.') == std::string::npos) {
      throw InvalidConfig("shape catalogue entry '" + k + "' outside a [shape] section");
    }
  }
  return cat;
}

ShapeCatalogue ShapeCatalogue::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

const ShapeCatalogue& ShapeCatalogue::builtin() {
  static const ShapeCatalogue cat =
      from_config(KeyValueConfig::parse(kBuiltinShapes, "<builtin shapes>"));
  return cat;
}

const CrossSection& ShapeCatalogue::get(const std::string& name) const {
  const auto it = shapes_.find(name);
  if (it == shapes_.end()) throw InvalidConfig("unknown shape '" + name + "'");
  return it->second;
}

std::vector<std::string> ShapeCatalogue::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : shapes_) out.push_back(k);
  return out;
}

}  // namespace pegsafe::geometry
