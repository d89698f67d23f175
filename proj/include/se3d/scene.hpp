// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "se3d/geom.hpp"

namespace se3d {

struct ScenePoint {
  double x = 0.0, y = 0.0, z = 0.0;
  double intensity = 0.0;

  Vec3 xyz() const { return {x, y, z}; }
};

/// Ground-truth object: box in LiDAR frame plus the metadata used by
/// difficulty bucketing.
struct ObjectLabel {
  std::string klass = "Car";
  Box3D box;
  double truncation = 0.0;
  int occlusion = 0;
  double bbox_height_px = 0.0;
};

struct Scene {
  std::vector<ScenePoint> points;
  std::vector<ObjectLabel> labels;
};

// Native interchange format: one record per line,
//   P <x> <y> <z> <intensity>
//   L <class> <cx> <cy> <cz> <w> <l> <h> <r> <trunc> <occ> <bboxh>
// Numbers are written in shortest round-trip form so that a parse/write
// cycle is byte-stable.
std::string scene_to_text(const Scene& scene);
Scene scene_from_text(std::string_view text);
void write_scene_text(const Scene& scene, const std::filesystem::path& path);
Scene read_scene_text(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

}  // namespace se3d
