// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>

#include "se3d/scene.hpp"

namespace se3d::pipeline {

// Voxel grid specification. Defaults follow the common LiDAR detection
// ranges [0, 70.4] x [-40, 40] x [-3, 1] at resolution [0.05, 0.05, 0.1],
// i.e. 1408 x 1600 x 40 cells.
struct VoxelSpec {
  Vec3 range_min{0.0, -40.0, -3.0};
  Vec3 range_max{70.4, 40.0, 1.0};
  Vec3 resolution{0.05, 0.05, 0.1};

  std::array<std::int64_t, 3> dims() const;
  std::int64_t linear_index(std::int64_t ix, std::int64_t iy,
                            std::int64_t iz) const;
};

/// Per-cell feature: mean 3D coordinates plus point count.
struct VoxelFeature {
  Vec3 mean{};
  std::int64_t count = 0;
};

struct VoxelGrid {
  VoxelSpec spec;
  std::unordered_map<std::int64_t, VoxelFeature> cells;
};

// Cell index of a point, or nullopt when it lies outside the ranges.
// index = floor((p - range_min) / resolution) with a small epsilon so
// exact-boundary coordinates land in the upper cell; the top boundary
// clamps into the last cell.
std::optional<std::array<std::int64_t, 3>> voxel_index_of(
    const VoxelSpec& spec, double x, double y, double z);

// Voxelization. The parallel variant computes cell indices concurrently
// and accumulates in point order, so its output matches the serial
// reference bit for bit.
VoxelGrid voxelize(std::span<const ScenePoint> points, const VoxelSpec& spec);
VoxelGrid voxelize_serial(std::span<const ScenePoint> points,
                          const VoxelSpec& spec);

}  // namespace se3d::pipeline
