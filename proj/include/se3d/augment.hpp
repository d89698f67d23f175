// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "se3d/rng.hpp"
#include "se3d/scene.hpp"

namespace se3d::augment {

struct AugConfig {
  // Per-object operation probabilities: dropout, swap, sparsify.
  double p1 = 0.25;
  double p2 = 0.05;
  double p3 = 0.10;
  double sparsify_keep_ratio = 0.5;

  // Global scene transform ranges (uniform draws; zero width = identity).
  double global_rotation_range = 0.0;     // yaw in [-r, r]
  double global_translation_range = 0.0;  // per axis in [-t, t]
  double global_scale_min = 1.0;
  double global_scale_max = 1.0;
  double global_flip_prob = 0.0;

  // Per-object rigid perturbation ranges (zero = off).
  double local_rotation_range = 0.0;
  double local_translation_range = 0.0;

  std::uint64_t seed = 0;
};

// Face order +x, -x, +y, -y, +z, -z in box-canonical coordinates; ties go
// to the lowest face index, so the exact centroid lands in face 0.
constexpr int kNumFaces = 6;

/// Per-point pyramid (face) assignment for one object's points.
struct PyramidPartition {
  std::vector<int> face;
};

enum class OpKind { kDropout, kSwap, kSparsify, kLocal };
// op name "mixup" is reserved in the log format for ground-truth database
// sampling, which this toolkit does not implement.

struct AugOp {
  int object_id = 0;
  OpKind kind = OpKind::kDropout;
  int face = 0;
  int partner = -1;           // swap only
  std::uint64_t seed = 0;     // sub-seed for ops with internal randomness
};

// Everything needed to reproduce an augmented scene bit-exactly from the
// original: the global transform, the config values the ops depend on and
// the per-object op log.
struct AugRecord {
  geom::Transform global;
  double keep_ratio = 0.5;
  double local_rotation_range = 0.0;
  double local_translation_range = 0.0;
  std::vector<AugOp> ops;

  std::string serialize() const;
  static AugRecord parse(std::string_view text);
};

/// Indices of points inside the box (canonical coords within 1 + 1e-9).
std::vector<int> points_in_box(std::span<const ScenePoint> points,
                               const Box3D& box);

// Maps each point to the pyramid formed by the box centroid and one face.
// Throws PointOutsideBox when a normalized coordinate exceeds 1 + 1e-6.
PyramidPartition partition_pyramids(std::span<const ScenePoint> points,
                                    const Box3D& box);

/// Removes exactly the points of the chosen pyramid; order preserved.
std::vector<ScenePoint> dropout_pyramid(std::span<const ScenePoint> points,
                                        const PyramidPartition& partition,
                                        int face);

// Exchanges the same-face pyramids of two objects. Points travel through
// box-canonical coordinates, so they are re-scaled into the destination
// box's dimensions and pose.
std::pair<std::vector<ScenePoint>, std::vector<ScenePoint>> swap_pyramids(
    std::span<const ScenePoint> points_a, const Box3D& box_a,
    std::span<const ScenePoint> points_b, const Box3D& box_b, int face);

// Replaces the chosen pyramid's subset with ceil(keep_ratio * n) points
// selected by farthest point sampling; the FPS seed point is drawn from
// the given sub-seed.
std::vector<ScenePoint> sparsify_pyramid(std::span<const ScenePoint> points,
                                         const PyramidPartition& partition,
                                         int face, double keep_ratio,
                                         std::uint64_t seed);

// Greedy max-min-distance selection starting from seed_index. Returns k
// distinct indices; throws InvalidK when k or seed_index is out of range.
std::vector<int> farthest_point_sampling(std::span<const ScenePoint> points,
                                         int k, int seed_index);
std::vector<int> farthest_point_sampling_serial(
    std::span<const ScenePoint> points, int k, int seed_index);

/// Shape-aware augmentation only (dropout/swap/sparsify per object).
std::pair<Scene, AugRecord> shape_aware_augment(const Scene& scene,
                                                const AugConfig& cfg, Rng& rng);

/// Draws one global transform and applies it to all points and labels.
std::pair<Scene, geom::Transform> global_augment(const Scene& scene,
                                                 const AugConfig& cfg,
                                                 Rng& rng);

/// Full augmentation pipeline: global transform, then per-object local
/// perturbations, then shape-aware ops; one record covers it all.
std::pair<Scene, AugRecord> augment_scene(const Scene& scene,
                                          const AugConfig& cfg, Rng& rng);

/// Re-applies a record to the original scene; bit-exact reproduction.
Scene replay(const Scene& scene, const AugRecord& record);

}  // namespace se3d::augment
