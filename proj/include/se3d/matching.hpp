// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "se3d/detection.hpp"

namespace se3d::matching {

/// How teacher predictions are filtered into soft targets.
enum class Strategy { kStuFilter, kNmsFilter, kGtFilter };

/// IoU flavor used for pairing; BEV is the default since matching feeds
/// BEV-pose consistency.
enum class IouMode { kBev, k3d };

struct MatchConfig {
  double tau_c = 0.3;  // confidence threshold on sigmoid scores
  double tau_i = 0.7;  // IoU threshold on candidate pairs
  Strategy strategy = Strategy::kStuFilter;
  IouMode iou_mode = IouMode::kBev;
  double nms_iou = 0.7;  // rotated-NMS threshold for the nms_filter variant
};

struct MatchedPair {
  int student_index = -1;  // index into the original student detections
  int teacher_index = -1;  // index into the original teacher detections
  double iou = 0.0;
};

// Filtered student<->teacher pairs. n_initial counts the candidate pairs
// formed after confidence filtering (one per surviving student box when
// any teacher box survives); n_final counts the pairs above tau_i.
struct MatchSet {
  std::vector<MatchedPair> pairs;
  int n_initial = 0;
  int n_final = 0;
};

// Core matching strategy: (1) drop boxes of both sets with score < tau_c,
// (2) drop candidate pairs with IoU <= tau_i, (3) pair each surviving
// student box with the teacher box of largest IoU (ties to the lowest
// teacher index). Dispatches on cfg.strategy; the gt_filter variant
// requires ground truths and is exposed separately.
MatchSet match_soft_targets(std::span<const Detection> student,
                            std::span<const Detection> teacher,
                            const MatchConfig& cfg);

/// Teacher boxes deduplicated by rotated NMS before pairing.
MatchSet match_nms_filter(std::span<const Detection> student,
                          std::span<const Detection> teacher,
                          const MatchConfig& cfg);

/// Teacher boxes kept only when they overlap (IoU > 0) some ground truth.
MatchSet match_gt_filter(std::span<const Detection> student,
                         std::span<const Detection> teacher,
                         std::span<const Box3D> gts, const MatchConfig& cfg);

// Greedy descending-score suppression using BEV IoU. Ties are broken
// toward the lower index; returns the kept indices in score order.
std::vector<int> rotated_nms(std::span<const Detection> dets,
                             double iou_thresh);

}  // namespace se3d::matching
