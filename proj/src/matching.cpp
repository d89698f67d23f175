// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#include "se3d/matching.hpp"

#include <algorithm>
#include <numeric>

namespace se3d::matching {
namespace {

double pair_iou(const Box3D& a, const Box3D& b, IouMode mode) {
  return mode == IouMode::kBev ? geom::iou_bev(a, b) : geom::iou_3d(a, b);
}

std::vector<int> confident_indices(std::span<const Detection> dets,
                                   double tau_c) {
  std::vector<int> kept;
  for (int i = 0; i < static_cast<int>(dets.size()); ++i) {
    if (dets[static_cast<std::size_t>(i)].score() >= tau_c) kept.push_back(i);
  }
  return kept;
}

MatchSet match_with_teacher_subset(std::span<const Detection> student,
                                   std::span<const Detection> teacher,
                                   const std::vector<int>& teacher_kept,
                                   const MatchConfig& cfg) {
  MatchSet out;
  const std::vector<int> student_kept = confident_indices(student, cfg.tau_c);
  if (student_kept.empty() || teacher_kept.empty()) return out;
  out.n_initial = static_cast<int>(student_kept.size());
  for (int si : student_kept) {
    double best_iou = -1.0;
    int best_t = -1;
    for (int ti : teacher_kept) {
      const double iou =
          pair_iou(student[static_cast<std::size_t>(si)].box,
                   teacher[static_cast<std::size_t>(ti)].box, cfg.iou_mode);
      if (iou > best_iou) {  // strict: ties keep the lowest teacher index
        best_iou = iou;
        best_t = ti;
      }
    }
    if (best_iou > cfg.tau_i) {
      out.pairs.push_back({si, best_t, best_iou});
    }
  }
  out.n_final = static_cast<int>(out.pairs.size());
  return out;
}

}  // namespace

std::vector<int> rotated_nms(std::span<const Detection> dets,
                             double iou_thresh) {
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dets[static_cast<std::size_t>(a)].logit >
           dets[static_cast<std::size_t>(b)].logit;
  });
  std::vector<int> kept;
  for (int idx : order) {
    bool suppressed = false;
    for (int k : kept) {
      if (geom::iou_bev(dets[static_cast<std::size_t>(idx)].box,
                        dets[static_cast<std::size_t>(k)].box) > iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

MatchSet match_soft_targets(std::span<const Detection> student,
                            std::span<const Detection> teacher,
                            const MatchConfig& cfg) {
  if (cfg.strategy == Strategy::kNmsFilter) {
    return match_nms_filter(student, teacher, cfg);
  }
  // gt_filter needs ground truths; callers use match_gt_filter directly.
  return match_with_teacher_subset(student, teacher,
                                   confident_indices(teacher, cfg.tau_c), cfg);
}

MatchSet match_nms_filter(std::span<const Detection> student,
                          std::span<const Detection> teacher,
                          const MatchConfig& cfg) {
  const std::vector<int> confident = confident_indices(teacher, cfg.tau_c);
  std::vector<Detection> subset;
  subset.reserve(confident.size());
  for (int i : confident) subset.push_back(teacher[static_cast<std::size_t>(i)]);
  std::vector<int> kept;
  for (int local : rotated_nms(subset, cfg.nms_iou)) {
    kept.push_back(confident[static_cast<std::size_t>(local)]);
  }
  std::sort(kept.begin(), kept.end());
  return match_with_teacher_subset(student, teacher, kept, cfg);
}

MatchSet match_gt_filter(std::span<const Detection> student,
                         std::span<const Detection> teacher,
                         std::span<const Box3D> gts, const MatchConfig& cfg) {
  std::vector<int> kept;
  for (int i : confident_indices(teacher, cfg.tau_c)) {
    for (const Box3D& gt : gts) {
      if (pair_iou(teacher[static_cast<std::size_t>(i)].box, gt,
                   cfg.iou_mode) > 0.0) {
        kept.push_back(i);
        break;
      }
    }
  }
  return match_with_teacher_subset(student, teacher, kept, cfg);
}

}  // namespace se3d::matching
