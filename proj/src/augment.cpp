// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#include "se3d/augment.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "se3d/errors.hpp"

namespace se3d::augment {
namespace {

constexpr double kInBoxMargin = 1e-9;
constexpr double kPartitionMargin = 1e-6;

Vec3 to_canonical(const Box3D& box, const Vec3& p) {
  const double c = std::cos(box.r);
  const double s = std::sin(box.r);
  const double dx = p.x - box.cx;
  const double dy = p.y - box.cy;
  return {(dx * c + dy * s) * 2.0 / box.l, (-dx * s + dy * c) * 2.0 / box.w,
          (p.z - box.cz) * 2.0 / box.h};
}

Vec3 from_canonical(const Box3D& box, const Vec3& u) {
  const double c = std::cos(box.r);
  const double s = std::sin(box.r);
  const double lx = u.x * 0.5 * box.l;
  const double ly = u.y * 0.5 * box.w;
  return {box.cx + lx * c - ly * s, box.cy + lx * s + ly * c,
          box.cz + u.z * 0.5 * box.h};
}

int face_of(const Vec3& u) {
  const double score[kNumFaces] = {u.x, -u.x, u.y, -u.y, u.z, -u.z};
  int best = 0;
  for (int f = 1; f < kNumFaces; ++f) {
    if (score[f] > score[best]) best = f;
  }
  return best;
}

std::vector<int> subset_of_face(const PyramidPartition& partition, int face) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(partition.face.size()); ++i) {
    if (partition.face[static_cast<std::size_t>(i)] == face) idx.push_back(i);
  }
  return idx;
}

void erase_indices(std::vector<ScenePoint>& points,
                   const std::vector<int>& sorted_dead) {
  if (sorted_dead.empty()) return;
  std::vector<ScenePoint> kept;
  kept.reserve(points.size());
  std::size_t d = 0;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    while (d < sorted_dead.size() && sorted_dead[d] < i) ++d;
    if (d < sorted_dead.size() && sorted_dead[d] == i) continue;
    kept.push_back(points[static_cast<std::size_t>(i)]);
  }
  points.swap(kept);
}

std::vector<ScenePoint> gather(std::span<const ScenePoint> points,
                               const std::vector<int>& idx) {
  std::vector<ScenePoint> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(points[static_cast<std::size_t>(i)]);
  return out;
}

ScenePoint remap_point(const ScenePoint& p, const Box3D& from,
                       const Box3D& to) {
  const Vec3 u = to_canonical(from, p.xyz());
  const Vec3 q = from_canonical(to, u);
  return {q.x, q.y, q.z, p.intensity};
}

void apply_global_to_scene(Scene& scene, const geom::Transform& t) {
  if (t.is_identity()) return;
  for (ScenePoint& p : scene.points) {
    const Vec3 q = geom::apply_transform(t, p.xyz());
    p.x = q.x;
    p.y = q.y;
    p.z = q.z;
  }
  for (ObjectLabel& lab : scene.labels) {
    lab.box = geom::apply_transform(t, lab.box);
  }
}

// Deterministic sub-generator for ops carrying their own seed.
Rng sub_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Applies one logged op to the scene in place. Execution and replay both
// go through here, which is what makes replay bit-exact.
void apply_op(Scene& scene, const AugOp& op, const AugRecord& record) {
  const auto oid = static_cast<std::size_t>(op.object_id);
  if (oid >= scene.labels.size()) {
    throw ParseError("augmentation op references unknown object " +
                     std::to_string(op.object_id));
  }
  const Box3D box = scene.labels[oid].box;
  const std::vector<int> obj_idx = points_in_box(scene.points, box);
  const std::vector<ScenePoint> obj_pts = gather(scene.points, obj_idx);

  switch (op.kind) {
    case OpKind::kDropout: {
      const PyramidPartition part = partition_pyramids(obj_pts, box);
      std::vector<int> dead;
      for (int local : subset_of_face(part, op.face)) {
        dead.push_back(obj_idx[static_cast<std::size_t>(local)]);
      }
      std::sort(dead.begin(), dead.end());
      erase_indices(scene.points, dead);
      break;
    }
    case OpKind::kSwap: {
      const auto pid = static_cast<std::size_t>(op.partner);
      if (pid >= scene.labels.size()) {
        throw ParseError("swap references unknown partner " +
                         std::to_string(op.partner));
      }
      const Box3D partner_box = scene.labels[pid].box;
      const std::vector<int> partner_idx =
          points_in_box(scene.points, partner_box);
      const std::vector<ScenePoint> partner_pts =
          gather(scene.points, partner_idx);
      const PyramidPartition part_a = partition_pyramids(obj_pts, box);
      const PyramidPartition part_b =
          partition_pyramids(partner_pts, partner_box);
      std::vector<int> dead;
      std::vector<ScenePoint> incoming;
      for (int local : subset_of_face(part_b, op.face)) {
        dead.push_back(partner_idx[static_cast<std::size_t>(local)]);
        incoming.push_back(
            remap_point(partner_pts[static_cast<std::size_t>(local)],
                        partner_box, box));
      }
      for (int local : subset_of_face(part_a, op.face)) {
        dead.push_back(obj_idx[static_cast<std::size_t>(local)]);
        incoming.push_back(remap_point(
            obj_pts[static_cast<std::size_t>(local)], box, partner_box));
      }
      std::sort(dead.begin(), dead.end());
      erase_indices(scene.points, dead);
      scene.points.insert(scene.points.end(), incoming.begin(),
                          incoming.end());
      break;
    }
    case OpKind::kSparsify: {
      const PyramidPartition part = partition_pyramids(obj_pts, box);
      const std::vector<int> subset = subset_of_face(part, op.face);
      if (subset.empty()) break;
      const std::vector<ScenePoint> subset_pts = gather(obj_pts, subset);
      const int n = static_cast<int>(subset_pts.size());
      const int k = std::max(
          1, static_cast<int>(std::ceil(record.keep_ratio * n)));
      Rng r = sub_rng(op.seed);
      const int seed_index = r.uniform_int(n);
      std::vector<int> kept_local =
          farthest_point_sampling(subset_pts, std::min(k, n), seed_index);
      std::sort(kept_local.begin(), kept_local.end());
      std::vector<int> dead;
      std::size_t ki = 0;
      for (int si = 0; si < n; ++si) {
        if (ki < kept_local.size() && kept_local[ki] == si) {
          ++ki;
          continue;
        }
        const int local = subset[static_cast<std::size_t>(si)];
        dead.push_back(obj_idx[static_cast<std::size_t>(local)]);
      }
      std::sort(dead.begin(), dead.end());
      erase_indices(scene.points, dead);
      break;
    }
    case OpKind::kLocal: {
      Rng r = sub_rng(op.seed);
      const double rot = r.uniform(-record.local_rotation_range,
                                   record.local_rotation_range);
      const double tr = record.local_translation_range;
      const Vec3 t = {r.uniform(-tr, tr), r.uniform(-tr, tr),
                      r.uniform(-tr, tr)};
      const double c = std::cos(rot);
      const double s = std::sin(rot);
      for (int idx : obj_idx) {
        ScenePoint& p = scene.points[static_cast<std::size_t>(idx)];
        const double dx = p.x - box.cx;
        const double dy = p.y - box.cy;
        p.x = box.cx + dx * c - dy * s + t.x;
        p.y = box.cy + dx * s + dy * c + t.y;
        p.z += t.z;
      }
      ObjectLabel& lab = scene.labels[oid];
      lab.box.cx += t.x;
      lab.box.cy += t.y;
      lab.box.cz += t.z;
      lab.box.r = normalize_angle(lab.box.r + rot);
      break;
    }
  }
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kDropout: return "dropout";
    case OpKind::kSwap: return "swap";
    case OpKind::kSparsify: return "sparsify";
    case OpKind::kLocal: return "local";
  }
  return "?";
}

OpKind op_kind_from(std::string_view name) {
  if (name == "dropout") return OpKind::kDropout;
  if (name == "swap") return OpKind::kSwap;
  if (name == "sparsify") return OpKind::kSparsify;
  if (name == "local") return OpKind::kLocal;
  throw ParseError("unknown augmentation op '" + std::string(name) + "'");
}

double field_double(std::string_view field, std::string_view key) {
  if (field.substr(0, key.size()) != key || field[key.size()] != '=') {
    throw ParseError("augmentation log: expected " + std::string(key) +
                     "=... got '" + std::string(field) + "'");
  }
  const std::string_view val = field.substr(key.size() + 1);
  double v = 0.0;
  const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
  if (res.ec != std::errc()) {
    throw ParseError("augmentation log: bad value '" + std::string(field) +
                     "'");
  }
  return v;
}

std::uint64_t field_u64(std::string_view field, std::string_view key) {
  if (field.substr(0, key.size()) != key || field[key.size()] != '=') {
    throw ParseError("augmentation log: expected " + std::string(key) +
                     "=... got '" + std::string(field) + "'");
  }
  const std::string_view val = field.substr(key.size() + 1);
  std::uint64_t v = 0;
  const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
  if (res.ec != std::errc()) {
    throw ParseError("augmentation log: bad value '" + std::string(field) +
                     "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::vector<int> points_in_box(std::span<const ScenePoint> points,
                               const Box3D& box) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const Vec3 u =
        to_canonical(box, points[static_cast<std::size_t>(i)].xyz());
    if (std::abs(u.x) <= 1.0 + kInBoxMargin &&
        std::abs(u.y) <= 1.0 + kInBoxMargin &&
        std::abs(u.z) <= 1.0 + kInBoxMargin) {
      idx.push_back(i);
    }
  }
  return idx;
}

PyramidPartition partition_pyramids(std::span<const ScenePoint> points,
                                    const Box3D& box) {
  PyramidPartition part;
  part.face.reserve(points.size());
  for (const ScenePoint& p : points) {
    const Vec3 u = to_canonical(box, p.xyz());
    if (std::abs(u.x) > 1.0 + kPartitionMargin ||
        std::abs(u.y) > 1.0 + kPartitionMargin ||
        std::abs(u.z) > 1.0 + kPartitionMargin) {
      throw PointOutsideBox("point lies outside the box being partitioned");
    }
    part.face.push_back(face_of(u));
  }
  return part;
}

std::vector<ScenePoint> dropout_pyramid(std::span<const ScenePoint> points,
                                        const PyramidPartition& partition,
                                        int face) {
  std::vector<ScenePoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (partition.face[i] != face) out.push_back(points[i]);
  }
  return out;
}

std::pair<std::vector<ScenePoint>, std::vector<ScenePoint>> swap_pyramids(
    std::span<const ScenePoint> points_a, const Box3D& box_a,
    std::span<const ScenePoint> points_b, const Box3D& box_b, int face) {
  const PyramidPartition part_a = partition_pyramids(points_a, box_a);
  const PyramidPartition part_b = partition_pyramids(points_b, box_b);
  std::vector<ScenePoint> out_a = dropout_pyramid(points_a, part_a, face);
  std::vector<ScenePoint> out_b = dropout_pyramid(points_b, part_b, face);
  for (std::size_t i = 0; i < points_b.size(); ++i) {
    if (part_b.face[i] == face) {
      out_a.push_back(remap_point(points_b[i], box_b, box_a));
    }
  }
  for (std::size_t i = 0; i < points_a.size(); ++i) {
    if (part_a.face[i] == face) {
      out_b.push_back(remap_point(points_a[i], box_a, box_b));
    }
  }
  return {std::move(out_a), std::move(out_b)};
}

std::vector<ScenePoint> sparsify_pyramid(std::span<const ScenePoint> points,
                                         const PyramidPartition& partition,
                                         int face, double keep_ratio,
                                         std::uint64_t seed) {
  const std::vector<int> subset = subset_of_face(partition, face);
  if (subset.empty()) {
    return std::vector<ScenePoint>(points.begin(), points.end());
  }
  const std::vector<ScenePoint> subset_pts = gather(points, subset);
  const int n = static_cast<int>(subset.size());
  const int k =
      std::min(n, std::max(1, static_cast<int>(std::ceil(keep_ratio * n))));
  Rng r = sub_rng(seed);
  std::vector<int> kept_local =
      farthest_point_sampling(subset_pts, k, r.uniform_int(n));
  std::sort(kept_local.begin(), kept_local.end());
  std::vector<bool> keep(points.size(), true);
  std::size_t ki = 0;
  for (int si = 0; si < n; ++si) {
    if (ki < kept_local.size() && kept_local[ki] == si) {
      ++ki;
      continue;
    }
    keep[static_cast<std::size_t>(subset[static_cast<std::size_t>(si)])] =
        false;
  }
  std::vector<ScenePoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.push_back(points[i]);
  }
  return out;
}

namespace {

double sq_dist(const ScenePoint& a, const ScenePoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

std::vector<int> fps_impl(std::span<const ScenePoint> points, int k,
                          int seed_index, bool parallel) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw InvalidK("farthest point sampling: k out of range");
  if (seed_index < 0 || seed_index >= n) {
    throw InvalidK("farthest point sampling: seed index out of range");
  }
  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(k));
  selected.push_back(seed_index);
  std::vector<double> min_dist(static_cast<std::size_t>(n),
                               std::numeric_limits<double>::infinity());
  int last = seed_index;
  while (static_cast<int>(selected.size()) < k) {
    const ScenePoint& lp = points[static_cast<std::size_t>(last)];
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) {
        const double d = sq_dist(points[static_cast<std::size_t>(i)], lp);
        if (d < min_dist[static_cast<std::size_t>(i)]) {
          min_dist[static_cast<std::size_t>(i)] = d;
        }
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const double d = sq_dist(points[static_cast<std::size_t>(i)], lp);
        if (d < min_dist[static_cast<std::size_t>(i)]) {
          min_dist[static_cast<std::size_t>(i)] = d;
        }
      }
    }
    // Serial argmax keeps ties deterministic (lowest index wins).
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      if (min_dist[static_cast<std::size_t>(i)] > best_d &&
          min_dist[static_cast<std::size_t>(i)] > 0.0) {
        best_d = min_dist[static_cast<std::size_t>(i)];
        best = i;
      }
    }
    if (best < 0) {
      // All remaining points coincide with selected ones; fill with the
      // lowest unselected indices.
      std::vector<bool> used(static_cast<std::size_t>(n), false);
      for (int s : selected) used[static_cast<std::size_t>(s)] = true;
      for (int i = 0; i < n && static_cast<int>(selected.size()) < k; ++i) {
        if (!used[static_cast<std::size_t>(i)]) selected.push_back(i);
      }
      break;
    }
    min_dist[static_cast<std::size_t>(best)] = 0.0;
    selected.push_back(best);
    last = best;
  }
  return selected;
}

}  // namespace

std::vector<int> farthest_point_sampling(std::span<const ScenePoint> points,
                                         int k, int seed_index) {
  return fps_impl(points, k, seed_index, points.size() >= 4096);
}

std::vector<int> farthest_point_sampling_serial(
    std::span<const ScenePoint> points, int k, int seed_index) {
  return fps_impl(points, k, seed_index, false);
}

std::pair<Scene, AugRecord> shape_aware_augment(const Scene& scene,
                                                const AugConfig& cfg,
                                                Rng& rng) {
  Scene out = scene;
  AugRecord record;
  record.keep_ratio = cfg.sparsify_keep_ratio;
  record.local_rotation_range = cfg.local_rotation_range;
  record.local_translation_range = cfg.local_translation_range;
  const int n_obj = static_cast<int>(scene.labels.size());
  for (int obj = 0; obj < n_obj; ++obj) {
    if (rng.bernoulli(cfg.p1)) {
      AugOp op{obj, OpKind::kDropout, rng.uniform_int(kNumFaces), -1, 0};
      apply_op(out, op, record);
      record.ops.push_back(op);
    }
    if (rng.bernoulli(cfg.p2) && n_obj >= 2) {
      int partner = rng.uniform_int(n_obj - 1);
      if (partner >= obj) ++partner;
      AugOp op{obj, OpKind::kSwap, rng.uniform_int(kNumFaces), partner, 0};
      apply_op(out, op, record);
      record.ops.push_back(op);
    }
    if (rng.bernoulli(cfg.p3)) {
      AugOp op{obj, OpKind::kSparsify, rng.uniform_int(kNumFaces), -1,
               rng.next_u64()};
      apply_op(out, op, record);
      record.ops.push_back(op);
    }
  }
  return {std::move(out), std::move(record)};
}

std::pair<Scene, geom::Transform> global_augment(const Scene& scene,
                                                 const AugConfig& cfg,
                                                 Rng& rng) {
  geom::Transform t;
  t.scale = rng.uniform(cfg.global_scale_min, cfg.global_scale_max);
  t.flip_y = rng.bernoulli(cfg.global_flip_prob);
  t.rotation =
      rng.uniform(-cfg.global_rotation_range, cfg.global_rotation_range);
  const double tr = cfg.global_translation_range;
  t.translation = {rng.uniform(-tr, tr), rng.uniform(-tr, tr),
                   rng.uniform(-tr, tr)};
  Scene out = scene;
  apply_global_to_scene(out, t);
  return {std::move(out), t};
}

std::pair<Scene, AugRecord> augment_scene(const Scene& scene,
                                          const AugConfig& cfg, Rng& rng) {
  auto [transformed, t] = global_augment(scene, cfg, rng);
  AugRecord record;
  record.global = t;
  record.keep_ratio = cfg.sparsify_keep_ratio;
  record.local_rotation_range = cfg.local_rotation_range;
  record.local_translation_range = cfg.local_translation_range;
  Scene out = std::move(transformed);
  if (cfg.local_rotation_range > 0.0 || cfg.local_translation_range > 0.0) {
    for (int obj = 0; obj < static_cast<int>(out.labels.size()); ++obj) {
      AugOp op{obj, OpKind::kLocal, 0, -1, rng.next_u64()};
      apply_op(out, op, record);
      record.ops.push_back(op);
    }
  }
  auto [final_scene, sada_record] = shape_aware_augment(out, cfg, rng);
  for (const AugOp& op : sada_record.ops) record.ops.push_back(op);
  return {std::move(final_scene), std::move(record)};
}

Scene replay(const Scene& scene, const AugRecord& record) {
  Scene out = scene;
  apply_global_to_scene(out, record.global);
  for (const AugOp& op : record.ops) apply_op(out, op, record);
  return out;
}

std::string AugRecord::serialize() const {
  std::string out = "# se3d-auglog-v1\n";
  out += "cfg keep_ratio=" + format_double(keep_ratio) +
         " local_rot=" + format_double(local_rotation_range) +
         " local_trans=" + format_double(local_translation_range) + "\n";
  out += "global rot=" + format_double(global.rotation) +
         " dx=" + format_double(global.translation.x) +
         " dy=" + format_double(global.translation.y) +
         " dz=" + format_double(global.translation.z) +
         " flip=" + (global.flip_y ? std::string("1") : std::string("0")) +
         " scale=" + format_double(global.scale) + "\n";
  for (const AugOp& op : ops) {
    out += "obj=" + std::to_string(op.object_id) + " op=" + op_name(op.kind) +
           " face=" + std::to_string(op.face);
    if (op.kind == OpKind::kSwap) {
      out += " partner=" + std::to_string(op.partner);
    }
    out += " seed=" + std::to_string(op.seed) + "\n";
  }
  return out;
}

AugRecord AugRecord::parse(std::string_view text) {
  AugRecord record;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields[0] == "cfg") {
      if (fields.size() != 4) throw ParseError("augmentation log: bad cfg line");
      record.keep_ratio = field_double(fields[1], "keep_ratio");
      record.local_rotation_range = field_double(fields[2], "local_rot");
      record.local_translation_range = field_double(fields[3], "local_trans");
    } else if (fields[0] == "global") {
      if (fields.size() != 7) {
        throw ParseError("augmentation log: bad global line");
      }
      record.global.rotation = field_double(fields[1], "rot");
      record.global.translation.x = field_double(fields[2], "dx");
      record.global.translation.y = field_double(fields[3], "dy");
      record.global.translation.z = field_double(fields[4], "dz");
      record.global.flip_y = field_u64(fields[5], "flip") != 0;
      record.global.scale = field_double(fields[6], "scale");
    } else {
      AugOp op;
      op.object_id = static_cast<int>(field_u64(fields[0], "obj"));
      std::size_t f = 1;
      if (f >= fields.size() || fields[f].substr(0, 3) != "op=") {
        throw ParseError("augmentation log: missing op field");
      }
      op.kind = op_kind_from(fields[f].substr(3));
      ++f;
      op.face = static_cast<int>(field_u64(fields[f++], "face"));
      if (op.kind == OpKind::kSwap) {
        op.partner = static_cast<int>(field_u64(fields[f++], "partner"));
      }
      op.seed = field_u64(fields[f++], "seed");
      record.ops.push_back(op);
    }
  }
  return record;
}

}  // namespace se3d::augment
