// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#include "se3d/geom.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace se3d {

double normalize_angle(double r) {
  const double two_pi = 6.283185307179586476925286766559;
  r = std::remainder(r, two_pi);  // lands in [-pi, pi]
  if (r <= -3.14159265358979323846) r = 3.14159265358979323846;
  return r;
}

namespace geom {
namespace {

// Cross products below this magnitude are treated as collinear.
constexpr double kCollinearEps = 1e-12;

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Intersection of segment p0->p1 with the (infinite) line q0->q1.
Vec2 line_intersect(const Vec2& p0, const Vec2& p1, const Vec2& q0,
                    const Vec2& q1) {
  const double a1 = p1.y - p0.y;
  const double b1 = p0.x - p1.x;
  const double c1 = a1 * p0.x + b1 * p0.y;
  const double a2 = q1.y - q0.y;
  const double b2 = q0.x - q1.x;
  const double c2 = a2 * q0.x + b2 * q0.y;
  const double det = a1 * b2 - a2 * b1;
  if (std::abs(det) < kCollinearEps) {
    // Parallel within tolerance; midpoint keeps the clip well-defined.
    return {0.5 * (p0.x + p1.x), 0.5 * (p0.y + p1.y)};
  }
  return {(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
}

// Clips subject against the half-plane left of edge e0->e1.
PolygonBEV clip_by_edge(const PolygonBEV& subject, const Vec2& e0,
                        const Vec2& e1) {
  PolygonBEV out;
  for (int i = 0; i < subject.n; ++i) {
    const Vec2& cur = subject.v[static_cast<std::size_t>(i)];
    const Vec2& nxt = subject.v[static_cast<std::size_t>((i + 1) % subject.n)];
    const double side_cur = cross2(e0, e1, cur);
    const double side_nxt = cross2(e0, e1, nxt);
    const bool in_cur = side_cur >= -kCollinearEps;
    const bool in_nxt = side_nxt >= -kCollinearEps;
    if (in_cur) {
      if (out.n < PolygonBEV::kMaxVertices) out.push(cur);
      if (!in_nxt && out.n < PolygonBEV::kMaxVertices) {
        out.push(line_intersect(cur, nxt, e0, e1));
      }
    } else if (in_nxt) {
      if (out.n < PolygonBEV::kMaxVertices) {
        out.push(line_intersect(cur, nxt, e0, e1));
      }
    }
  }
  return out;
}

// Lexicographic box ordering; canonicalizing the argument order makes
// iou_bev / iou_3d bitwise symmetric.
bool box_less(const Box3D& a, const Box3D& b) {
  return std::tie(a.cx, a.cy, a.cz, a.w, a.l, a.h, a.r) <
         std::tie(b.cx, b.cy, b.cz, b.w, b.l, b.h, b.r);
}

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const PolygonBEV inter =
      convex_intersection(box_corners_bev(a), box_corners_bev(b));
  if (inter.empty()) return 0.0;
  return std::max(0.0, polygon_area(inter));
}

}  // namespace

double polygon_area(const PolygonBEV& poly) {
  if (poly.n < 3) return 0.0;
  double twice = 0.0;
  for (int i = 0; i < poly.n; ++i) {
    const Vec2& p = poly.v[static_cast<std::size_t>(i)];
    const Vec2& q = poly.v[static_cast<std::size_t>((i + 1) % poly.n)];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

PolygonBEV box_corners_bev(const Box3D& box) {
  const double c = std::cos(box.r);
  const double s = std::sin(box.r);
  const double hl = 0.5 * box.l;  // along heading
  const double hw = 0.5 * box.w;  // across heading
  // Local corners (+hl,+hw), (-hl,+hw), (-hl,-hw), (+hl,-hw) are CCW and
  // rotation preserves the orientation.
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  PolygonBEV poly;
  for (int i = 0; i < 4; ++i) {
    poly.push({box.cx + lx[i] * c - ly[i] * s, box.cy + lx[i] * s + ly[i] * c});
  }
  return poly;
}

std::array<Vec3, 8> box_corners_3d(const Box3D& box) {
  const PolygonBEV bev = box_corners_bev(box);
  std::array<Vec3, 8> out;
  for (int i = 0; i < 4; ++i) {
    const Vec2& p = bev.v[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = {p.x, p.y, box.z_min()};
    out[static_cast<std::size_t>(i + 4)] = {p.x, p.y, box.z_max()};
  }
  return out;
}

PolygonBEV convex_intersection(const PolygonBEV& a, const PolygonBEV& b) {
  if (a.n < 3 || b.n < 3) return {};
  PolygonBEV out = a;
  for (int i = 0; i < b.n && !out.empty(); ++i) {
    const Vec2& e0 = b.v[static_cast<std::size_t>(i)];
    const Vec2& e1 = b.v[static_cast<std::size_t>((i + 1) % b.n)];
    out = clip_by_edge(out, e0, e1);
  }
  if (out.n < 3 || polygon_area(out) < kCollinearEps) return {};
  return out;
}

double iou_bev(const Box3D& a, const Box3D& b) {
  if (box_less(b, a)) return iou_bev(b, a);
  const double inter = bev_intersection_area(a, b);
  const double uni = a.bev_area() + b.bev_area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  if (box_less(b, a)) return iou_3d(b, a);
  const double dz =
      std::min(a.z_max(), b.z_max()) - std::max(a.z_min(), b.z_min());
  if (dz <= 0.0) return 0.0;
  const double inter = bev_intersection_area(a, b) * dz;
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double enclosing_diagonal(const Box3D& a, const Box3D& b) {
  double lo[3] = {0, 0, 0};
  double hi[3] = {0, 0, 0};
  bool first = true;
  for (const Box3D* box : {&a, &b}) {
    for (const Vec3& c : box_corners_3d(*box)) {
      const double p[3] = {c.x, c.y, c.z};
      for (int ax = 0; ax < 3; ++ax) {
        if (first) {
          lo[ax] = hi[ax] = p[ax];
        } else {
          lo[ax] = std::min(lo[ax], p[ax]);
          hi[ax] = std::max(hi[ax], p[ax]);
        }
      }
      first = false;
    }
  }
  const double dx = hi[0] - lo[0];
  const double dy = hi[1] - lo[1];
  const double dz = hi[2] - lo[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Transform Transform::inverse() const {
  Transform inv;
  inv.scale = 1.0 / scale;
  inv.flip_y = flip_y;
  // A flip conjugates the rotation: F o R(t) == R(-t) o F.
  inv.rotation = flip_y ? rotation : -rotation;
  Vec3 q = inv.scale * translation;
  if (inv.flip_y) q.y = -q.y;
  const double c = std::cos(inv.rotation);
  const double s = std::sin(inv.rotation);
  inv.translation = {-(q.x * c - q.y * s), -(q.x * s + q.y * c), -q.z};
  return inv;
}

Vec3 apply_transform(const Transform& t, const Vec3& p) {
  Vec3 q = t.scale * p;
  if (t.flip_y) q.y = -q.y;
  const double c = std::cos(t.rotation);
  const double s = std::sin(t.rotation);
  q = {q.x * c - q.y * s, q.x * s + q.y * c, q.z};
  return q + t.translation;
}

Box3D apply_transform(const Transform& t, const Box3D& box) {
  Box3D out = box;
  const Vec3 c = apply_transform(t, box.center());
  out.cx = c.x;
  out.cy = c.y;
  out.cz = c.z;
  out.w = box.w * t.scale;
  out.l = box.l * t.scale;
  out.h = box.h * t.scale;
  double r = box.r;
  if (t.flip_y) r = -r;  // mirror across the x-z plane reflects the heading
  out.r = normalize_angle(r + t.rotation);
  return out;
}

void apply_transform_points(const Transform& t, std::span<Vec3> points) {
  for (Vec3& p : points) p = apply_transform(t, p);
}

bool point_in_box_bev(const Box3D& box, double x, double y, double margin) {
  const double c = std::cos(box.r);
  const double s = std::sin(box.r);
  const double dx = x - box.cx;
  const double dy = y - box.cy;
  const double u = dx * c + dy * s;   // along heading
  const double v = -dx * s + dy * c;  // across heading
  return std::abs(u) <= 0.5 * box.l + margin &&
         std::abs(v) <= 0.5 * box.w + margin;
}

bool point_in_box(const Box3D& box, const Vec3& p, double margin) {
  if (std::abs(p.z - box.cz) > 0.5 * box.h + margin) return false;
  return point_in_box_bev(box, p.x, p.y, margin);
}

}  // namespace geom
}  // namespace se3d
