// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <span>

namespace se3d {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Vec3 operator*(double s, const Vec3& v) {
  return {s * v.x, s * v.y, s * v.z};
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Normalizes an angle into (-pi, pi].
double normalize_angle(double r);

// Oriented 3D box: center (cx, cy, cz), sizes w (across heading),
// l (along heading), h (vertical), and BEV yaw r, counterclockwise
// about +z from the +x axis, in (-pi, pi].
struct Box3D {
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double w = 1.0, l = 1.0, h = 1.0;
  double r = 0.0;

  Vec3 center() const { return {cx, cy, cz}; }
  double volume() const { return w * l * h; }
  double bev_area() const { return w * l; }
  double z_min() const { return cz - 0.5 * h; }
  double z_max() const { return cz + 0.5 * h; }
};

namespace geom {

// Convex BEV polygon, counterclockwise. Two clipped rectangles cannot
// exceed 8 vertices; capacity 16 leaves margin for degenerate merges.
struct PolygonBEV {
  static constexpr int kMaxVertices = 16;
  std::array<Vec2, kMaxVertices> v{};
  int n = 0;

  bool empty() const { return n == 0; }
  void push(const Vec2& p) { v[static_cast<std::size_t>(n++)] = p; }
};

/// Signed shoelace area; positive for counterclockwise order.
double polygon_area(const PolygonBEV& poly);

/// The four BEV corners of a box, counterclockwise.
PolygonBEV box_corners_bev(const Box3D& box);

/// The eight 3D corners of a box.
std::array<Vec3, 8> box_corners_3d(const Box3D& box);

// Sutherland-Hodgman clip of convex polygon a against convex polygon b.
// Returns the (possibly empty) intersection polygon; degenerate results
// (shared edge, single point) come back empty.
PolygonBEV convex_intersection(const PolygonBEV& a, const PolygonBEV& b);

/// BEV intersection-over-union; symmetric in its arguments.
double iou_bev(const Box3D& a, const Box3D& b);

// 3D IoU under yaw-only rotation: BEV intersection area times vertical
// overlap, over the volume union.
double iou_3d(const Box3D& a, const Box3D& b);

/// Diagonal of the axis-aligned cuboid enclosing all 16 corners of a and b.
double enclosing_diagonal(const Box3D& a, const Box3D& b);

// Global scene transform. Composition order is fixed:
// scale -> flip across the x-z plane -> rotate about +z -> translate.
struct Transform {
  double rotation = 0.0;
  Vec3 translation{};
  bool flip_y = false;
  double scale = 1.0;

  bool is_identity() const {
    return rotation == 0.0 && translation.x == 0.0 && translation.y == 0.0 &&
           translation.z == 0.0 && !flip_y && scale == 1.0;
  }

  /// Analytic inverse, expressed in the same canonical composition order.
  Transform inverse() const;
};

Vec3 apply_transform(const Transform& t, const Vec3& p);
Box3D apply_transform(const Transform& t, const Box3D& box);
void apply_transform_points(const Transform& t, std::span<Vec3> points);

/// True when p lies inside box (inclusive within margin).
bool point_in_box(const Box3D& box, const Vec3& p, double margin = 0.0);
bool point_in_box_bev(const Box3D& box, double x, double y,
                      double margin = 0.0);

}  // namespace geom
}  // namespace se3d
