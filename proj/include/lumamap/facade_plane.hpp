#pragma once

#include "lumamap/geometry.hpp"

namespace lumamap {

/// World-space facade rectangle spanned from `corner` by `width` meters along
/// `u_axis` and `height` meters along `v_axis`.
struct FacadePlane {
  Point3 corner;
  Vec3 u_axis{1.0, 0.0, 0.0};
  Vec3 v_axis{0.0, 0.0, 1.0};
  double width = 1.0;
  double height = 1.0;

  Vec3 normal() const { return cross(u_axis, v_axis); }

  /// Throws std::invalid_argument unless the axes are orthonormal (1e-9) and
  /// both extents are positive.
  void validate() const;

  /// Orthogonal projection onto the facade, in facade-local meters.
  Point2 project(const Point3& p) const {
    const Vec3 d = p - corner;
    return {dot(d, u_axis), dot(d, v_axis)};
  }

  Point3 to_world(const Point2& q) const { return corner + q.u * u_axis + q.v * v_axis; }

  bool contains(const Point2& q, double tolerance = 1e-9) const {
    return q.u >= -tolerance && q.u <= width + tolerance && q.v >= -tolerance &&
           q.v <= height + tolerance;
  }
};

/// Facade-local coordinates of a point on the plane. Throws
/// std::invalid_argument if the point is farther than 1e-6 m off the plane.
Point2 to_local(const Point3& p, const FacadePlane& facade);

}  // namespace lumamap
