#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "lumamap/facade_plane.hpp"
#include "lumamap/geometry.hpp"
#include "lumamap/raster.hpp"

namespace lumamap {

/// Viewer position and the point looked at (e.g. the middle of a screen).
struct ViewSpec {
  Point3 eye;
  Point3 target;
  double fov_deg = 180.0;

  /// Throws std::invalid_argument on eye == target or fov outside (0, 180].
  void validate() const;
};

/// Orthonormal viewing frame. `right` is the viewer's right hand side, so
/// right = forward x up and up x right = forward.
struct CameraFrame {
  Point3 origin;
  Vec3 forward;
  Vec3 up;
  Vec3 right;
};

/// Angles on the unit view hemisphere. `polar` is measured from the forward
/// axis, `azimuth` counter-clockwise from `right` towards `up`.
struct SphericalDirection {
  double polar = 0.0;
  double azimuth = 0.0;
  double radius = 1.0;
};

/// Normalised image position: u grows to the right, v grows upwards, both in [0, 1].
struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};

struct FootprintQuad {
  std::array<Point2, 4> corners;  // facade-local meters, counter-clockwise
};

CameraFrame build_frame(const ViewSpec& view);

/// Equidistant fisheye: image radius is proportional to the polar angle and
/// the rim of the unit image circle sits at fov/2. Empty outside the circle.
std::optional<SphericalDirection> image_to_spherical(double u, double v, double fov_deg);

/// Unit direction for the given hemisphere angles,
///   sin(polar) (cos(azimuth) right + sin(azimuth) up) + cos(polar) forward.
Vec3 spherical_to_direction(const SphericalDirection& s, const CameraFrame& frame);

std::optional<Vec3> pixel_to_direction(double u, double v, const CameraFrame& frame,
                                       double fov_deg);

/// Inverse of pixel_to_direction. Empty if the direction lies outside the field of view.
std::optional<ImagePoint> direction_to_image(const Vec3& dir, const CameraFrame& frame,
                                             double fov_deg);

/// Image position of a raster pixel corner; row 0 is the top of the raster,
/// so the vertical axis is flipped here.
ImagePoint raster_corner(std::size_t row, std::size_t col, std::size_t width, std::size_t height);

/// Directions through the four corners of pixel (row, col), counter-clockwise
/// in image space starting bottom-left. Empty if any corner lies outside the
/// image circle. Throws std::out_of_range for bad indices.
std::optional<std::array<Vec3, 4>> pixel_footprint(std::size_t row, std::size_t col,
                                                   std::size_t width, std::size_t height,
                                                   const CameraFrame& frame, double fov_deg);

/// Ray/plane hit for t > 1e-9; empty for parallel rays or hits behind the origin.
std::optional<Point3> intersect_plane(const Point3& origin, const Vec3& dir,
                                      const Point3& plane_point, const Vec3& plane_normal);

/// Footprints of all flagged pixels whose four corner rays land on the facade.
/// Pixels that only partially hit the facade are dropped.
std::vector<FootprintQuad> project_mask(const BinaryMask& mask, const CameraFrame& frame,
                                        const FacadePlane& facade, double fov_deg);

}  // namespace lumamap
