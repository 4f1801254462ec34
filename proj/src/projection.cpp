#include "lumamap/projection.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lumamap {

namespace {

constexpr double kMinHitDistance = 1e-9;
constexpr double kParallelEpsilon = 1e-12;
constexpr double kVerticalSeedLimit = 0.999;

double half_fov_radians(double fov_deg) { return fov_deg * std::numbers::pi / 360.0; }

double signed_area(const std::array<Point2, 4>& q) {
  double twice = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& a = q[i];
    const auto& b = q[(i + 1) % q.size()];
    twice += a.u * b.v - b.u * a.v;
  }
  return 0.5 * twice;
}

}  // namespace

void ViewSpec::validate() const {
  if (!is_finite(eye) || !is_finite(target)) {
    throw std::invalid_argument("view points must be finite");
  }
  if (eye == target) {
    throw std::invalid_argument("view eye and target coincide");
  }
  if (!(fov_deg > 0.0 && fov_deg <= 180.0)) {
    throw std::invalid_argument("fov_deg must lie in (0, 180]");
  }
}

CameraFrame build_frame(const ViewSpec& view) {
  const Vec3 view_vector = view.target - view.eye;
  const double length = norm(view_vector);
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("zero-length view vector");
  }
  const Vec3 forward = view_vector * (1.0 / length);
  Vec3 seed{0.0, 0.0, 1.0};
  if (std::abs(dot(forward, seed)) > kVerticalSeedLimit) {
    seed = {0.0, 1.0, 0.0};
  }
  const Vec3 up = normalized(seed - dot(seed, forward) * forward);
  const Vec3 right = normalized(cross(forward, up));
  return {view.eye, forward, up, right};
}

std::optional<SphericalDirection> image_to_spherical(double u, double v, double fov_deg) {
  const double du = 2.0 * u - 1.0;
  const double dv = 2.0 * v - 1.0;
  const double rho = std::hypot(du, dv);
  if (rho > 1.0) {
    return std::nullopt;
  }
  return SphericalDirection{rho * half_fov_radians(fov_deg), std::atan2(dv, du), 1.0};
}

Vec3 spherical_to_direction(const SphericalDirection& s, const CameraFrame& frame) {
  const double sin_polar = std::sin(s.polar);
  return s.radius * (sin_polar * std::cos(s.azimuth) * frame.right +
                     sin_polar * std::sin(s.azimuth) * frame.up +
                     std::cos(s.polar) * frame.forward);
}

std::optional<Vec3> pixel_to_direction(double u, double v, const CameraFrame& frame,
                                       double fov_deg) {
  const auto s = image_to_spherical(u, v, fov_deg);
  if (!s) {
    return std::nullopt;
  }
  return spherical_to_direction(*s, frame);
}

std::optional<ImagePoint> direction_to_image(const Vec3& dir, const CameraFrame& frame,
                                             double fov_deg) {
  const double x = dot(dir, frame.right);
  const double y = dot(dir, frame.up);
  const double z = dot(dir, frame.forward);
  const double lateral = std::hypot(x, y);
  // atan2 keeps full precision near the axis, unlike acos(z)
  const double polar = std::atan2(lateral, z);
  const double half_fov = half_fov_radians(fov_deg);
  if (polar > half_fov * (1.0 + 1e-12)) {
    return std::nullopt;
  }
  const double rho = polar / half_fov;
  double du = 0.0;
  double dv = 0.0;
  if (lateral > 0.0) {
    du = rho * x / lateral;
    dv = rho * y / lateral;
  }
  return ImagePoint{0.5 * (du + 1.0), 0.5 * (dv + 1.0)};
}

ImagePoint raster_corner(std::size_t row, std::size_t col, std::size_t width, std::size_t height) {
  return {static_cast<double>(col) / static_cast<double>(width),
          1.0 - static_cast<double>(row) / static_cast<double>(height)};
}

std::optional<std::array<Vec3, 4>> pixel_footprint(std::size_t row, std::size_t col,
                                                   std::size_t width, std::size_t height,
                                                   const CameraFrame& frame, double fov_deg) {
  if (row >= height || col >= width) {
    throw std::out_of_range("pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                            ") outside " + std::to_string(width) + "x" + std::to_string(height));
  }
  const std::array<ImagePoint, 4> corners{
      raster_corner(row + 1, col, width, height),
      raster_corner(row + 1, col + 1, width, height),
      raster_corner(row, col + 1, width, height),
      raster_corner(row, col, width, height),
  };
  std::array<Vec3, 4> dirs;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const auto d = pixel_to_direction(corners[i].u, corners[i].v, frame, fov_deg);
    if (!d) {
      return std::nullopt;
    }
    dirs[i] = *d;
  }
  return dirs;
}

std::optional<Point3> intersect_plane(const Point3& origin, const Vec3& dir,
                                      const Point3& plane_point, const Vec3& plane_normal) {
  const double denom = dot(dir, plane_normal);
  if (std::abs(denom) <= kParallelEpsilon) {
    return std::nullopt;
  }
  const double t = dot(plane_point - origin, plane_normal) / denom;
  if (!(t > kMinHitDistance)) {
    return std::nullopt;
  }
  return origin + t * dir;
}

std::vector<FootprintQuad> project_mask(const BinaryMask& mask, const CameraFrame& frame,
                                        const FacadePlane& facade, double fov_deg) {
  const std::size_t width = mask.width();
  const std::size_t height = mask.height();
  const Vec3 normal = facade.normal();

  // Neighbouring pixels share corners, so cast each lattice vertex once.
  const std::size_t lattice_w = width + 1;
  std::vector<std::optional<Point2>> hits((height + 1) * lattice_w);
  std::vector<bool> cast((height + 1) * lattice_w, false);
  auto corner_hit = [&](std::size_t row, std::size_t col) -> const std::optional<Point2>& {
    const std::size_t idx = row * lattice_w + col;
    if (!cast[idx]) {
      cast[idx] = true;
      const ImagePoint p = raster_corner(row, col, width, height);
      if (const auto dir = pixel_to_direction(p.u, p.v, frame, fov_deg)) {
        if (const auto hit = intersect_plane(frame.origin, *dir, facade.corner, normal)) {
          const Point2 local = facade.project(*hit);
          if (facade.contains(local)) {
            hits[idx] = local;
          }
        }
      }
    }
    return hits[idx];
  };

  std::vector<FootprintQuad> quads;
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      if (!mask.at(row, col)) {
        continue;
      }
      // same corner order as pixel_footprint()
      const std::array<std::pair<std::size_t, std::size_t>, 4> lattice{
          {{row + 1, col}, {row + 1, col + 1}, {row, col + 1}, {row, col}}};
      FootprintQuad quad;
      bool complete = true;
      for (std::size_t i = 0; i < lattice.size() && complete; ++i) {
        const auto& hit = corner_hit(lattice[i].first, lattice[i].second);
        if (hit) {
          quad.corners[i] = *hit;
        } else {
          complete = false;
        }
      }
      if (!complete) {
        continue;
      }
      if (signed_area(quad.corners) < 0.0) {
        std::swap(quad.corners[1], quad.corners[3]);
      }
      quads.push_back(quad);
    }
  }
  return quads;
}

}  // namespace lumamap
