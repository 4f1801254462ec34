#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lumamap/facade_plane.hpp"
#include "lumamap/projection.hpp"
#include "lumamap/raster.hpp"

namespace lumamap {

/// Axis-aligned rectangle in facade-local meters.
struct FacadeRect {
  double u0 = 0.0;
  double v0 = 0.0;
  double u1 = 0.0;
  double v1 = 0.0;

  double area() const { return (u1 - u0) * (v1 - v0); }
  bool contains(const Point2& p) const { return p.u >= u0 && p.u <= u1 && p.v >= v0 && p.v <= v1; }
};

/// Geometric ground truth: a facade seen from one view, with bright patches.
struct SyntheticScene {
  CameraFrame frame;
  FacadePlane facade;
  std::vector<FacadeRect> bright_rects;
  double bright_level = 2500.0;      // cd/m^2
  double background_level = 1000.0;  // cd/m^2
  double luminance_cap = 3000.0;     // cd/m^2
  double fov_deg = 180.0;

  /// Throws std::invalid_argument unless 0 <= background < bright <= cap and
  /// every rect is non-empty and inside the facade.
  void validate() const;
};

/// Where the centre ray of pixel (row, col) meets the facade rectangle, if it does.
/// Shares no code with the projection module.
std::optional<Point2> synthetic_facade_hit(const SyntheticScene& scene, std::size_t row,
                                           std::size_t col, std::size_t width, std::size_t height);

/// Renders the scene as a calibrated fisheye image: 0 outside the image
/// circle, the bright level where the centre ray hits a bright rect, the
/// background level everywhere else.
LuminanceImage render_synthetic(const SyntheticScene& scene, std::size_t width, std::size_t height);

/// Adds clamped zero-mean Gaussian noise, rounding to the nearest grey level.
///
/// Deterministic generator: std::mt19937_64 seeded with `seed`; pixels are
/// visited in row-major order and each consumes two 64-bit draws a, b, mapped
/// to u1 = ((a >> 11) + 1) * 2^-53 and u2 = (b >> 11) * 2^-53, giving
/// z = sqrt(-2 ln u1) * cos(2 pi u2) (Box-Muller, cosine branch only).
LuminanceImage add_noise(const LuminanceImage& img, double stddev, std::uint64_t seed);

}  // namespace lumamap
