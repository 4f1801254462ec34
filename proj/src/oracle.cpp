#include "lumamap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lumamap {

namespace {

std::uint8_t grey_level(double level, double cap) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(level / cap, 0.0, 1.0) * 255.0));
}

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

}  // namespace

void SyntheticScene::validate() const {
  facade.validate();
  if (!(background_level >= 0.0 && background_level < bright_level && bright_level <= luminance_cap)) {
    throw std::invalid_argument("scene levels must satisfy 0 <= background < bright <= cap");
  }
  if (!(fov_deg > 0.0 && fov_deg <= 180.0)) {
    throw std::invalid_argument("fov_deg must lie in (0, 180]");
  }
  for (const auto& r : bright_rects) {
    if (!(r.u0 < r.u1 && r.v0 < r.v1)) {
      throw std::invalid_argument("bright rect is empty");
    }
    if (r.u0 < 0.0 || r.v0 < 0.0 || r.u1 > facade.width || r.v1 > facade.height) {
      throw std::invalid_argument("bright rect exceeds the facade");
    }
  }
}

std::optional<Point2> synthetic_facade_hit(const SyntheticScene& scene, std::size_t row,
                                           std::size_t col, std::size_t width, std::size_t height) {
  // Image-plane offset of the pixel centre from the optical axis, y up.
  const double x = 2.0 * (static_cast<double>(col) + 0.5) / static_cast<double>(width) - 1.0;
  const double y = 1.0 - 2.0 * (static_cast<double>(row) + 0.5) / static_cast<double>(height);
  const double r = std::sqrt(x * x + y * y);
  if (r > 1.0) {
    return std::nullopt;
  }
  // Angle from the axis grows linearly with r, reaching fov/2 at the rim.
  const double theta = r * (scene.fov_deg / 2.0) * (std::numbers::pi / 180.0);
  double cx = 0.0;
  double cy = 0.0;
  if (r > 0.0) {
    cx = std::sin(theta) * x / r;
    cy = std::sin(theta) * y / r;
  }
  const double cz = std::cos(theta);
  const auto& fr = scene.frame;
  const Vec3 ray{fr.right.x * cx + fr.up.x * cy + fr.forward.x * cz,
                 fr.right.y * cx + fr.up.y * cy + fr.forward.y * cz,
                 fr.right.z * cx + fr.up.z * cy + fr.forward.z * cz};

  // origin + t ray = corner + a U + b V, solved by Cramer's rule.
  const auto& f = scene.facade;
  const Vec3 rhs = f.corner - fr.origin;
  const Vec3 neg_u = -f.u_axis;
  const Vec3 neg_v = -f.v_axis;
  const double det = det3(ray, neg_u, neg_v);
  if (std::abs(det) < 1e-12) {
    return std::nullopt;
  }
  const double t = det3(rhs, neg_u, neg_v) / det;
  const double a = det3(ray, rhs, neg_v) / det;
  const double b = det3(ray, neg_u, rhs) / det;
  if (!(t > 1e-9) || a < 0.0 || a > f.width || b < 0.0 || b > f.height) {
    return std::nullopt;
  }
  return Point2{a, b};
}

LuminanceImage render_synthetic(const SyntheticScene& scene, std::size_t width, std::size_t height) {
  scene.validate();
  const std::uint8_t bright = grey_level(scene.bright_level, scene.luminance_cap);
  const std::uint8_t background = grey_level(scene.background_level, scene.luminance_cap);
  const double x_scale = 2.0 / static_cast<double>(width);
  const double y_scale = 2.0 / static_cast<double>(height);
  LuminanceImage img(width, height, std::uint8_t{0}, scene.luminance_cap);
  for (std::size_t row = 0; row < height; ++row) {
    const double y = 1.0 - (static_cast<double>(row) + 0.5) * y_scale;
    for (std::size_t col = 0; col < width; ++col) {
      const double x = (static_cast<double>(col) + 0.5) * x_scale - 1.0;
      if (x * x + y * y > 1.0) {
        continue;
      }
      const auto hit = synthetic_facade_hit(scene, row, col, width, height);
      const bool is_bright =
          hit && std::any_of(scene.bright_rects.begin(), scene.bright_rects.end(),
                             [&](const FacadeRect& r) { return r.contains(*hit); });
      img.at(row, col) = is_bright ? bright : background;
    }
  }
  return img;
}

LuminanceImage add_noise(const LuminanceImage& img, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0)) {
    throw std::invalid_argument("noise stddev must be >= 0");
  }
  if (stddev == 0.0) {
    return img;
  }
  std::mt19937_64 engine(seed);
  constexpr double kTwoPow53 = 9007199254740992.0;
  const auto src = img.pixels();
  std::vector<std::uint8_t> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double u1 = static_cast<double>((engine() >> 11) + 1) / kTwoPow53;
    const double u2 = static_cast<double>(engine() >> 11) / kTwoPow53;
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double value = std::round(src[i] + stddev * z);
    out[i] = static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0));
  }
  return LuminanceImage(img.width(), img.height(), std::move(out), img.luminance_cap());
}

}  // namespace lumamap
