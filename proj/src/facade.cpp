#include "lumamap/facade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace lumamap {

namespace {

constexpr double kOrthoTolerance = 1e-9;
constexpr double kOnPlaneTolerance = 1e-6;
constexpr double kOnEdgeTolerance = 1e-12;
constexpr double kCellCountSlack = 1e-9;

std::size_t cell_count(double extent, double cell_size) {
  return static_cast<std::size_t>(std::ceil(extent / cell_size - kCellCountSlack));
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  const double eu = b.u - a.u;
  const double ev = b.v - a.v;
  const double length = std::hypot(eu, ev);
  const double cross = eu * (p.v - a.v) - ev * (p.u - a.u);
  if (std::abs(cross) > kOnEdgeTolerance * std::max(length, 1.0)) {
    return false;
  }
  return p.u >= std::min(a.u, b.u) - kOnEdgeTolerance &&
         p.u <= std::max(a.u, b.u) + kOnEdgeTolerance &&
         p.v >= std::min(a.v, b.v) - kOnEdgeTolerance &&
         p.v <= std::max(a.v, b.v) + kOnEdgeTolerance;
}

}  // namespace

void FacadePlane::validate() const {
  if (!is_finite(corner) || !is_finite(u_axis) || !is_finite(v_axis)) {
    throw std::invalid_argument("facade vectors must be finite");
  }
  if (std::abs(norm(u_axis) - 1.0) > kOrthoTolerance || std::abs(norm(v_axis) - 1.0) > kOrthoTolerance) {
    throw std::invalid_argument("facade axes must be unit length");
  }
  if (std::abs(dot(u_axis, v_axis)) > kOrthoTolerance) {
    throw std::invalid_argument("facade axes must be orthogonal");
  }
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw std::invalid_argument("facade width and height must be positive");
  }
}

Point2 to_local(const Point3& p, const FacadePlane& facade) {
  const double offset = dot(p - facade.corner, facade.normal());
  if (std::abs(offset) > kOnPlaneTolerance) {
    throw std::invalid_argument("point lies " + std::to_string(offset) + " m off the facade plane");
  }
  return facade.project(p);
}

FacadeGrid::FacadeGrid(const FacadePlane& facade, double cell_size)
    : facade_(facade), cell_size_(cell_size) {
  facade_.validate();
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("cell size must be positive");
  }
  cols_ = cell_count(facade.width, cell_size);
  rows_ = cell_count(facade.height, cell_size);
}

FlagRaster& FacadeGrid::add_layer(std::string name) {
  const auto it = std::find_if(layers_.begin(), layers_.end(),
                               [&](const GridLayer& l) { return l.name == name; });
  if (it != layers_.end()) {
    throw std::invalid_argument("duplicate layer '" + name + "'");
  }
  layers_.push_back({std::move(name), FlagRaster(cols_, rows_)});
  return layers_.back().flags;
}

FlagRaster& FacadeGrid::layer(std::string_view name) {
  return const_cast<FlagRaster&>(std::as_const(*this).layer(name));
}

const FlagRaster& FacadeGrid::layer(std::string_view name) const {
  for (const auto& l : layers_) {
    if (l.name == name) {
      return l.flags;
    }
  }
  throw std::invalid_argument("unknown layer '" + std::string(name) + "'");
}

bool quad_contains(const FootprintQuad& quad, const Point2& p) {
  const auto& c = quad.corners;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (on_segment(c[i], c[(i + 1) % c.size()], p)) {
      return true;
    }
  }
  // crossing test with a ray towards +u
  bool inside = false;
  for (std::size_t i = 0, j = c.size() - 1; i < c.size(); j = i++) {
    if ((c[i].v > p.v) != (c[j].v > p.v)) {
      const double u_cross = c[j].u + (p.v - c[j].v) * (c[i].u - c[j].u) / (c[i].v - c[j].v);
      if (p.u < u_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

void rasterize_footprints(std::span<const FootprintQuad> quads, FacadeGrid& grid,
                          std::string_view layer) {
  FlagRaster& flags = grid.layer(layer);
  const double cs = grid.cell_size();
  const auto last_col = static_cast<double>(grid.cols()) - 1.0;
  const auto last_row = static_cast<double>(grid.rows()) - 1.0;
  for (const auto& quad : quads) {
    double u_min = quad.corners[0].u, u_max = u_min;
    double v_min = quad.corners[0].v, v_max = v_min;
    for (const auto& p : quad.corners) {
      u_min = std::min(u_min, p.u);
      u_max = std::max(u_max, p.u);
      v_min = std::min(v_min, p.v);
      v_max = std::max(v_max, p.v);
    }
    // candidate cells: centres (k + 0.5) * cs inside the bounding box, padded by one
    const double c0 = std::clamp(std::floor(u_min / cs - 0.5), 0.0, last_col);
    const double c1 = std::clamp(std::ceil(u_max / cs - 0.5), 0.0, last_col);
    const double r0 = std::clamp(std::floor(v_min / cs - 0.5), 0.0, last_row);
    const double r1 = std::clamp(std::ceil(v_max / cs - 0.5), 0.0, last_row);
    for (auto r = static_cast<std::size_t>(r0); r <= static_cast<std::size_t>(r1); ++r) {
      for (auto c = static_cast<std::size_t>(c0); c <= static_cast<std::size_t>(c1); ++c) {
        if (!flags.at(r, c) && quad_contains(quad, grid.cell_center(r, c))) {
          flags.at(r, c) = 1;
        }
      }
    }
  }
}

CountRaster overlap_count(const FacadeGrid& grid) {
  if (grid.layers().empty()) {
    throw std::invalid_argument("overlap_count: grid has no layers");
  }
  CountRaster overlap(grid.cols(), grid.rows());
  for (const auto& layer : grid.layers()) {
    for (std::size_t i = 0; i < overlap.values.size(); ++i) {
      overlap.values[i] += layer.flags.values[i];
    }
  }
  return overlap;
}

std::vector<std::size_t> overlap_histogram(const CountRaster& overlap, std::size_t layer_count) {
  std::vector<std::size_t> histogram(layer_count + 1, 0);
  for (const auto count : overlap.values) {
    if (count > layer_count) {
      throw std::invalid_argument("overlap count exceeds layer count");
    }
    ++histogram[count];
  }
  return histogram;
}

double OutlinePolygon::signed_area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    twice += a.u * b.v - b.u * a.v;
  }
  return 0.5 * twice;
}

std::vector<LayerOutlines> extract_layer_outlines(const FacadeGrid& grid) {
  std::vector<LayerOutlines> out;
  out.reserve(grid.layers().size());
  for (const auto& layer : grid.layers()) {
    out.push_back({layer.name, extract_outlines(layer.flags, grid.cell_size())});
  }
  return out;
}

}  // namespace lumamap
