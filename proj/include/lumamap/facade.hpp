#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lumamap/facade_plane.hpp"
#include "lumamap/geometry.hpp"
#include "lumamap/projection.hpp"

namespace lumamap {

/// Row-major raster over facade cells. Row 0 is the bottom row (v = 0).
template <typename T>
struct CellRaster {
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<T> values;

  CellRaster() = default;
  CellRaster(std::size_t c, std::size_t r, T fill = T{}) : cols(c), rows(r), values(c * r, fill) {}

  T at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
  T& at(std::size_t row, std::size_t col) { return values[row * cols + col]; }

  bool operator==(const CellRaster&) const = default;
};

using FlagRaster = CellRaster<std::uint8_t>;
using CountRaster = CellRaster<std::uint32_t>;

struct GridLayer {
  std::string name;
  FlagRaster flags;
};

/// Facade rasterised into square cells, carrying one flag layer per view.
/// cols = ceil(width / cell_size) and rows = ceil(height / cell_size), with a
/// 1e-9 slack so 3.7 / 0.05 gives 74 rather than 75.
class FacadeGrid {
 public:
  FacadeGrid(const FacadePlane& facade, double cell_size);

  const FacadePlane& facade() const { return facade_; }
  double cell_size() const { return cell_size_; }
  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }

  Point2 cell_center(std::size_t row, std::size_t col) const {
    return {(static_cast<double>(col) + 0.5) * cell_size_,
            (static_cast<double>(row) + 0.5) * cell_size_};
  }

  /// Appends an empty layer. Throws std::invalid_argument on duplicates.
  FlagRaster& add_layer(std::string name);

  /// Throws std::invalid_argument for unknown names.
  FlagRaster& layer(std::string_view name);
  const FlagRaster& layer(std::string_view name) const;

  const std::vector<GridLayer>& layers() const { return layers_; }

 private:
  FacadePlane facade_;
  double cell_size_;
  std::size_t cols_;
  std::size_t rows_;
  std::vector<GridLayer> layers_;
};

/// Inclusive point-in-quad test: points on an edge or vertex count as inside.
bool quad_contains(const FootprintQuad& quad, const Point2& p);

/// Flags every cell of `layer` whose centre lies inside or on at least one quad.
void rasterize_footprints(std::span<const FootprintQuad> quads, FacadeGrid& grid,
                          std::string_view layer);

/// Per-cell number of layers flagging the cell. Throws std::invalid_argument
/// on a grid without layers.
CountRaster overlap_count(const FacadeGrid& grid);

/// histogram[k] = number of cells covered by exactly k layers, k = 0..layers.
std::vector<std::size_t> overlap_histogram(const CountRaster& overlap, std::size_t layer_count);

/// Closed ring (first vertex not repeated) in facade-local meters.
struct OutlinePolygon {
  std::vector<Point2> vertices;
  bool hole = false;

  /// Positive for counter-clockwise rings.
  double signed_area() const;

  bool operator==(const OutlinePolygon&) const = default;
};

struct LayerOutlines {
  std::string name;
  std::vector<OutlinePolygon> polygons;
};

/// Traces the boundary of the flagged cells along cell edges (marching squares
/// on the cell-corner lattice). Outer rings run counter-clockwise, holes
/// clockwise; collinear vertices are dropped and each ring starts at its
/// lowest, then leftmost vertex. Diagonally touching cells form separate rings.
std::vector<OutlinePolygon> extract_outlines(const FlagRaster& flags, double cell_size);

/// Outlines for every layer of the grid, in layer order.
std::vector<LayerOutlines> extract_layer_outlines(const FacadeGrid& grid);

}  // namespace lumamap
