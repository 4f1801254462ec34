// Marching squares over the cell-corner lattice of a binary facade raster.
//
// Lattice vertex (x, y) sits at the shared corner of cells (x-1, y-1), (x, y-1),
// (x-1, y) and (x, y). The four cells form the case index
//   TL = 8, TR = 4, BR = 2, BL = 1
// and each case fixes the direction in which the contour leaves the vertex with
// the flagged region on its left. The two saddle cases turn left relative to
// the direction of arrival, which keeps diagonal neighbours in separate rings.

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>

#include "lumamap/facade.hpp"

namespace lumamap {

namespace {

enum Direction : std::uint8_t { kEast = 0, kNorth = 1, kWest = 2, kSouth = 3, kNone = 4 };

constexpr std::array<int, 4> kStepX{1, 0, -1, 0};
constexpr std::array<int, 4> kStepY{0, 1, 0, -1};

constexpr std::array<Direction, 16> kExit{
    kNone,   // 0
    kWest,   // 1  BL
    kSouth,  // 2  BR
    kWest,   // 3  BR BL
    kEast,   // 4  TR
    kNone,   // 5  TR BL (saddle)
    kSouth,  // 6  TR BR
    kWest,   // 7  TR BR BL
    kNorth,  // 8  TL
    kNorth,  // 9  TL BL
    kNone,   // 10 TL BR (saddle)
    kNorth,  // 11 TL BR BL
    kEast,   // 12 TL TR
    kEast,   // 13 TL TR BL
    kSouth,  // 14 TL TR BR
    kNone,   // 15
};

Direction saddle_exit(int cell_case, Direction arrival) {
  if (cell_case == 5) {
    return arrival == kNorth ? kWest : kEast;
  }
  return arrival == kEast ? kNorth : kSouth;
}

class LatticeTracer {
 public:
  explicit LatticeTracer(const FlagRaster& flags)
      : flags_(flags), width_(flags.cols + 1), visited_(width_ * (flags.rows + 1), 0) {}

  std::vector<std::vector<std::array<std::size_t, 2>>> trace_all() {
    std::vector<std::vector<std::array<std::size_t, 2>>> rings;
    for (std::size_t y = 0; y <= flags_.rows; ++y) {
      for (std::size_t x = 0; x <= flags_.cols; ++x) {
        const int c = cell_case(x, y);
        for (const Direction d : exits(c)) {
          if (!is_visited(x, y, d)) {
            rings.push_back(trace(x, y, d));
          }
        }
      }
    }
    return rings;
  }

 private:
  bool cell(std::ptrdiff_t col, std::ptrdiff_t row) const {
    if (col < 0 || row < 0 || col >= static_cast<std::ptrdiff_t>(flags_.cols) ||
        row >= static_cast<std::ptrdiff_t>(flags_.rows)) {
      return false;
    }
    return flags_.at(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) != 0;
  }

  int cell_case(std::size_t x, std::size_t y) const {
    const auto sx = static_cast<std::ptrdiff_t>(x);
    const auto sy = static_cast<std::ptrdiff_t>(y);
    return (cell(sx - 1, sy) ? 8 : 0) | (cell(sx, sy) ? 4 : 0) | (cell(sx, sy - 1) ? 2 : 0) |
           (cell(sx - 1, sy - 1) ? 1 : 0);
  }

  static std::vector<Direction> exits(int c) {
    if (c == 5) return {kEast, kWest};
    if (c == 10) return {kNorth, kSouth};
    if (kExit[c] == kNone) return {};
    return {kExit[c]};
  }

  bool is_visited(std::size_t x, std::size_t y, Direction d) const {
    return (visited_[y * width_ + x] >> d) & 1u;
  }
  void mark(std::size_t x, std::size_t y, Direction d) {
    visited_[y * width_ + x] |= static_cast<std::uint8_t>(1u << d);
  }

  std::vector<std::array<std::size_t, 2>> trace(std::size_t x0, std::size_t y0, Direction d0) {
    std::vector<std::array<std::size_t, 2>> corners;
    std::size_t x = x0;
    std::size_t y = y0;
    Direction d = d0;
    Direction previous = kNone;
    do {
      if (d != previous) {
        corners.push_back({x, y});
      }
      mark(x, y, d);
      x = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + kStepX[d]);
      y = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(y) + kStepY[d]);
      previous = d;
      const int c = cell_case(x, y);
      d = (c == 5 || c == 10) ? saddle_exit(c, previous) : kExit[c];
      if (d == kNone) {
        throw std::logic_error("marching squares lost the contour");
      }
    } while (x != x0 || y != y0 || d != d0);
    // the start vertex is a corner only if the closing edge turns into it
    if (previous == d0 && corners.size() > 1) {
      corners.erase(corners.begin());
    }
    return corners;
  }

  const FlagRaster& flags_;
  std::size_t width_;
  std::vector<std::uint8_t> visited_;
};

}  // namespace

std::vector<OutlinePolygon> extract_outlines(const FlagRaster& flags, double cell_size) {
  if (flags.cols == 0 || flags.rows == 0) {
    throw std::invalid_argument("extract_outlines: empty raster");
  }
  std::vector<OutlinePolygon> polygons;
  for (auto& ring : LatticeTracer(flags).trace_all()) {
    const auto lowest = std::min_element(ring.begin(), ring.end(), [](const auto& a, const auto& b) {
      return a[1] != b[1] ? a[1] < b[1] : a[0] < b[0];
    });
    std::rotate(ring.begin(), lowest, ring.end());
    OutlinePolygon polygon;
    polygon.vertices.reserve(ring.size());
    for (const auto& [x, y] : ring) {
      polygon.vertices.push_back(
          {static_cast<double>(x) * cell_size, static_cast<double>(y) * cell_size});
    }
    polygon.hole = polygon.signed_area() < 0.0;
    polygons.push_back(std::move(polygon));
  }
  return polygons;
}

}  // namespace lumamap
