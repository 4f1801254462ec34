#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lumamap {

/// 8-bit greyscale fisheye rendering, row-major with row 0 at the top.
/// Pixel value 255 stands for `luminance_cap` cd/m^2 and the calibration is
/// linear down to 0.
class LuminanceImage {
 public:
  LuminanceImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels,
                 double luminance_cap);
  LuminanceImage(std::size_t width, std::size_t height, std::uint8_t fill, double luminance_cap);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  double luminance_cap() const { return luminance_cap_; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  std::uint8_t& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }

  /// cd/m^2 represented by the pixel.
  double luminance(std::size_t row, std::size_t col) const {
    return at(row, col) / 255.0 * luminance_cap_;
  }

  bool operator==(const LuminanceImage&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
  double luminance_cap_;
};

/// Two-valued raster; `true` is rendered as 255 when written out.
class BinaryMask {
 public:
  BinaryMask(std::size_t width, std::size_t height, bool fill = false);
  BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> flags);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  bool at(std::size_t row, std::size_t col) const { return flags_[row * width_ + col] != 0; }
  void set(std::size_t row, std::size_t col, bool value) {
    flags_[row * width_ + col] = value ? 1 : 0;
  }

  /// Raw 0/1 bytes in row-major order.
  std::span<const std::uint8_t> flags() const { return flags_; }
  std::size_t count() const;

  /// 0/255 greyscale rendering with the given calibration.
  LuminanceImage to_image(double luminance_cap) const;

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> flags_;
};

/// Integer accumulator over a stack of masks: each flagged pixel adds 255.
/// Division by `count` happens only when thresholding.
class FrequencyMap {
 public:
  FrequencyMap(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::uint32_t count() const { return count_; }
  std::span<const std::uint64_t> sums() const { return sums_; }

  std::uint64_t sum(std::size_t row, std::size_t col) const { return sums_[row * width_ + col]; }
  double mean(std::size_t row, std::size_t col) const;

  /// Adds one mask to the stack.
  void add(const BinaryMask& mask);

  bool operator==(const FrequencyMap&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint64_t> sums_;
  std::uint32_t count_ = 0;
};

struct FilterParams {
  int diameter = 15;
  double sigma_color = 75.0;
  double sigma_space = 75.0;

  /// Throws std::invalid_argument unless diameter is odd and >= 1 and both sigmas are > 0.
  void validate() const;
};

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // interleaved R,G,B

  bool operator==(const RgbImage&) const = default;
};

/// Reflects an out-of-range index back into [0, n) without repeating the edge
/// sample: -1 -> 1, n -> n - 2.
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n);

/// Edge-preserving smoothing over a square diameter x diameter window.
/// Borders use reflect_index(); results are rounded to the nearest integer.
LuminanceImage bilateral_filter(const LuminanceImage& img, const FilterParams& params);

/// Flags pixels at or above threshold/cap * 255. The comparison is done by
/// cross-multiplication so the cut value is never rounded.
BinaryMask binarize(const LuminanceImage& img, double threshold);

FrequencyMap accumulate_frequency(std::span<const BinaryMask> masks);

/// Flags pixels whose mean value reaches 255 * percentile (inclusive).
BinaryMask threshold_frequency(const FrequencyMap& freq, double percentile);

/// Majority vote over factor x factor blocks. Ties are flagged.
BinaryMask downsample_majority(const BinaryMask& mask, std::size_t factor);

/// Flagged pixels become pure red, the rest keep their grey value.
RgbImage compose_overlay(const LuminanceImage& img, const BinaryMask& mask);

/// Per-pixel mean of a frequency map, rounded half-up to 8 bits.
LuminanceImage frequency_image(const FrequencyMap& freq, double luminance_cap);

}  // namespace lumamap
