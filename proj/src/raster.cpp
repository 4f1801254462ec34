#include "lumamap/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lumamap {

namespace {

void require_dimensions(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) {
    throw std::invalid_argument("raster dimensions must be positive");
  }
}

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
  }
}

}  // namespace

LuminanceImage::LuminanceImage(std::size_t width, std::size_t height,
                               std::vector<std::uint8_t> pixels, double luminance_cap)
    : width_(width), height_(height), pixels_(std::move(pixels)), luminance_cap_(luminance_cap) {
  require_dimensions(width, height);
  if (pixels_.size() != width * height) {
    throw std::invalid_argument("pixel count does not match dimensions");
  }
  if (!(luminance_cap > 0.0) || !std::isfinite(luminance_cap)) {
    throw std::invalid_argument("luminance cap must be positive");
  }
}

LuminanceImage::LuminanceImage(std::size_t width, std::size_t height, std::uint8_t fill,
                               double luminance_cap)
    : LuminanceImage(width, height, std::vector<std::uint8_t>(width * height, fill),
                     luminance_cap) {}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, bool fill)
    : width_(width), height_(height), flags_(width * height, fill ? 1 : 0) {
  require_dimensions(width, height);
}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> flags)
    : width_(width), height_(height), flags_(std::move(flags)) {
  require_dimensions(width, height);
  if (flags_.size() != width * height) {
    throw std::invalid_argument("flag count does not match dimensions");
  }
  for (auto& f : flags_) {
    f = f != 0 ? 1 : 0;
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), 1));
}

LuminanceImage BinaryMask::to_image(double luminance_cap) const {
  std::vector<std::uint8_t> pixels(flags_.size());
  std::transform(flags_.begin(), flags_.end(), pixels.begin(),
                 [](std::uint8_t f) { return static_cast<std::uint8_t>(f ? 255 : 0); });
  return LuminanceImage(width_, height_, std::move(pixels), luminance_cap);
}

FrequencyMap::FrequencyMap(std::size_t width, std::size_t height)
    : width_(width), height_(height), sums_(width * height, 0) {
  require_dimensions(width, height);
}

double FrequencyMap::mean(std::size_t row, std::size_t col) const {
  if (count_ == 0) {
    throw std::logic_error("frequency map has no accumulated masks");
  }
  return static_cast<double>(sum(row, col)) / static_cast<double>(count_);
}

void FrequencyMap::add(const BinaryMask& mask) {
  require_same_shape(*this, mask, "accumulate_frequency");
  const auto flags = mask.flags();
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    sums_[i] += flags[i] ? 255u : 0u;
  }
  ++count_;
}

void FilterParams::validate() const {
  if (diameter < 1 || diameter % 2 == 0) {
    throw std::invalid_argument("filter diameter must be odd and >= 1");
  }
  if (!(sigma_color > 0.0) || !(sigma_space > 0.0)) {
    throw std::invalid_argument("filter sigmas must be positive");
  }
}

std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) {
    return 0;
  }
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) {
    i += period;
  }
  return i < n ? i : period - i;
}

LuminanceImage bilateral_filter(const LuminanceImage& img, const FilterParams& params) {
  params.validate();
  const auto width = static_cast<std::ptrdiff_t>(img.width());
  const auto height = static_cast<std::ptrdiff_t>(img.height());
  const std::ptrdiff_t radius = params.diameter / 2;
  const std::ptrdiff_t padded_width = width + 2 * radius;

  // Pad once so the inner loop is a flat offset walk.
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(padded_width * (height + 2 * radius)));
  for (std::ptrdiff_t r = -radius; r < height + radius; ++r) {
    const auto src_row = static_cast<std::size_t>(reflect_index(r, height));
    for (std::ptrdiff_t c = -radius; c < width + radius; ++c) {
      const auto src_col = static_cast<std::size_t>(reflect_index(c, width));
      padded[static_cast<std::size_t>((r + radius) * padded_width + c + radius)] =
          img.at(src_row, src_col);
    }
  }

  const double space_denom = 2.0 * params.sigma_space * params.sigma_space;
  const double color_denom = 2.0 * params.sigma_color * params.sigma_color;

  std::vector<double> space_weight;
  std::vector<std::ptrdiff_t> offset;
  for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy) {
    for (std::ptrdiff_t dx = -radius; dx <= radius; ++dx) {
      space_weight.push_back(std::exp(-static_cast<double>(dy * dy + dx * dx) / space_denom));
      offset.push_back(dy * padded_width + dx);
    }
  }
  std::array<double, 256> color_weight{};
  for (int d = 0; d < 256; ++d) {
    color_weight[static_cast<std::size_t>(d)] = std::exp(-static_cast<double>(d * d) / color_denom);
  }

  std::vector<std::uint8_t> out(img.pixels().size());
  for (std::ptrdiff_t r = 0; r < height; ++r) {
    const std::uint8_t* row = padded.data() + (r + radius) * padded_width + radius;
    for (std::ptrdiff_t c = 0; c < width; ++c) {
      const std::uint8_t* center = row + c;
      const int value = *center;
      double sum = 0.0;
      double norm = 0.0;
      for (std::size_t k = 0; k < offset.size(); ++k) {
        const int neighbor = center[offset[k]];
        const double w = space_weight[k] * color_weight[static_cast<std::size_t>(std::abs(value - neighbor))];
        sum += w * neighbor;
        norm += w;
      }
      out[static_cast<std::size_t>(r * width + c)] =
          static_cast<std::uint8_t>(std::floor(sum / norm + 0.5));
    }
  }
  return LuminanceImage(img.width(), img.height(), std::move(out), img.luminance_cap());
}

BinaryMask binarize(const LuminanceImage& img, double threshold) {
  const double cap = img.luminance_cap();
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("threshold must be positive");
  }
  if (threshold > cap) {
    throw std::invalid_argument("threshold exceeds luminance cap");
  }
  // pixel >= threshold / cap * 255  <=>  pixel * cap >= threshold * 255
  const double scaled_threshold = threshold * 255.0;
  const auto pixels = img.pixels();
  std::vector<std::uint8_t> flags(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    flags[i] = pixels[i] * cap >= scaled_threshold ? 1 : 0;
  }
  return BinaryMask(img.width(), img.height(), std::move(flags));
}

FrequencyMap accumulate_frequency(std::span<const BinaryMask> masks) {
  if (masks.empty()) {
    throw std::invalid_argument("accumulate_frequency: no masks");
  }
  FrequencyMap freq(masks.front().width(), masks.front().height());
  for (const auto& mask : masks) {
    freq.add(mask);
  }
  return freq;
}

BinaryMask threshold_frequency(const FrequencyMap& freq, double percentile) {
  if (!(percentile >= 0.0 && percentile <= 1.0)) {
    throw std::invalid_argument("percentile must lie in [0, 1]");
  }
  if (freq.count() == 0) {
    throw std::invalid_argument("threshold_frequency: empty frequency map");
  }
  const double cut = 255.0 * percentile;
  const double count = freq.count();
  const auto sums = freq.sums();
  std::vector<std::uint8_t> flags(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    flags[i] = static_cast<double>(sums[i]) / count >= cut ? 1 : 0;
  }
  return BinaryMask(freq.width(), freq.height(), std::move(flags));
}

BinaryMask downsample_majority(const BinaryMask& mask, std::size_t factor) {
  if (factor == 0) {
    throw std::invalid_argument("downsample factor must be >= 1");
  }
  if (mask.width() % factor != 0 || mask.height() % factor != 0) {
    throw std::invalid_argument("mask dimensions " + std::to_string(mask.width()) + "x" +
                                std::to_string(mask.height()) + " are not divisible by " +
                                std::to_string(factor));
  }
  const std::size_t out_w = mask.width() / factor;
  const std::size_t out_h = mask.height() / factor;
  const std::size_t block = factor * factor;
  BinaryMask out(out_w, out_h);
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      std::size_t votes = 0;
      for (std::size_t i = 0; i < factor; ++i) {
        for (std::size_t j = 0; j < factor; ++j) {
          votes += mask.at(r * factor + i, c * factor + j) ? 1 : 0;
        }
      }
      out.set(r, c, 2 * votes >= block);
    }
  }
  return out;
}

RgbImage compose_overlay(const LuminanceImage& img, const BinaryMask& mask) {
  require_same_shape(img, mask, "compose_overlay");
  RgbImage out{img.width(), img.height(), std::vector<std::uint8_t>(img.pixels().size() * 3)};
  const auto pixels = img.pixels();
  const auto flags = mask.flags();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    std::uint8_t* px = &out.rgb[3 * i];
    if (flags[i]) {
      px[0] = 255;
      px[1] = 0;
      px[2] = 0;
    } else {
      px[0] = px[1] = px[2] = pixels[i];
    }
  }
  return out;
}

LuminanceImage frequency_image(const FrequencyMap& freq, double luminance_cap) {
  if (freq.count() == 0) {
    throw std::invalid_argument("frequency_image: empty frequency map");
  }
  const auto sums = freq.sums();
  const std::uint64_t count = freq.count();
  std::vector<std::uint8_t> pixels(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    // round(sum / count) in integers, halves rounded up
    pixels[i] = static_cast<std::uint8_t>((2 * sums[i] + count) / (2 * count));
  }
  return LuminanceImage(freq.width(), freq.height(), std::move(pixels), luminance_cap);
}

}  // namespace lumamap
