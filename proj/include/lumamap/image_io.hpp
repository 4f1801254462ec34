#pragma once

#include <filesystem>

#include "lumamap/raster.hpp"

namespace lumamap {

/// Reads an 8-bit greyscale PGM (P2 or P5, maxval 255) or PNG. Anything with
/// colour or alpha channels, or a bit depth other than 8, is rejected with
/// IoError.
LuminanceImage load_image(const std::filesystem::path& path, double luminance_cap);

/// Reads a 0/255 raster written by write_mask(). Intermediate grey values are
/// rejected.
BinaryMask load_mask(const std::filesystem::path& path);

/// Output format follows the extension: ".png" writes PNG, anything else binary PGM.
void write_grey(const LuminanceImage& img, const std::filesystem::path& path);
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

void write_rgb_png(const RgbImage& img, const std::filesystem::path& path);

/// CSV with header "row,col,mean", one line per pixel in row-major order.
void write_frequency_csv(const FrequencyMap& freq, const std::filesystem::path& path);

}  // namespace lumamap
