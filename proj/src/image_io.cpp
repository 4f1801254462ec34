#include "lumamap/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lumamap/errors.hpp"
#include "number_format.hpp"

namespace lumamap {

namespace fs = std::filesystem;

namespace {

struct GreyRaster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failure on " + path.string());
  }
  return bytes;
}

class PgmReader {
 public:
  PgmReader(const std::vector<std::uint8_t>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  GreyRaster read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || (bytes_[1] != '5' && bytes_[1] != '2')) {
      fail("not a P2/P5 PGM");
    }
    const bool binary = bytes_[1] == '5';
    pos_ = 2;
    GreyRaster raster;
    raster.width = next_int();
    raster.height = next_int();
    const std::size_t maxval = next_int();
    if (raster.width == 0 || raster.height == 0) {
      fail("zero dimensions");
    }
    if (maxval != 255) {
      fail("unsupported bit depth (maxval " + std::to_string(maxval) + ", expected 255)");
    }
    const std::size_t count = raster.width * raster.height;
    raster.pixels.resize(count);
    if (binary) {
      // exactly one whitespace byte separates the header from the data
      if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
        fail("malformed header");
      }
      ++pos_;
      if (bytes_.size() - pos_ < count) {
        fail("truncated pixel data");
      }
      std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), count, raster.pixels.begin());
    } else {
      for (auto& px : raster.pixels) {
        const std::size_t v = next_int();
        if (v > 255) {
          fail("pixel value out of range");
        }
        px = static_cast<std::uint8_t>(v);
      }
    }
    return raster;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw IoError(path_.string() + ": " + why);
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail("malformed header");
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 30)) fail("number too large");
      ++pos_;
    }
    return value;
  }

  const std::vector<std::uint8_t>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

GreyRaster read_png(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  // Validate the IHDR ourselves; the simplified libpng reader would silently
  // convert colour or 16-bit data.
  if (bytes.size() < 33 || std::memcmp(&bytes[12], "IHDR", 4) != 0) {
    throw IoError(path.string() + ": malformed PNG header");
  }
  const std::uint32_t width = read_be32(&bytes[16]);
  const std::uint32_t height = read_be32(&bytes[20]);
  const int bit_depth = bytes[24];
  const int color_type = bytes[25];
  if (width == 0 || height == 0) {
    throw IoError(path.string() + ": zero dimensions");
  }
  if (color_type != 0) {
    throw IoError(path.string() + ": unsupported channels (PNG colour type " +
                  std::to_string(color_type) + ", expected greyscale)");
  }
  if (bit_depth != 8) {
    throw IoError(path.string() + ": unsupported bit depth " + std::to_string(bit_depth));
  }

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  GreyRaster raster{width, height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(image))};
  if (!png_image_finish_read(&image, nullptr, raster.pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": " + message);
  }
  return raster;
}

GreyRaster read_grey(const fs::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= kPngSignature.size() &&
      std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    return read_png(bytes, path);
  }
  return PgmReader(bytes, path).read();
}

bool is_png_path(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

void write_png(const fs::path& path, std::size_t width, std::size_t height, png_uint_32 format,
               const std::uint8_t* data) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, data, 0, nullptr)) {
    throw IoError("cannot write " + path.string() + ": " + image.message);
  }
}

void write_pgm(const fs::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

}  // namespace

LuminanceImage load_image(const fs::path& path, double luminance_cap) {
  auto raster = read_grey(path);
  return LuminanceImage(raster.width, raster.height, std::move(raster.pixels), luminance_cap);
}

BinaryMask load_mask(const fs::path& path) {
  auto raster = read_grey(path);
  for (auto& px : raster.pixels) {
    if (px != 0 && px != 255) {
      throw IoError(path.string() + ": mask contains value " + std::to_string(px) +
                    " (expected 0 or 255)");
    }
  }
  return BinaryMask(raster.width, raster.height, std::move(raster.pixels));
}

void write_grey(const LuminanceImage& img, const fs::path& path) {
  if (is_png_path(path)) {
    write_png(path, img.width(), img.height(), PNG_FORMAT_GRAY, img.pixels().data());
  } else {
    write_pgm(path, img.width(), img.height(), img.pixels());
  }
}

void write_mask(const BinaryMask& mask, const fs::path& path) {
  // cap is irrelevant for the written bytes
  write_grey(mask.to_image(255.0), path);
}

void write_rgb_png(const RgbImage& img, const fs::path& path) {
  if (img.rgb.size() != img.width * img.height * 3 || img.rgb.empty()) {
    throw std::invalid_argument("malformed RGB raster");
  }
  write_png(path, img.width, img.height, PNG_FORMAT_RGB, img.rgb.data());
}

void write_frequency_csv(const FrequencyMap& freq, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "row,col,mean\n";
  for (std::size_t r = 0; r < freq.height(); ++r) {
    for (std::size_t c = 0; c < freq.width(); ++c) {
      out << r << ',' << c << ',' << detail::format_number(freq.mean(r, c)) << '\n';
    }
  }
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

}  // namespace lumamap
