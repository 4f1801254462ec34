#include <random>

#include "doctest.h"
#include "lumamap/errors.hpp"
#include "lumamap/image_io.hpp"
#include "support/fixtures.hpp"

using namespace lumamap;
using lumamap::testing::read_bytes;
using lumamap::testing::TempDir;
using lumamap::testing::write_text;

namespace {

// Signature plus an IHDR chunk; enough for header validation.
std::string png_header(std::uint32_t w, std::uint32_t h, std::uint8_t depth, std::uint8_t colour) {
  std::string s = "\x89PNG\r\n\x1a\n";
  auto be32 = [&](std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) s.push_back(static_cast<char>((v >> shift) & 0xff));
  };
  be32(13);
  s += "IHDR";
  be32(w);
  be32(h);
  s.push_back(static_cast<char>(depth));
  s.push_back(static_cast<char>(colour));
  s += std::string(3, '\0');
  be32(0);  // CRC, not checked before rejection
  return s;
}

}  // namespace

TEST_CASE("PGM reading") {
  TempDir tmp;
  SUBCASE("400x400 P5 zero image") {
    write_text(tmp / "zero.pgm", "P5 400 400 255\n" + std::string(160000, '\0'));
    const auto img = load_image(tmp / "zero.pgm", 3000.0);
    CHECK(img.width() == 400);
    CHECK(img.height() == 400);
    CHECK(img.luminance_cap() == 3000.0);
    CHECK(std::all_of(img.pixels().begin(), img.pixels().end(), [](auto v) { return v == 0; }));
  }
  SUBCASE("P2 with comments") {
    write_text(tmp / "a.pgm", "P2\n# made by hand\n3 2\n255\n0 1 2\n253 254 255\n");
    const auto img = load_image(tmp / "a.pgm", 100.0);
    CHECK(img.width() == 3);
    CHECK(img.at(0, 2) == 2);
    CHECK(img.at(1, 2) == 255);
  }
  SUBCASE("errors") {
    write_text(tmp / "deep.pgm", "P5 2 2 65535\n" + std::string(8, '\0'));
    CHECK_THROWS_AS(load_image(tmp / "deep.pgm", 3000.0), IoError);
    write_text(tmp / "empty.pgm", "P5 0 4 255\n");
    CHECK_THROWS_AS(load_image(tmp / "empty.pgm", 3000.0), IoError);
    write_text(tmp / "short.pgm", "P5 4 4 255\n" + std::string(5, '\0'));
    CHECK_THROWS_AS(load_image(tmp / "short.pgm", 3000.0), IoError);
    write_text(tmp / "rgb.ppm", "P6 1 1 255\n\x01\x02\x03");
    CHECK_THROWS_AS(load_image(tmp / "rgb.ppm", 3000.0), IoError);
    CHECK_THROWS_AS(load_image(tmp / "missing.pgm", 3000.0), IoError);
  }
}

TEST_CASE("PNG reading and writing") {
  TempDir tmp;
  std::mt19937_64 rng(1);
  const auto img = lumamap::testing::random_image(31, 17, rng, 3000.0);

  SUBCASE("greyscale round trip through PNG and PGM") {
    write_grey(img, tmp / "g.png");
    write_grey(img, tmp / "g.pgm");
    CHECK(load_image(tmp / "g.png", 3000.0) == img);
    CHECK(load_image(tmp / "g.pgm", 3000.0) == img);
  }
  SUBCASE("3-channel PNG is rejected") {
    write_rgb_png(compose_overlay(img, BinaryMask(31, 17)), tmp / "c.png");
    try {
      load_image(tmp / "c.png", 3000.0);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("unsupported channels") != std::string::npos);
    }
  }
  SUBCASE("16-bit and zero-size PNG headers are rejected") {
    write_text(tmp / "deep.png", png_header(4, 4, 16, 0));
    CHECK_THROWS_WITH_AS(load_image(tmp / "deep.png", 3000.0), doctest::Contains("bit depth"), IoError);
    write_text(tmp / "zero.png", png_header(0, 4, 8, 0));
    CHECK_THROWS_WITH_AS(load_image(tmp / "zero.png", 3000.0), doctest::Contains("zero dimensions"), IoError);
    write_text(tmp / "alpha.png", png_header(4, 4, 8, 4));
    CHECK_THROWS_WITH_AS(load_image(tmp / "alpha.png", 3000.0), doctest::Contains("unsupported channels"), IoError);
  }
  SUBCASE("PNG output is deterministic") {
    write_grey(img, tmp / "a.png");
    write_grey(img, tmp / "b.png");
    CHECK(read_bytes(tmp / "a.png") == read_bytes(tmp / "b.png"));
  }
}

TEST_CASE("mask files") {
  TempDir tmp;
  std::mt19937_64 rng(2);
  const auto mask = lumamap::testing::random_mask(12, 9, 0.5, rng);
  for (const char* name : {"m.pgm", "m.png"}) {
    write_mask(mask, tmp / name);
    CHECK(load_mask(tmp / name) == mask);
  }
  const auto bytes = read_bytes(tmp / "m.pgm");
  CHECK(bytes.rfind("P5\n12 9\n255\n", 0) == 0);
  CHECK(bytes.size() == std::string("P5\n12 9\n255\n").size() + 12 * 9);

  write_text(tmp / "grey.pgm", "P2 2 1 255 0 128\n");
  CHECK_THROWS_AS(load_mask(tmp / "grey.pgm"), IoError);
}

TEST_CASE("frequency CSV") {
  TempDir tmp;
  std::vector<BinaryMask> masks{BinaryMask(2, 1, true), BinaryMask(2, 1, false)};
  masks[1].set(0, 1, true);
  write_frequency_csv(accumulate_frequency(masks), tmp / "f.csv");
  CHECK(read_bytes(tmp / "f.csv") == "row,col,mean\n0,0,127.5\n0,1,255\n");
}
