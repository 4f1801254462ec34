#include <cmath>
#include <random>

#include "doctest.h"
#include "lumamap/oracle.hpp"
#include "support/fixtures.hpp"

using namespace lumamap;
using lumamap::testing::desk_view;
using lumamap::testing::scene_with;

TEST_CASE("scene validation") {
  auto scene = scene_with(desk_view(), {{3, 1, 6, 2.5}});
  CHECK_NOTHROW(scene.validate());
  scene.bright_level = 900.0;
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
  scene = scene_with(desk_view(), {{3, 1, 11, 2.5}});
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
  scene = scene_with(desk_view(), {{3, 1, 3, 2.5}});
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
}

TEST_CASE("render_synthetic levels") {
  SUBCASE("no bright rects") {
    const auto img = render_synthetic(scene_with(desk_view(), {}), 60, 60);
    const auto bg = static_cast<std::uint8_t>(std::lround(1000.0 / 3000.0 * 255));
    for (std::size_t r = 0; r < 60; ++r)
      for (std::size_t c = 0; c < 60; ++c) {
        const double du = 2 * (c + 0.5) / 60 - 1, dv = 2 * (r + 0.5) / 60 - 1;
        CHECK(img.at(r, c) == (std::hypot(du, dv) <= 1.0 ? bg : 0));
      }
    CHECK(binarize(img, 2000.0).count() == 0);
  }
  SUBCASE("whole facade bright") {
    const auto img = render_synthetic(scene_with(desk_view(), {{0, 0, 10, 3.7}}), 60, 60);
    const auto bright = static_cast<std::uint8_t>(std::lround(2500.0 / 3000.0 * 255));
    std::size_t hits = 0;
    for (std::size_t r = 0; r < 60; ++r)
      for (std::size_t c = 0; c < 60; ++c)
        if (synthetic_facade_hit(scene_with(desk_view(), {}), r, c, 60, 60)) {
          CHECK(img.at(r, c) == bright);
          ++hits;
        }
    CHECK(hits > 0);
  }
}

TEST_CASE("binarised render equals the ray-cast ground truth") {
  const std::vector<FacadeRect> rects{{3, 1, 6, 2.5}, {7.5, 0.2, 8.0, 3.5}};
  for (const auto& view : {desk_view(), desk_view(-2.0, 1.5, 1.0), desk_view(3.0, 0.8, 2.0)}) {
    const auto scene = scene_with(view, rects);
    const std::size_t w = 97, h = 83;
    const auto mask = binarize(render_synthetic(scene, w, h), 2000.0);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const auto hit = synthetic_facade_hit(scene, r, c, w, h);
        const bool truth = hit && std::any_of(rects.begin(), rects.end(), [&](const auto& q) { return q.contains(*hit); });
        CHECK(mask.at(r, c) == truth);
      }
    }
  }
}

TEST_CASE("centre ray hits the facade straight ahead") {
  // desk view looks along +y at z = 1.2; the facade corner sits at x = -5
  const auto hit = synthetic_facade_hit(scene_with(desk_view(), {}), 40, 40, 81, 81);
  REQUIRE(hit);
  CHECK(hit->u == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(hit->v == doctest::Approx(1.2).epsilon(1e-12));
  CHECK_FALSE(synthetic_facade_hit(scene_with(desk_view(), {}), 0, 0, 81, 81));
}

TEST_CASE("add_noise") {
  const LuminanceImage flat(100, 100, std::uint8_t{128}, 3000.0);
  SUBCASE("zero stddev is the identity") { CHECK(add_noise(flat, 0.0, 1) == flat); }
  SUBCASE("same seed, same image; different seed, different image") {
    CHECK(add_noise(flat, 10.0, 42) == add_noise(flat, 10.0, 42));
    CHECK_FALSE(add_noise(flat, 10.0, 42) == add_noise(flat, 10.0, 43));
  }
  SUBCASE("zero mean and the requested spread") {
    const auto noisy = add_noise(flat, 10.0, 42);
    double sum = 0, sq = 0;
    for (auto v : noisy.pixels()) {
      sum += v;
      sq += (v - 128.0) * (v - 128.0);
    }
    const double n = static_cast<double>(noisy.pixels().size());
    CHECK(std::abs(sum / n - 128.0) < 0.5);
    CHECK(std::sqrt(sq / n) == doctest::Approx(10.0).epsilon(0.05));
  }
  SUBCASE("clamped to the grey range") {
    const LuminanceImage white(50, 50, std::uint8_t{255}, 3000.0);
    const auto noisy = add_noise(white, 50.0, 3);
    CHECK(std::all_of(noisy.pixels().begin(), noisy.pixels().end(), [](auto v) { return v <= 255; }));
    CHECK(noisy.at(0, 0) <= 255);
  }
  CHECK_THROWS_AS(add_noise(flat, -1.0, 1), std::invalid_argument);
}

TEST_CASE("bright fraction is stable across resolutions") {
  const auto scene = scene_with(desk_view(), {{3, 1, 6, 2.5}});
  auto fraction = [&](std::size_t n) {
    const auto mask = binarize(render_synthetic(scene, n, n), 2000.0);
    return static_cast<double>(mask.count()) / static_cast<double>(n * n);
  };
  const double coarse = fraction(200);
  const double fine = fraction(400);
  CHECK(std::abs(coarse - fine) / fine < 0.05);
}
