#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lumamap/config.hpp"
#include "lumamap/image_io.hpp"
#include "lumamap/facade.hpp"
#include "lumamap/oracle.hpp"
#include "lumamap/projection.hpp"
#include "lumamap/raster.hpp"

namespace lumamap::testing {

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "lumamap-test-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// 10.0 m x 3.7 m south elevation in the plane y = 3, seen from a desk at the origin.
inline FacadePlane south_facade() {
  return FacadePlane{{-5.0, 3.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, 10.0, 3.7};
}

inline ViewSpec desk_view(double x = 0.0, double eye_height = 1.2, double target_x = 0.0) {
  return ViewSpec{{x, 0.0, eye_height}, {target_x, 1.0, eye_height}, 180.0};
}

inline SyntheticScene scene_with(const ViewSpec& view, std::vector<FacadeRect> rects) {
  SyntheticScene scene;
  scene.frame = build_frame(view);
  scene.facade = south_facade();
  scene.bright_rects = std::move(rects);
  scene.bright_level = 2500.0;
  scene.background_level = 1000.0;
  scene.luminance_cap = 3000.0;
  return scene;
}

inline BinaryMask random_mask(std::size_t w, std::size_t h, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution flag(p);
  BinaryMask m(w, h);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) m.set(r, c, flag(rng));
  return m;
}

inline LuminanceImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng,
                                   double cap = 3000.0) {
  std::uniform_int_distribution<int> level(0, 255);
  std::vector<std::uint8_t> px(w * h);
  for (auto& v : px) v = static_cast<std::uint8_t>(level(rng));
  return LuminanceImage(w, h, std::move(px), cap);
}

struct SyntheticRun {
  std::vector<ViewSpec> views;
  std::vector<FacadeRect> rects;
  std::size_t images_per_view = 3;
  std::size_t size = 160;
  std::size_t downsample_to = 80;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

/// Three desk positions along the facade, each looking slightly inwards.
inline std::vector<ViewSpec> three_desks() {
  return {desk_view(-2.0, 1.2, -1.0), desk_view(0.0, 1.2, 0.0), desk_view(2.0, 1.2, 1.0)};
}

/// Renders every view into `dir` and writes dir/config.json describing the run.
/// Views are named v0, v1, ...; returns the config path.
inline std::filesystem::path write_synthetic_run(const std::filesystem::path& dir, const SyntheticRun& run) {
  using Json = nlohmann::ordered_json;
  const auto f = south_facade();
  auto vec = [](const Vec3& v) { return Json::array({v.x, v.y, v.z}); };
  Json cfg;
  cfg["facade"] = {{"corner", vec(f.corner)}, {"u_axis", vec(f.u_axis)}, {"v_axis", vec(f.v_axis)},
                   {"width", f.width}, {"height", f.height}};
  cfg["views"] = Json::array();
  cfg["manifest"] = Json::object();
  std::uint64_t seed = run.seed;
  for (std::size_t v = 0; v < run.views.size(); ++v) {
    const std::string name = "v" + std::to_string(v);
    cfg["views"].push_back({{"name", name}, {"eye", vec(run.views[v].eye)}, {"target", vec(run.views[v].target)}});
    const auto clean = render_synthetic(scene_with(run.views[v], run.rects), run.size, run.size);
    Json list = Json::array();
    for (std::size_t i = 0; i < run.images_per_view; ++i) {
      const std::string file = name + "_" + std::to_string(i) + ".pgm";
      write_grey(run.noise > 0 ? add_noise(clean, run.noise, seed++) : clean, dir / file);
      list.push_back({{"path", file}, {"timestamp", "2024-06-21T" + std::to_string(10 + i) + ":00"}});
    }
    cfg["manifest"][name] = list;
  }
  cfg["downsample_to"] = run.downsample_to;
  cfg["output_dir"] = "out";
  write_text(dir / "config.json", cfg.dump(2));
  return dir / "config.json";
}

/// IoU between a flag raster and the cells whose centres fall in `rect`.
inline double iou_with_rect(const FlagRaster& flags, double cell_size, const FacadeRect& rect) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t r = 0; r < flags.rows; ++r) {
    for (std::size_t c = 0; c < flags.cols; ++c) {
      const Point2 center{(c + 0.5) * cell_size, (r + 0.5) * cell_size};
      const bool truth = rect.contains(center);
      const bool got = flags.at(r, c) != 0;
      inter += (truth && got) ? 1 : 0;
      uni += (truth || got) ? 1 : 0;
    }
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace lumamap::testing
