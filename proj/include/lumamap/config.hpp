#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lumamap/facade_plane.hpp"
#include "lumamap/oracle.hpp"
#include "lumamap/projection.hpp"
#include "lumamap/raster.hpp"

namespace lumamap {

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the config file's directory
  std::string timestamp;       // metadata only
};

struct NamedView {
  std::string name;  // [A-Za-z0-9_-]+, used in output file names
  ViewSpec spec;
  std::vector<ManifestEntry> images;
};

/// Scene description consumed by `lumamap synth`.
struct SceneConfig {
  std::string view;  // defaults to the first view
  std::vector<FacadeRect> bright_rects;
  double bright_level = 2500.0;
  double background_level = 1000.0;
};

struct RunConfig {
  FacadePlane facade;
  std::vector<NamedView> views;
  double threshold = 2000.0;      // cd/m^2
  double luminance_cap = 3000.0;  // cd/m^2 at pixel value 255
  double percentile = 0.5;
  FilterParams filter{15, 75.0, 75.0};
  std::size_t downsample_to = 80;
  double grid_cell = 0.05;  // m
  std::filesystem::path output_dir = "lumamap-out";
  bool write_frequency_csv = false;
  std::optional<SceneConfig> scene;

  const NamedView& view(const std::string& name) const;
  std::size_t image_count() const;
};

enum class ConfigUse {
  kProcess,  // every view needs at least one manifest image
  kScene,    // manifest optional, "scene" block required
  kAny,
};

/// Parses and validates a JSON run configuration. Errors are ConfigError with
/// the offending field path in the message, e.g. "views[1].eye".
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                            ConfigUse use = ConfigUse::kProcess);
RunConfig parse_config(const std::filesystem::path& path, ConfigUse use = ConfigUse::kProcess);

/// Scene for `scene.view` (or the first view) with the configured cap.
SyntheticScene make_scene(const RunConfig& config);

}  // namespace lumamap
