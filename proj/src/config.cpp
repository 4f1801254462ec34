#include "lumamap/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lumamap/errors.hpp"

namespace lumamap {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown_keys(const Json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      schema_error(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    schema_error(path.empty() ? key : path + "." + key, "missing required field");
  }
  return obj.at(key);
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) {
    schema_error(path, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    schema_error(path, "expected a finite number");
  }
  return v;
}

std::size_t as_count(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    schema_error(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) {
    schema_error(path, "expected a string");
  }
  return j.get<std::string>();
}

Vec3 as_vec3(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    schema_error(path, "expected an array of 3 numbers");
  }
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"),
          as_number(j[2], path + "[2]")};
}

template <typename T, typename Read>
void optional_field(const Json& obj, const char* key, const std::string& path, T& out, Read read) {
  if (obj.contains(key)) {
    out = read(obj.at(key), path.empty() ? std::string(key) : path + "." + key);
  }
}

FacadePlane read_facade(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  reject_unknown_keys(j, path, {"corner", "u_axis", "v_axis", "width", "height"});
  FacadePlane f;
  f.corner = as_vec3(require(j, "corner", path), path + ".corner");
  f.u_axis = as_vec3(require(j, "u_axis", path), path + ".u_axis");
  f.v_axis = as_vec3(require(j, "v_axis", path), path + ".v_axis");
  f.width = as_number(require(j, "width", path), path + ".width");
  f.height = as_number(require(j, "height", path), path + ".height");
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }
  return f;
}

bool valid_view_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

NamedView read_view(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  reject_unknown_keys(j, path, {"name", "eye", "target", "fov_deg"});
  NamedView view;
  view.name = as_string(require(j, "name", path), path + ".name");
  if (!valid_view_name(view.name)) {
    schema_error(path + ".name", "view names may only contain letters, digits, '_' and '-'");
  }
  view.spec.eye = as_vec3(require(j, "eye", path), path + ".eye");
  view.spec.target = as_vec3(require(j, "target", path), path + ".target");
  optional_field(j, "fov_deg", path, view.spec.fov_deg, as_number);
  try {
    view.spec.validate();
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }
  return view;
}

std::vector<ManifestEntry> read_manifest_list(const Json& j, const std::string& path,
                                              const fs::path& base_dir) {
  if (!j.is_array()) schema_error(path, "expected an array");
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string item_path = path + "[" + std::to_string(i) + "]";
    ManifestEntry entry;
    if (j[i].is_string()) {
      entry.path = j[i].get<std::string>();
    } else if (j[i].is_object()) {
      reject_unknown_keys(j[i], item_path, {"path", "timestamp"});
      entry.path = as_string(require(j[i], "path", item_path), item_path + ".path");
      optional_field(j[i], "timestamp", item_path, entry.timestamp, as_string);
    } else {
      schema_error(item_path, "expected a path string or {\"path\", \"timestamp\"} object");
    }
    if (entry.path.empty()) schema_error(item_path, "empty path");
    if (entry.path.is_relative()) entry.path = base_dir / entry.path;
    entries.push_back(std::move(entry));
  }
  return entries;
}

FacadeRect read_rect(const Json& j, const std::string& path) {
  FacadeRect r;
  if (j.is_array() && j.size() == 4) {
    r = {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"),
         as_number(j[2], path + "[2]"), as_number(j[3], path + "[3]")};
  } else if (j.is_object()) {
    reject_unknown_keys(j, path, {"u0", "v0", "u1", "v1"});
    r = {as_number(require(j, "u0", path), path + ".u0"), as_number(require(j, "v0", path), path + ".v0"),
         as_number(require(j, "u1", path), path + ".u1"), as_number(require(j, "v1", path), path + ".v1")};
  } else {
    schema_error(path, "expected [u0, v0, u1, v1] or an object with u0, v0, u1, v1");
  }
  if (!(r.u0 < r.u1 && r.v0 < r.v1)) schema_error(path, "rect must satisfy u0 < u1 and v0 < v1");
  return r;
}

SceneConfig read_scene(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  reject_unknown_keys(j, path, {"view", "bright_rects", "bright_level", "background_level"});
  SceneConfig scene;
  optional_field(j, "view", path, scene.view, as_string);
  const Json& rects = require(j, "bright_rects", path);
  if (!rects.is_array()) schema_error(path + ".bright_rects", "expected an array");
  for (std::size_t i = 0; i < rects.size(); ++i) {
    scene.bright_rects.push_back(read_rect(rects[i], path + ".bright_rects[" + std::to_string(i) + "]"));
  }
  optional_field(j, "bright_level", path, scene.bright_level, as_number);
  optional_field(j, "background_level", path, scene.background_level, as_number);
  return scene;
}

}  // namespace

const NamedView& RunConfig::view(const std::string& name) const {
  for (const auto& v : views) {
    if (v.name == name) return v;
  }
  throw ConfigError("unknown view '" + name + "'");
}

std::size_t RunConfig::image_count() const {
  std::size_t n = 0;
  for (const auto& v : views) n += v.images.size();
  return n;
}

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir, ConfigUse use) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) schema_error("<root>", "expected an object");
  reject_unknown_keys(root, "",
                      {"facade", "views", "manifest", "threshold", "luminance_cap", "percentile",
                       "filter", "downsample_to", "grid_cell", "output_dir", "write_frequency_csv",
                       "scene"});

  RunConfig cfg;
  cfg.facade = read_facade(require(root, "facade", ""), "facade");

  const Json& views = require(root, "views", "");
  if (!views.is_array() || views.empty()) schema_error("views", "expected a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < views.size(); ++i) {
    auto view = read_view(views[i], "views[" + std::to_string(i) + "]");
    if (!names.insert(view.name).second) {
      schema_error("views[" + std::to_string(i) + "].name", "duplicate view name '" + view.name + "'");
    }
    cfg.views.push_back(std::move(view));
  }

  if (root.contains("manifest")) {
    const Json& manifest = root.at("manifest");
    if (!manifest.is_object()) schema_error("manifest", "expected an object keyed by view name");
    for (const auto& [name, list] : manifest.items()) {
      auto it = std::find_if(cfg.views.begin(), cfg.views.end(),
                             [&](const NamedView& v) { return v.name == name; });
      if (it == cfg.views.end()) schema_error("manifest." + name, "no view with this name");
      it->images = read_manifest_list(list, "manifest." + name, base_dir);
    }
  }

  optional_field(root, "threshold", "", cfg.threshold, as_number);
  optional_field(root, "luminance_cap", "", cfg.luminance_cap, as_number);
  optional_field(root, "percentile", "", cfg.percentile, as_number);
  if (root.contains("filter")) {
    const Json& jf = root.at("filter");
    if (!jf.is_object()) schema_error("filter", "expected an object");
    reject_unknown_keys(jf, "filter", {"diameter", "sigma_color", "sigma_space"});
    if (jf.contains("diameter")) {
      cfg.filter.diameter = static_cast<int>(as_count(jf.at("diameter"), "filter.diameter"));
    }
    optional_field(jf, "sigma_color", "filter", cfg.filter.sigma_color, as_number);
    optional_field(jf, "sigma_space", "filter", cfg.filter.sigma_space, as_number);
  }
  optional_field(root, "downsample_to", "", cfg.downsample_to, as_count);
  optional_field(root, "grid_cell", "", cfg.grid_cell, as_number);
  if (root.contains("output_dir")) {
    fs::path out = as_string(root.at("output_dir"), "output_dir");
    cfg.output_dir = out.is_relative() ? base_dir / out : out;
  } else {
    cfg.output_dir = base_dir / cfg.output_dir;
  }
  if (root.contains("write_frequency_csv")) {
    if (!root.at("write_frequency_csv").is_boolean()) {
      schema_error("write_frequency_csv", "expected a boolean");
    }
    cfg.write_frequency_csv = root.at("write_frequency_csv").get<bool>();
  }
  if (root.contains("scene")) {
    cfg.scene = read_scene(root.at("scene"), "scene");
  }

  // invariants
  if (!(cfg.luminance_cap > 0.0)) schema_error("luminance_cap", "must be positive");
  if (!(cfg.threshold > 0.0)) schema_error("threshold", "must be positive");
  if (cfg.threshold > cfg.luminance_cap) {
    schema_error("threshold", "must not exceed luminance_cap");
  }
  if (!(cfg.percentile >= 0.0 && cfg.percentile <= 1.0)) {
    schema_error("percentile", "must lie in [0, 1]");
  }
  try {
    cfg.filter.validate();
  } catch (const std::invalid_argument& e) {
    schema_error("filter", e.what());
  }
  if (cfg.downsample_to == 0) schema_error("downsample_to", "must be positive");
  if (!(cfg.grid_cell > 0.0)) schema_error("grid_cell", "must be positive");

  if (use == ConfigUse::kProcess) {
    for (const auto& v : cfg.views) {
      if (v.images.empty()) {
        schema_error("manifest." + v.name, "view has no images");
      }
    }
  }
  if (use == ConfigUse::kScene) {
    if (!cfg.scene) schema_error("scene", "missing required field");
  }
  if (cfg.scene) {
    if (!cfg.scene->view.empty()) {
      if (!names.count(cfg.scene->view)) schema_error("scene.view", "no view with this name");
    }
    try {
      make_scene(cfg).validate();
    } catch (const std::invalid_argument& e) {
      schema_error("scene", e.what());
    }
  }
  return cfg;
}

RunConfig parse_config(const fs::path& path, ConfigUse use) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.parent_path(), use);
}

SyntheticScene make_scene(const RunConfig& config) {
  if (!config.scene) {
    throw ConfigError("scene: missing required field");
  }
  const auto& sc = *config.scene;
  const NamedView& view = sc.view.empty() ? config.views.front() : config.view(sc.view);
  SyntheticScene scene;
  scene.frame = build_frame(view.spec);
  scene.fov_deg = view.spec.fov_deg;
  scene.facade = config.facade;
  scene.bright_rects = sc.bright_rects;
  scene.bright_level = sc.bright_level;
  scene.background_level = sc.background_level;
  scene.luminance_cap = config.luminance_cap;
  return scene;
}

}  // namespace lumamap
