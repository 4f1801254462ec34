#include "lumamap/export.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lumamap/errors.hpp"
#include "number_format.hpp"

namespace lumamap {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using detail::format_number;

namespace {

constexpr const char* kFormatTag = "lumamap-facade/1";
constexpr double kSvgPixelsPerMeter = 100.0;

Json vec_to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json polygon_to_json(const OutlinePolygon& polygon) {
  Json vertices = Json::array();
  for (const auto& p : polygon.vertices) {
    vertices.push_back(Json::array({p.u, p.v}));
  }
  return Json{{"hole", polygon.hole}, {"area", polygon.signed_area()}, {"vertices", vertices}};
}

std::string path_data(std::span<const OutlinePolygon> polygons) {
  std::string d;
  for (const auto& polygon : polygons) {
    for (std::size_t i = 0; i < polygon.vertices.size(); ++i) {
      if (!d.empty()) d += ' ';
      d += i == 0 ? "M" : "L";
      d += format_number(polygon.vertices[i].u);
      d += ' ';
      d += format_number(polygon.vertices[i].v);
    }
    d += " Z";
  }
  return d;
}

class SvgWriter {
 public:
  SvgWriter(const FacadeGrid& grid, const std::string& style) {
    const auto w = format_number(grid.facade().width);
    const auto h = format_number(grid.facade().height);
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
         << format_number(grid.facade().width * kSvgPixelsPerMeter) << "\" height=\""
         << format_number(grid.facade().height * kSvgPixelsPerMeter) << "\" viewBox=\"0 0 " << w
         << ' ' << h << "\">\n"
         << "<style>\n"
         << ".facade{fill:none;stroke:#333333;stroke-width:0.02}\n"
         << style << "</style>\n"
         // facade v grows upwards, SVG y grows downwards
         << "<g transform=\"matrix(1 0 0 -1 0 " << h << ")\">\n"
         << "<rect class=\"facade\" x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
         << "\"/>\n";
  }

  void path(const std::string& css_class, std::span<const OutlinePolygon> polygons) {
    if (polygons.empty()) return;
    out_ << "<path class=\"" << css_class << "\" fill-rule=\"evenodd\" d=\""
         << path_data(polygons) << "\"/>\n";
  }

  std::string finish() {
    out_ << "</g>\n</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

CountRaster overlap_or_zero(const FacadeGrid& grid) {
  if (grid.layers().empty()) {
    return CountRaster(grid.cols(), grid.rows());
  }
  return overlap_count(grid);
}

}  // namespace

std::string view_svg_name(const std::string& layer_name) { return "view_" + layer_name + ".svg"; }

std::string render_result_json(const FacadeGrid& grid, std::span<const LayerOutlines> outlines) {
  const auto& f = grid.facade();
  Json doc;
  doc["format"] = kFormatTag;
  doc["facade"] = Json{{"corner", vec_to_json(f.corner)},
                       {"u_axis", vec_to_json(f.u_axis)},
                       {"v_axis", vec_to_json(f.v_axis)},
                       {"width", f.width},
                       {"height", f.height}};
  doc["grid"] = Json{{"cell_size", grid.cell_size()}, {"cols", grid.cols()}, {"rows", grid.rows()}};

  Json views = Json::array();
  for (const auto& layer : grid.layers()) {
    Json cells = Json::array();
    for (std::size_t r = 0; r < grid.rows(); ++r) {
      for (std::size_t c = 0; c < grid.cols(); ++c) {
        if (layer.flags.at(r, c)) cells.push_back(Json::array({r, c}));
      }
    }
    Json polygons = Json::array();
    for (const auto& lo : outlines) {
      if (lo.name == layer.name) {
        for (const auto& p : lo.polygons) polygons.push_back(polygon_to_json(p));
      }
    }
    const auto count = cells.size();
    views.push_back(Json{{"name", layer.name},
                         {"flagged_count", count},
                         {"flagged_cells", std::move(cells)},
                         {"outlines", std::move(polygons)}});
  }
  doc["views"] = std::move(views);
  doc["overlap_histogram"] = overlap_histogram(overlap_or_zero(grid), grid.layers().size());
  return doc.dump(2) + "\n";
}

std::string render_overlap_csv(const FacadeGrid& grid) {
  const auto overlap = overlap_or_zero(grid);
  std::string csv = "row,col,count\n";
  for (std::size_t r = 0; r < overlap.rows; ++r) {
    for (std::size_t c = 0; c < overlap.cols; ++c) {
      csv += std::to_string(r) + ',' + std::to_string(c) + ',' + std::to_string(overlap.at(r, c)) + '\n';
    }
  }
  return csv;
}

std::string render_view_svg(const FacadeGrid& grid, const LayerOutlines& outlines) {
  SvgWriter svg(grid,
                ".outline{fill:#d62728;fill-opacity:0.6;stroke:#8b0000;stroke-width:0.01}\n");
  svg.path("outline", outlines.polygons);
  return svg.finish();
}

std::string render_overlap_svg(const FacadeGrid& grid) {
  const std::size_t layer_count = grid.layers().size();
  std::string style;
  for (std::size_t k = 1; k <= layer_count; ++k) {
    style += ".overlap-" + std::to_string(k) + "{fill:#c2185b;fill-opacity:" +
             format_number(static_cast<double>(k) / static_cast<double>(layer_count)) +
             ";stroke:#880e4f;stroke-width:0.01}\n";
  }
  SvgWriter svg(grid, style);
  if (layer_count > 0) {
    const auto overlap = overlap_count(grid);
    for (std::size_t k = 1; k <= layer_count; ++k) {
      FlagRaster level(overlap.cols, overlap.rows);
      bool any = false;
      for (std::size_t i = 0; i < overlap.values.size(); ++i) {
        level.values[i] = overlap.values[i] == k ? 1 : 0;
        any = any || level.values[i];
      }
      if (any) {
        svg.path("overlap-" + std::to_string(k), extract_outlines(level, grid.cell_size()));
      }
    }
  }
  return svg.finish();
}

std::vector<fs::path> export_artifacts(const FacadeGrid& grid,
                                       std::span<const LayerOutlines> outlines,
                                       const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    written.push_back(dir / name);
  };
  emit(kResultJsonName, render_result_json(grid, outlines));
  emit(kOverlapCsvName, render_overlap_csv(grid));
  emit(kOverlapSvgName, render_overlap_svg(grid));
  for (const auto& layer : grid.layers()) {
    const LayerOutlines* match = nullptr;
    for (const auto& lo : outlines) {
      if (lo.name == layer.name) match = &lo;
    }
    const LayerOutlines empty{layer.name, {}};
    emit(view_svg_name(layer.name), render_view_svg(grid, match ? *match : empty));
  }
  return written;
}

ResultDocument parse_result_json(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw ConfigError("unsupported result format");
    }
    const Json& jf = doc.at("facade");
    FacadePlane facade{vec_from_json(jf.at("corner")), vec_from_json(jf.at("u_axis")),
                       vec_from_json(jf.at("v_axis")), jf.at("width").get<double>(),
                       jf.at("height").get<double>()};
    ResultDocument result{FacadeGrid(facade, doc.at("grid").at("cell_size").get<double>()), {}};
    auto& grid = result.grid;
    if (doc.at("grid").at("cols").get<std::size_t>() != grid.cols() ||
        doc.at("grid").at("rows").get<std::size_t>() != grid.rows()) {
      throw ConfigError("grid dimensions inconsistent with facade and cell size");
    }
    for (const auto& view : doc.at("views")) {
      const auto name = view.at("name").get<std::string>();
      FlagRaster& flags = grid.add_layer(name);
      for (const auto& cell : view.at("flagged_cells")) {
        const auto r = cell.at(0).get<std::size_t>();
        const auto c = cell.at(1).get<std::size_t>();
        if (r >= grid.rows() || c >= grid.cols()) {
          throw ConfigError("flagged cell outside grid in view '" + name + "'");
        }
        flags.at(r, c) = 1;
      }
      LayerOutlines lo{name, {}};
      for (const auto& jp : view.at("outlines")) {
        OutlinePolygon polygon;
        polygon.hole = jp.at("hole").get<bool>();
        for (const auto& v : jp.at("vertices")) {
          polygon.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
        lo.polygons.push_back(std::move(polygon));
      }
      result.outlines.push_back(std::move(lo));
    }
    return result;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed result document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid result document: ") + e.what());
  }
}

ResultDocument read_result_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_result_json(buffer.str());
}

}  // namespace lumamap
