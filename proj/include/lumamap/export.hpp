#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lumamap/facade.hpp"

namespace lumamap {

/// Written by export_artifacts() into the output directory.
inline constexpr const char* kResultJsonName = "facade.json";
inline constexpr const char* kOverlapCsvName = "overlap.csv";
inline constexpr const char* kOverlapSvgName = "overlap.svg";

/// "view_<name>.svg"
std::string view_svg_name(const std::string& layer_name);

/// Facade definition, per-view flagged cells and outlines, overlap histogram.
/// Layout described in README.md.
std::string render_result_json(const FacadeGrid& grid, std::span<const LayerOutlines> outlines);

/// "row,col,count" for every cell, row-major, row 0 at the bottom of the facade.
std::string render_overlap_csv(const FacadeGrid& grid);

std::string render_view_svg(const FacadeGrid& grid, const LayerOutlines& outlines);

/// One fill class per overlap count ("overlap-1" .. "overlap-N").
std::string render_overlap_svg(const FacadeGrid& grid);

/// Writes facade.json, overlap.csv, overlap.svg and one view_<name>.svg per
/// layer. Returns the written paths in that order. Throws IoError.
std::vector<std::filesystem::path> export_artifacts(const FacadeGrid& grid,
                                                    std::span<const LayerOutlines> outlines,
                                                    const std::filesystem::path& dir);

struct ResultDocument {
  FacadeGrid grid;
  std::vector<LayerOutlines> outlines;
};

/// Rebuilds grid layers and outlines from render_result_json() output.
/// Throws ConfigError on malformed documents.
ResultDocument parse_result_json(const std::string& text);
ResultDocument read_result_json(const std::filesystem::path& path);

}  // namespace lumamap
