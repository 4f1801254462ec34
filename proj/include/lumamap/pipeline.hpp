#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lumamap/config.hpp"
#include "lumamap/facade.hpp"
#include "lumamap/raster.hpp"

namespace lumamap {

/// Denoise then binarize one rendering; the per-image stage of the pipeline.
BinaryMask filter_and_binarize(const LuminanceImage& img, const FilterParams& filter,
                               double threshold);

/// Block size that reduces a width x height mask to target x target.
/// Throws ConfigError when the dimensions do not reduce evenly.
std::size_t downsample_factor(std::size_t width, std::size_t height, std::size_t target);

/// Projects a (downsampled) mask for one view and rasterises it into a new
/// layer named after the view. Returns the number of footprint quads.
std::size_t project_view(const BinaryMask& mask, const NamedView& view, FacadeGrid& grid);

/// Runs fn(0) .. fn(count - 1) on up to `workers` threads. If any call throws,
/// the exception of the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct PipelineOptions {
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::filesystem::path output_dir;  // empty = config.output_dir
};

struct ViewSummary {
  std::string name;
  std::size_t images = 0;
  std::size_t flagged_pixels = 0;              // full resolution, after the frequency test
  std::size_t flagged_pixels_downsampled = 0;  // after majority downsampling
  std::size_t footprints = 0;                  // quads landing on the facade
  std::size_t flagged_cells = 0;
};

struct PipelineSummary {
  std::vector<ViewSummary> views;
  std::vector<std::size_t> overlap_histogram;
  std::vector<std::pair<std::string, double>> stage_seconds;  // wall clock, in stage order
  std::vector<std::filesystem::path> files;                   // relative to the output dir
};

/// Full batch run: per view load, filter, binarize, accumulate, frequency
/// test, downsample, project and rasterise; then overlap and exports.
/// Everything is written into a staging directory first and moved into place
/// only on success. Throws ConfigError, IoError or ProcessingError naming the
/// view, file and stage that failed.
PipelineSummary run_pipeline(const RunConfig& config, const PipelineOptions& options = {});

/// Summary as JSON. The "timing" member is the only non-deterministic part.
std::string summary_to_json(const PipelineSummary& summary, bool include_timing = true);

}  // namespace lumamap
