#include "lumamap/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "json.hpp"
#include "lumamap/errors.hpp"
#include "lumamap/export.hpp"
#include "lumamap/image_io.hpp"
#include "lumamap/projection.hpp"

namespace lumamap {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr const char* kStagingName = ".lumamap-staging";
constexpr const char* kSummaryName = "summary.json";

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Accumulates wall-clock seconds per named stage, keeping first-seen order.
class StageTimer {
 public:
  void add(const std::string& stage, double seconds) {
    std::lock_guard lock(mutex_);
    for (auto& [name, total] : totals_) {
      if (name == stage) {
        total += seconds;
        return;
      }
    }
    totals_.emplace_back(stage, seconds);
  }

  template <typename Fn>
  auto time(const std::string& stage, Fn&& fn) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      add(stage, seconds_since(start));
    } else {
      auto result = fn();
      add(stage, seconds_since(start));
      return result;
    }
  }

  std::vector<std::pair<std::string, double>> totals() const { return totals_; }

 private:
  std::mutex mutex_;
  std::vector<std::pair<std::string, double>> totals_;
};

[[noreturn]] void stage_failure(const std::string& view, const std::string& stage,
                                const std::string& what, const fs::path& file = {}) {
  std::string msg = "view '" + view + "', stage " + stage;
  if (!file.empty()) msg += ", file " + file.string();
  throw ProcessingError(msg + ": " + what);
}

}  // namespace

BinaryMask filter_and_binarize(const LuminanceImage& img, const FilterParams& filter,
                               double threshold) {
  return binarize(bilateral_filter(img, filter), threshold);
}

std::size_t downsample_factor(std::size_t width, std::size_t height, std::size_t target) {
  if (target == 0 || width % target != 0 || height % target != 0 ||
      width / target != height / target) {
    throw ConfigError("downsample_to " + std::to_string(target) + " does not evenly reduce " +
                      std::to_string(width) + "x" + std::to_string(height) + " images");
  }
  return width / target;
}

std::size_t project_view(const BinaryMask& mask, const NamedView& view, FacadeGrid& grid) {
  const CameraFrame frame = build_frame(view.spec);
  const auto quads = project_mask(mask, frame, grid.facade(), view.spec.fov_deg);
  grid.add_layer(view.name);
  rasterize_footprints(quads, grid, view.name);
  return quads.size();
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) {
    workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  workers = std::min(workers, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PipelineSummary run_pipeline(const RunConfig& config, const PipelineOptions& options) {
  const fs::path out_dir = options.output_dir.empty() ? config.output_dir : options.output_dir;
  if (config.views.empty() || config.image_count() == 0) {
    throw ConfigError("manifest lists no images");
  }
  for (const auto& view : config.views) {
    if (view.images.empty()) throw ConfigError("manifest." + view.name + ": view has no images");
  }

  const fs::path staging = out_dir / kStagingName;
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging, ec);
  if (ec) {
    throw IoError("cannot create output directory " + staging.string() + ": " + ec.message());
  }

  try {
    StageTimer timer;
    PipelineSummary summary;
    std::optional<FacadeGrid> grid;
    try {
      grid.emplace(config.facade, config.grid_cell);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("facade grid: ") + e.what());
    }
    std::vector<fs::path> files;
    auto stage_file = [&](const std::string& name) {
      files.emplace_back(name);
      return staging / name;
    };

    for (const auto& view : config.views) {
      const std::size_t n = view.images.size();
      std::vector<std::optional<BinaryMask>> masks(n);
      parallel_for(n, options.workers, [&](std::size_t i) {
        const auto& path = view.images[i].path;
        auto img = timer.time("load", [&] { return load_image(path, config.luminance_cap); });
        LuminanceImage filtered = [&] {
          try {
            return timer.time("filter", [&] { return bilateral_filter(img, config.filter); });
          } catch (const std::invalid_argument& e) {
            stage_failure(view.name, "filter", e.what(), path);
          }
        }();
        try {
          masks[i] = timer.time("binarize", [&] { return binarize(filtered, config.threshold); });
        } catch (const std::invalid_argument& e) {
          stage_failure(view.name, "binarize", e.what(), path);
        }
      });

      for (std::size_t i = 1; i < n; ++i) {
        if (masks[i]->width() != masks[0]->width() || masks[i]->height() != masks[0]->height()) {
          stage_failure(view.name, "accumulate", "image size differs from " + view.images[0].path.string(),
                        view.images[i].path);
        }
      }
      std::vector<BinaryMask> stack;
      stack.reserve(n);
      for (auto& m : masks) stack.push_back(std::move(*m));
      const FrequencyMap freq = timer.time("accumulate", [&] { return accumulate_frequency(stack); });
      const BinaryMask mask =
          timer.time("frequency_threshold", [&] { return threshold_frequency(freq, config.percentile); });
      const std::size_t factor = downsample_factor(mask.width(), mask.height(), config.downsample_to);
      const BinaryMask reduced = timer.time("downsample", [&] { return downsample_majority(mask, factor); });

      const CameraFrame frame = build_frame(view.spec);
      const auto quads = timer.time(
          "project", [&] { return project_mask(reduced, frame, grid->facade(), view.spec.fov_deg); });
      grid->add_layer(view.name);
      timer.time("rasterize", [&] { rasterize_footprints(quads, *grid, view.name); });

      timer.time("write_intermediate", [&] {
        const LuminanceImage mean_img = frequency_image(freq, config.luminance_cap);
        write_grey(mean_img, stage_file(view.name + "_frequency.pgm"));
        write_mask(mask, stage_file(view.name + "_mask.pgm"));
        write_mask(reduced, stage_file(view.name + "_mask_reduced.pgm"));
        write_rgb_png(compose_overlay(mean_img, mask), stage_file(view.name + "_overlay.png"));
        if (config.write_frequency_csv) {
          write_frequency_csv(freq, stage_file(view.name + "_frequency.csv"));
        }
      });

      const auto& layer = grid->layer(view.name);
      summary.views.push_back({view.name, n, mask.count(), reduced.count(), quads.size(),
                               static_cast<std::size_t>(std::count(layer.values.begin(),
                                                                   layer.values.end(), 1))});
    }

    const auto outlines = timer.time("outline", [&] { return extract_layer_outlines(*grid); });
    timer.time("export", [&] {
      for (const auto& p : export_artifacts(*grid, outlines, staging)) {
        files.push_back(p.filename());
      }
    });
    summary.overlap_histogram = overlap_histogram(overlap_count(*grid), grid->layers().size());
    files.emplace_back(kSummaryName);
    summary.files = files;
    summary.stage_seconds = timer.totals();

    {
      std::ofstream out(staging / kSummaryName, std::ios::binary);
      out << summary_to_json(summary);
      if (!out) throw IoError("cannot write " + (staging / kSummaryName).string());
    }
    for (const auto& name : files) {
      fs::rename(staging / name, out_dir / name, ec);
      if (ec) throw IoError("cannot move " + name.string() + " into " + out_dir.string() + ": " + ec.message());
    }
    fs::remove_all(staging, ec);
    return summary;
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

std::string summary_to_json(const PipelineSummary& summary, bool include_timing) {
  nlohmann::ordered_json doc;
  auto views = nlohmann::ordered_json::array();
  for (const auto& v : summary.views) {
    views.push_back({{"name", v.name},
                     {"images", v.images},
                     {"flagged_pixels", v.flagged_pixels},
                     {"flagged_pixels_downsampled", v.flagged_pixels_downsampled},
                     {"footprints", v.footprints},
                     {"flagged_cells", v.flagged_cells}});
  }
  doc["views"] = std::move(views);
  doc["overlap_histogram"] = summary.overlap_histogram;
  auto files = nlohmann::ordered_json::array();
  for (const auto& f : summary.files) files.push_back(f.generic_string());
  doc["files"] = std::move(files);
  if (include_timing) {
    auto timing = nlohmann::ordered_json::object();
    for (const auto& [stage, seconds] : summary.stage_seconds) timing[stage] = seconds;
    doc["timing"] = std::move(timing);
  }
  return doc.dump(2) + "\n";
}

}  // namespace lumamap
