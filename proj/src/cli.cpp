#include "lumamap/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lumamap/config.hpp"
#include "lumamap/errors.hpp"
#include "lumamap/export.hpp"
#include "lumamap/image_io.hpp"
#include "lumamap/oracle.hpp"
#include "lumamap/pipeline.hpp"

namespace lumamap {

namespace fs = std::filesystem;

namespace {

struct ProcessArgs {
  std::string config;
  std::size_t workers = 0;
  std::string out;
};

struct BinarizeArgs {
  std::string input;
  std::string output;
  std::string config;
  std::optional<double> threshold;
  std::optional<double> cap;
  std::optional<int> diameter;
  std::optional<double> sigma_color;
  std::optional<double> sigma_space;
  bool no_filter = false;
};

struct AggregateArgs {
  std::vector<std::string> masks;
  std::string output;
  std::string config;
  std::optional<double> percentile;
  std::string frequency_image;
  std::string frequency_csv;
  std::string overlay;
};

struct ProjectArgs {
  std::string config;
  std::string view;
  std::string mask;
  std::string out;
};

struct SynthArgs {
  std::string config;
  std::size_t width = 400;
  std::size_t height = 400;
  double noise = 0.0;
  std::uint64_t seed = 42;
  std::size_t count = 1;
  std::string out = "synth.pgm";
};

struct ReportArgs {
  std::string path;
};

RunConfig optional_config(const std::string& path) {
  if (path.empty()) {
    // Defaults only; facade and views are irrelevant to raster stages.
    RunConfig cfg;
    return cfg;
  }
  return parse_config(path, ConfigUse::kAny);
}

int cmd_process(const ProcessArgs& a, std::ostream& out) {
  const RunConfig cfg = parse_config(a.config, ConfigUse::kProcess);
  PipelineOptions options;
  options.workers = a.workers;
  options.output_dir = a.out;
  const auto summary = run_pipeline(cfg, options);
  out << summary_to_json(summary);
  return kExitOk;
}

int cmd_binarize(const BinarizeArgs& a, std::ostream& out) {
  const RunConfig cfg = optional_config(a.config);
  const double cap = a.cap.value_or(cfg.luminance_cap);
  const double threshold = a.threshold.value_or(cfg.threshold);
  FilterParams filter = cfg.filter;
  if (a.diameter) filter.diameter = *a.diameter;
  if (a.sigma_color) filter.sigma_color = *a.sigma_color;
  if (a.sigma_space) filter.sigma_space = *a.sigma_space;

  const LuminanceImage img = load_image(a.input, cap);
  const BinaryMask mask =
      a.no_filter ? binarize(img, threshold) : filter_and_binarize(img, filter, threshold);
  write_mask(mask, a.output);
  out << a.output << ": " << mask.count() << " of " << mask.width() * mask.height()
      << " pixels at or above " << threshold << " cd/m2\n";
  return kExitOk;
}

int cmd_aggregate(const AggregateArgs& a, std::ostream& out) {
  const RunConfig cfg = optional_config(a.config);
  const double percentile = a.percentile.value_or(cfg.percentile);
  if (!(percentile >= 0.0 && percentile <= 1.0)) {
    throw ConfigError("percentile: must lie in [0, 1]");
  }
  std::vector<BinaryMask> masks;
  masks.reserve(a.masks.size());
  for (const auto& path : a.masks) {
    masks.push_back(load_mask(path));
    if (masks.back().width() != masks.front().width() ||
        masks.back().height() != masks.front().height()) {
      throw ProcessingError("stage accumulate, file " + path + ": dimension mismatch");
    }
  }
  const FrequencyMap freq = accumulate_frequency(masks);
  const BinaryMask mask = threshold_frequency(freq, percentile);
  write_mask(mask, a.output);
  const LuminanceImage mean_img = frequency_image(freq, cfg.luminance_cap);
  if (!a.frequency_image.empty()) write_grey(mean_img, a.frequency_image);
  if (!a.frequency_csv.empty()) write_frequency_csv(freq, a.frequency_csv);
  if (!a.overlay.empty()) write_rgb_png(compose_overlay(mean_img, mask), a.overlay);
  out << a.output << ": " << mask.count() << " pixels flagged in at least "
      << percentile * 100.0 << "% of " << freq.count() << " masks\n";
  return kExitOk;
}

int cmd_project(const ProjectArgs& a, std::ostream& out) {
  const RunConfig cfg = parse_config(a.config, ConfigUse::kAny);
  const NamedView& view = cfg.view(a.view);
  const BinaryMask full = load_mask(a.mask);
  const std::size_t factor = downsample_factor(full.width(), full.height(), cfg.downsample_to);
  const BinaryMask reduced = downsample_majority(full, factor);
  FacadeGrid grid(cfg.facade, cfg.grid_cell);
  const std::size_t quads = project_view(reduced, view, grid);
  const fs::path dir = a.out.empty() ? cfg.output_dir : fs::path(a.out);
  export_artifacts(grid, extract_layer_outlines(grid), dir);
  const auto& layer = grid.layer(view.name);
  out << view.name << ": " << reduced.count() << " flagged pixels, " << quads
      << " footprints, " << std::count(layer.values.begin(), layer.values.end(), 1)
      << " facade cells -> " << dir.string() << "\n";
  return kExitOk;
}

fs::path numbered(const fs::path& base, std::size_t index) {
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "_%03zu", index);
  return base.parent_path() / (base.stem().string() + suffix + base.extension().string());
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const RunConfig cfg = parse_config(a.config, ConfigUse::kScene);
  const SyntheticScene scene = make_scene(cfg);
  const LuminanceImage clean = render_synthetic(scene, a.width, a.height);
  for (std::size_t i = 0; i < a.count; ++i) {
    const fs::path path = a.count == 1 ? fs::path(a.out) : numbered(a.out, i);
    write_grey(add_noise(clean, a.noise, a.seed + i), path);
    out << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  fs::path path = a.path;
  fs::path summary_path;
  if (fs::is_directory(path)) {
    summary_path = path / "summary.json";
    path /= kResultJsonName;
  }
  const ResultDocument doc = read_result_json(path);
  const auto& f = doc.grid.facade();
  out << "facade " << f.width << " m x " << f.height << " m, " << doc.grid.cols() << " x "
      << doc.grid.rows() << " cells of " << doc.grid.cell_size() << " m\n";
  const double cell_area = doc.grid.cell_size() * doc.grid.cell_size();
  for (std::size_t i = 0; i < doc.grid.layers().size(); ++i) {
    const auto& layer = doc.grid.layers()[i];
    const auto cells = std::count(layer.flags.values.begin(), layer.flags.values.end(), 1);
    std::size_t rings = 0;
    std::size_t holes = 0;
    for (const auto& p : doc.outlines[i].polygons) {
      (p.hole ? holes : rings)++;
    }
    out << "  " << layer.name << ": " << cells << " cells (" << cells * cell_area << " m2), "
        << rings << " outline(s), " << holes << " hole(s)\n";
  }
  if (!doc.grid.layers().empty()) {
    const auto histogram = overlap_histogram(overlap_count(doc.grid), doc.grid.layers().size());
    out << "overlap histogram:";
    for (std::size_t k = 0; k < histogram.size(); ++k) out << " " << k << ":" << histogram[k];
    out << "\n";
  }
  if (!summary_path.empty() && fs::exists(summary_path)) {
    std::ifstream in(summary_path);
    const auto summary = nlohmann::ordered_json::parse(in, nullptr, false);
    if (!summary.is_discarded() && summary.contains("timing")) {
      out << "stage timing (s):";
      for (const auto& [stage, seconds] : summary["timing"].items()) {
        out << " " << stage << "=" << seconds.get<double>();
      }
      out << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lumamap: map persistently overlit fisheye pixels onto a building facade"};
  app.require_subcommand(1);

  ProcessArgs process;
  auto* sc_process = app.add_subcommand("process", "run the full pipeline over a manifest");
  sc_process->add_option("--config", process.config, "run configuration (JSON)")->required();
  sc_process->add_option("--workers", process.workers, "worker threads (0 = all cores)");
  sc_process->add_option("--out", process.out, "output directory (overrides output_dir)");

  BinarizeArgs bin;
  auto* sc_bin = app.add_subcommand("binarize", "denoise and threshold one rendering");
  sc_bin->add_option("--input,-i", bin.input, "greyscale PGM/PNG rendering")->required();
  sc_bin->add_option("--output,-o", bin.output, "mask to write (.pgm or .png)")->required();
  sc_bin->add_option("--config", bin.config, "take parameters from a run configuration");
  sc_bin->add_option("--threshold", bin.threshold, "luminance threshold, cd/m2 (default 2000)");
  sc_bin->add_option("--cap", bin.cap, "luminance of pixel value 255, cd/m2 (default 3000)");
  sc_bin->add_option("--diameter", bin.diameter, "bilateral neighbourhood diameter (default 15)");
  sc_bin->add_option("--sigma-color", bin.sigma_color, "bilateral range sigma (default 75)");
  sc_bin->add_option("--sigma-space", bin.sigma_space, "bilateral spatial sigma (default 75)");
  sc_bin->add_flag("--no-filter", bin.no_filter, "skip the bilateral filter");

  AggregateArgs agg;
  auto* sc_agg = app.add_subcommand("aggregate", "frequency test over a stack of masks");
  sc_agg->add_option("masks", agg.masks, "binary masks")->required();
  sc_agg->add_option("--output,-o", agg.output, "thresholded mask to write")->required();
  sc_agg->add_option("--config", agg.config, "take parameters from a run configuration");
  sc_agg->add_option("--percentile", agg.percentile, "time fraction in [0, 1] (default 0.5)");
  sc_agg->add_option("--frequency-image", agg.frequency_image, "write the mean image");
  sc_agg->add_option("--frequency-csv", agg.frequency_csv, "write row,col,mean CSV");
  sc_agg->add_option("--overlay", agg.overlay, "write a red-on-grey PNG overlay");

  ProjectArgs proj;
  auto* sc_proj = app.add_subcommand("project", "project one view's mask onto the facade");
  sc_proj->add_option("--config", proj.config, "run configuration (JSON)")->required();
  sc_proj->add_option("--view", proj.view, "view name")->required();
  sc_proj->add_option("--mask", proj.mask, "full-resolution or reduced mask")->required();
  sc_proj->add_option("--out", proj.out, "output directory");

  SynthArgs synth;
  auto* sc_synth = app.add_subcommand("synth", "render a synthetic fisheye test image");
  sc_synth->add_option("--config", synth.config, "configuration with a scene block")->required();
  sc_synth->add_option("--width", synth.width, "image width")->check(CLI::PositiveNumber);
  sc_synth->add_option("--height", synth.height, "image height")->check(CLI::PositiveNumber);
  sc_synth->add_option("--noise", synth.noise, "Gaussian noise sigma, grey levels")->check(CLI::NonNegativeNumber);
  sc_synth->add_option("--seed", synth.seed, "noise seed");
  sc_synth->add_option("--count", synth.count, "number of images (seeds seed, seed+1, ...)")
      ->check(CLI::PositiveNumber);
  sc_synth->add_option("--out,-o", synth.out, "output image (.pgm or .png)");

  ReportArgs report;
  auto* sc_report = app.add_subcommand("report", "summarise a result directory or facade.json");
  sc_report->add_option("path", report.path, "output directory or facade.json")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sc_process) return cmd_process(process, out);
    if (*sc_bin) return cmd_binarize(bin, out);
    if (*sc_agg) return cmd_aggregate(agg, out);
    if (*sc_proj) return cmd_project(proj, out);
    if (*sc_synth) return cmd_synth(synth, out);
    if (*sc_report) return cmd_report(report, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ProcessingError& e) {
    err << "processing error: " << e.what() << "\n";
    return kExitProcessing;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitConfig;
}

}  // namespace lumamap
