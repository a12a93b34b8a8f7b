#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gmap/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

std::vector<double> ParseThresholds(const std::string& list) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < list.size()) {
    std::size_t next = list.find(',', pos);
    if (next == std::string::npos) next = list.size();
    out.push_back(std::stod(list.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw CLI::ValidationError("--thresholds", "empty list");
  return out;
}

gmap::Pose ParsePose(const std::string& s) {
  double x, y, yaw_deg;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &x, &y, &yaw_deg) != 3) {
    throw CLI::ValidationError("--pose", "expected X,Y,YAW_DEG");
  }
  return {x, y, gmap::NormalizeYaw(yaw_deg * M_PI / 180.0)};
}

gmap::ClipWindow ParseWindow(const std::string& s) {
  double length, width;
  if (std::sscanf(s.c_str(), "%lfx%lf", &length, &width) != 2 ||
      length <= 0.0 || width <= 0.0) {
    throw CLI::ValidationError("--window", "expected LxW, both positive");
  }
  return {length, width};
}

std::vector<fs::path> SortedFrameFiles(const fs::path& dir,
                                       const std::string& suffix) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) {
    throw gmap::IoError(dir.string() + ": not a directory");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int RunSimulate(const std::string& config_path,
                std::optional<std::uint64_t> seed,
                const std::string& out_dir) {
  gmap::ScenarioConfig cfg = gmap::LoadScenarioConfig(config_path);
  if (seed.has_value()) cfg.seed = *seed;

  std::optional<gmap::VectorMap> initial;
  if (cfg.mode == gmap::ScenarioMode::kCrossScene &&
      !cfg.initial_map_path.empty()) {
    try {
      initial = gmap::LoadMap(cfg.initial_map_path);
    } catch (const std::exception& e) {
      std::cerr << "initial map unreadable: " << e.what() << "\n";
      return kExitValidation;
    }
  }

  const gmap::ScenarioArtifacts art = gmap::RunScenario(cfg, initial);
  gmap::WriteArtifacts(art, cfg, out_dir);
  if (art.report.gap_mean.has_value()) {
    std::printf("mGAP %.4f\n", *art.report.gap_mean);
  }
  if (art.report.map_mean.has_value()) {
    std::printf("mAP  %.4f\n", *art.report.map_mean);
  }
  return 0;
}

int RunBuild(const std::string& frames_dir, const std::string& params_path,
             const std::string& out_path) {
  const gmap::ScenarioConfig cfg = gmap::LoadScenarioConfig(params_path);
  gmap::GlobalMapState state;
  const auto files = SortedFrameFiles(frames_dir, "_pred.json");
  int frame = 0;
  for (const fs::path& file : files) {
    const gmap::VectorMap pred = gmap::LoadMap(file.string());
    const std::optional<gmap::Pose> pose = gmap::LoadMapPose(file.string());
    if (!pose.has_value()) {
      throw gmap::IoError(file.string() + ": frame file lacks a pose");
    }
    if (frame % cfg.update_every == 0) {
      state = gmap::MergeStep(state, pred, *pose, cfg.builder);
    }
    ++frame;
  }
  gmap::SaveMap(state.map, out_path);
  std::printf("merged %d frames, %zu elements\n", frame,
              state.map.elements.size());
  return 0;
}

int RunEval(const std::string& pred_path, const std::string& gt_path,
            const std::string& frames_dir, const std::string& traced_path,
            const std::string& thresholds_list, const std::string& out_path) {
  const std::vector<double> thresholds = ParseThresholds(thresholds_list);
  gmap::EvalReport report;
  if (!frames_dir.empty()) {
    std::vector<gmap::VectorMap> preds, gts;
    const auto pred_files = SortedFrameFiles(frames_dir, "_pred.json");
    for (const fs::path& file : pred_files) {
      preds.push_back(gmap::LoadMap(file.string()));
      std::string gt_name = file.string();
      gt_name.replace(gt_name.size() - 10, 10, "_gt.json");
      gts.push_back(gmap::LoadMap(gt_name));
    }
    report = gmap::ApStream(preds, gts, thresholds);
  } else {
    const gmap::VectorMap pred = gmap::LoadMap(pred_path);
    gmap::VectorMap gt = gmap::LoadMap(gt_path);
    if (!traced_path.empty()) {
      const gmap::TracedRegion tr = gmap::LoadTracedRegion(traced_path);
      gt = gmap::ClipToTracedRegion(gt, tr);
    }
    report = gmap::GapMap(pred, gt, thresholds);
  }
  gmap::ScenarioConfig meta_cfg;
  meta_cfg.eval_thresholds = thresholds;
  gmap::SaveReport(report, meta_cfg, out_path);
  if (report.gap_mean.has_value()) std::printf("mGAP %.4f\n", *report.gap_mean);
  if (report.map_mean.has_value()) std::printf("mAP  %.4f\n", *report.map_mean);
  return 0;
}

int RunRasterize(const std::string& map_path, const std::string& pose_arg,
                 const std::string& window_arg, double resolution, double tau,
                 const std::string& traced_path, const std::string& out_dir) {
  const gmap::VectorMap map = gmap::LoadMap(map_path);
  const gmap::Pose pose = ParsePose(pose_arg);
  gmap::GridSpec spec;
  spec.window = ParseWindow(window_arg);
  spec.resolution = resolution;
  gmap::ValidateGridSpec(spec);
  gmap::TracedRegion traced;
  if (!traced_path.empty()) traced = gmap::LoadTracedRegion(traced_path);

  const std::vector<gmap::BevMask> masks =
      gmap::ClipAndRasterize(map, traced, pose, spec, tau);
  fs::create_directories(out_dir);
  for (const gmap::BevMask& mask : masks) {
    const fs::path path = fs::path(out_dir) / (mask.channel + ".grid");
    gmap::SaveMask(mask, spec, tau, pose, path.string());
  }
  std::printf("wrote %zu masks to %s\n", masks.size(), out_dir.c_str());
  return 0;
}

int RunRender(const std::string& map_path, const std::string& gt_path,
              const std::string& traced_path, const std::string& out_path) {
  const gmap::VectorMap map = gmap::LoadMap(map_path);
  std::optional<gmap::VectorMap> gt;
  if (!gt_path.empty()) gt = gmap::LoadMap(gt_path);
  std::optional<gmap::TracedRegion> traced;
  if (!traced_path.empty()) traced = gmap::LoadTracedRegion(traced_path);

  std::vector<const gmap::VectorMap*> maps;
  if (gt.has_value()) maps.push_back(&*gt);
  maps.push_back(&map);
  gmap::RenderSvg(maps, traced.has_value() ? &*traced : nullptr, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vectorized global HD map construction and evaluation"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "run a closed-loop scenario and write the artifact bundle");
  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", sim_config, "scenario config file")
      ->required();
  simulate->add_option("--seed", sim_seed, "override the config seed");
  simulate->add_option("--out-dir", sim_out, "output directory")->required();

  // build
  auto* build = app.add_subcommand(
      "build", "replay stored per-frame predictions through the map builder");
  std::string build_frames, build_params, build_out;
  build->add_option("--frames", build_frames, "frames directory")->required();
  build->add_option("--params", build_params, "scenario/builder config file")
      ->required();
  build->add_option("--out", build_out, "output map file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate GAP (or AP over frames)");
  std::string eval_pred, eval_gt, eval_frames, eval_traced, eval_out;
  std::string eval_thresholds = "0.5,1.0,1.5";
  eval->add_option("--pred", eval_pred, "predicted global map");
  eval->add_option("--gt", eval_gt, "ground-truth global map");
  eval->add_option("--frames", eval_frames,
                   "frames directory (AP mode instead of --pred/--gt)");
  eval->add_option("--traced", eval_traced, "traced region file");
  eval->add_option("--thresholds", eval_thresholds,
                   "comma-separated Chamfer thresholds, meters");
  eval->add_option("--out", eval_out, "output report file")->required();

  // rasterize
  auto* rasterize =
      app.add_subcommand("rasterize", "clip and rasterize soft BEV masks");
  std::string ras_map, ras_pose, ras_window = "60x30", ras_traced, ras_out;
  double ras_res = 0.3, ras_tau = 1.0;
  rasterize->add_option("--map", ras_map, "global map file")->required();
  rasterize->add_option("--pose", ras_pose, "ego pose X,Y,YAW_DEG")
      ->required();
  rasterize->add_option("--window", ras_window, "window LxW in meters");
  rasterize->add_option("--res", ras_res, "resolution, meters per cell");
  rasterize->add_option("--tau", ras_tau, "smoothness factor, meters");
  rasterize->add_option("--traced", ras_traced, "traced region file");
  rasterize->add_option("--out", ras_out, "output directory")->required();

  // render
  auto* render = app.add_subcommand("render", "render maps to SVG");
  std::string ren_map, ren_gt, ren_traced, ren_out;
  render->add_option("--map", ren_map, "map file")->required();
  render->add_option("--gt", ren_gt, "ground-truth underlay map");
  render->add_option("--traced", ren_traced, "traced region file");
  render->add_option("--out", ren_out, "output SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return RunSimulate(sim_config, sim_seed, sim_out);
    if (build->parsed()) return RunBuild(build_frames, build_params, build_out);
    if (eval->parsed()) {
      if (eval_frames.empty() && (eval_pred.empty() || eval_gt.empty())) {
        std::cerr << "eval: need --frames or both --pred and --gt\n";
        return kExitUsage;
      }
      return RunEval(eval_pred, eval_gt, eval_frames, eval_traced,
                     eval_thresholds, eval_out);
    }
    if (rasterize->parsed()) {
      return RunRasterize(ras_map, ras_pose, ras_window, ras_res, ras_tau,
                          ras_traced, ras_out);
    }
    if (render->parsed()) {
      return RunRender(ren_map, ren_gt, ren_traced, ren_out);
    }
  } catch (const gmap::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
