#include "gmap/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gmap {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kDegPerRad = 180.0 / M_PI;

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return j;
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << content;
  if (!out) throw IoError(path + ": write failed");
}

Json PoseToJson(const Pose& pose) {
  return Json{{"x", pose.x}, {"y", pose.y}, {"yaw_deg", pose.yaw * kDegPerRad}};
}

Pose PoseFromJson(const Json& j, const std::string& ctx) {
  if (!j.is_object() || !j.contains("x") || !j.contains("y") ||
      !j.contains("yaw_deg")) {
    throw IoError(ctx + ": pose must have x, y, yaw_deg");
  }
  Pose pose;
  pose.x = j.at("x").get<double>();
  pose.y = j.at("y").get<double>();
  pose.yaw = NormalizeYaw(j.at("yaw_deg").get<double>() / kDegPerRad);
  return pose;
}

Json WindowToJson(const ClipWindow& w) {
  return Json{{"length", w.length}, {"width", w.width}};
}

ClipWindow WindowFromJson(const Json& j, const std::string& ctx) {
  ClipWindow w;
  w.length = j.value("length", 60.0);
  w.width = j.value("width", 30.0);
  if (w.length <= 0.0 || w.width <= 0.0) {
    throw IoError(ctx + ": window dimensions must be positive");
  }
  return w;
}

Json MapToJson(const VectorMap& m, const std::optional<Pose>& pose) {
  Json j;
  j["format_version"] = kMapFormatVersion;
  j["frame"] = m.frame == Frame::kGlobal ? "global" : "ego";
  if (pose.has_value()) j["pose"] = PoseToJson(*pose);
  Json elements = Json::array();
  for (const MapElement& e : m.elements) {
    Json pts = Json::array();
    for (const Point2& p : e.geometry.points) {
      pts.push_back(Json::array({p.x, p.y}));
    }
    elements.push_back(Json{{"id", e.id},
                            {"category", CategoryName(e.category)},
                            {"closed", e.geometry.closed},
                            {"score", e.score},
                            {"points", std::move(pts)}});
  }
  j["elements"] = std::move(elements);
  return j;
}

VectorMap MapFromJson(const Json& j, const std::string& path) {
  if (!j.is_object()) throw IoError(path + ": map file must be an object");
  if (j.value("format_version", -1) != kMapFormatVersion) {
    throw IoError(path + ": unsupported or missing format_version");
  }
  const std::string frame = j.value("frame", "");
  VectorMap m;
  if (frame == "global") {
    m.frame = Frame::kGlobal;
  } else if (frame == "ego") {
    m.frame = Frame::kEgo;
  } else {
    throw IoError(path + ": frame must be \"ego\" or \"global\"");
  }
  if (!j.contains("elements") || !j.at("elements").is_array()) {
    throw IoError(path + ": missing elements array");
  }
  for (const Json& je : j.at("elements")) {
    MapElement e;
    e.id = je.value("id", std::uint64_t{0});
    const std::string elem_ctx =
        path + ": element " + std::to_string(e.id);
    const std::string cat_name = je.value("category", "");
    const std::optional<Category> cat = CategoryFromName(cat_name);
    if (!cat) throw IoError(elem_ctx + ": unknown category \"" + cat_name + "\"");
    e.category = *cat;
    e.score = je.value("score", 1.0);
    e.geometry.closed = je.value("closed", false);
    if (!je.contains("points") || !je.at("points").is_array()) {
      throw IoError(elem_ctx + ": missing points");
    }
    for (const Json& jp : je.at("points")) {
      if (!jp.is_array() || jp.size() != 2) {
        throw IoError(elem_ctx + ": points must be [x, y] pairs");
      }
      e.geometry.points.push_back(
          {jp[0].get<double>(), jp[1].get<double>()});
    }
    m.elements.push_back(std::move(e));
  }
  if (const auto err = ValidateMap(m)) {
    throw IoError(path + ": " + *err);
  }
  return m;
}

std::string FormatThreshold(double thr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", thr);
  return buf;
}

Json CategoryResultToJson(const CategoryResult& res,
                          const std::vector<double>& thresholds) {
  Json per;
  for (double thr : thresholds) {
    per[FormatThreshold(thr)] =
        res.evaluated ? res.ap_per_threshold.at(thr) : 0.0;
  }
  return Json{{"per_threshold", std::move(per)},
              {"mean", res.mean_ap},
              {"evaluated", res.evaluated}};
}

}  // namespace

VectorMap LoadMap(const std::string& path) {
  return MapFromJson(ReadJsonFile(path), path);
}

void SaveMap(const VectorMap& m, const std::string& path,
             const std::optional<Pose>& pose) {
  WriteTextFile(path, MapToJson(m, pose).dump(2) + "\n");
}

std::optional<Pose> LoadMapPose(const std::string& path) {
  const Json j = ReadJsonFile(path);
  if (!j.contains("pose")) return std::nullopt;
  return PoseFromJson(j.at("pose"), path);
}

namespace {

Json BuilderParamsToJson(const BuilderParams& p) {
  const auto per_cat = [&](const std::array<double, kCategoryCount>& v) {
    Json j;
    for (Category c : kAllCategories) {
      j[CategoryName(c)] = v[static_cast<int>(c)];
    }
    return j;
  };
  return Json{{"match_distance", per_cat(p.match_distance)},
              {"nms_buffer", per_cat(p.nms_buffer)},
              {"nms_iou_threshold", p.nms_iou_threshold},
              {"min_splice_span", p.min_splice_span}};
}

BuilderParams BuilderParamsFromJson(const Json& j, const ClipWindow& window,
                                    const std::string& ctx) {
  BuilderParams p;
  p.window = window;
  const auto per_cat = [&](const char* key,
                           std::array<double, kCategoryCount>* out,
                           bool* present) {
    *present = j.contains(key);
    if (!*present) return;
    const Json& jj = j.at(key);
    if (!jj.is_object()) {
      throw IoError(ctx + ": " + key + " must map category names to meters");
    }
    for (Category c : kAllCategories) {
      const int i = static_cast<int>(c);
      (*out)[i] = jj.value(CategoryName(c), (*out)[i]);
      if ((*out)[i] <= 0.0) {
        throw IoError(ctx + ": builder distances must be positive");
      }
    }
  };
  bool has_match = false, has_buffer = false;
  per_cat("match_distance", &p.match_distance, &has_match);
  per_cat("nms_buffer", &p.nms_buffer, &has_buffer);
  if (has_match && !has_buffer) p.nms_buffer = p.match_distance;
  p.nms_iou_threshold = j.value("nms_iou_threshold", 0.5);
  if (p.nms_iou_threshold <= 0.0 || p.nms_iou_threshold > 1.0) {
    throw IoError(ctx + ": nms_iou_threshold must be in (0, 1]");
  }
  p.min_splice_span = j.value("min_splice_span", 0.1);
  return p;
}

Json ScenarioConfigToJson(const ScenarioConfig& cfg) {
  Json j;
  j["format_version"] = 1;
  j["world"] = Json{{"blocks_x", cfg.world.blocks_x},
                    {"blocks_y", cfg.world.blocks_y},
                    {"block_size", cfg.world.block_size},
                    {"road_width", cfg.world.road_width},
                    {"lanes_per_road", cfg.world.lanes_per_road},
                    {"crossing_length", cfg.world.crossing_length},
                    {"seed", cfg.world.seed}};
  j["noise"] = Json{{"point_sigma", cfg.noise.point_sigma},
                    {"pose_sigma_xy", cfg.noise.pose_sigma_xy},
                    {"pose_sigma_yaw_deg", cfg.noise.pose_sigma_yaw * kDegPerRad},
                    {"drop_prob", cfg.noise.drop_prob},
                    {"spurious_rate", cfg.noise.spurious_rate},
                    {"score_scale", cfg.noise.score_scale}};
  j["window"] = WindowToJson(cfg.window);
  j["frame_hz"] = cfg.frame_hz;
  j["update_every"] = cfg.update_every;
  j["n_frames"] = cfg.n_frames;
  j["builder"] = BuilderParamsToJson(cfg.builder);
  j["eval_thresholds"] = cfg.eval_thresholds;
  j["mode"] = cfg.mode == ScenarioMode::kCrossScene ? "cross_scene"
                                                    : "single_scene";
  if (!cfg.initial_map_path.empty()) j["initial_map"] = cfg.initial_map_path;
  j["seed"] = cfg.seed;
  return j;
}

ScenarioConfig ScenarioConfigFromJson(const Json& j, const std::string& ctx) {
  ScenarioConfig cfg;
  if (j.contains("world")) {
    const Json& w = j.at("world");
    cfg.world.blocks_x = w.value("blocks_x", cfg.world.blocks_x);
    cfg.world.blocks_y = w.value("blocks_y", cfg.world.blocks_y);
    cfg.world.block_size = w.value("block_size", cfg.world.block_size);
    cfg.world.road_width = w.value("road_width", cfg.world.road_width);
    cfg.world.lanes_per_road =
        w.value("lanes_per_road", cfg.world.lanes_per_road);
    cfg.world.crossing_length =
        w.value("crossing_length", cfg.world.crossing_length);
    cfg.world.seed = w.value("seed", cfg.world.seed);
  }
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    cfg.noise.point_sigma = n.value("point_sigma", 0.0);
    cfg.noise.pose_sigma_xy = n.value("pose_sigma_xy", 0.0);
    cfg.noise.pose_sigma_yaw =
        n.value("pose_sigma_yaw_deg", 0.0) / kDegPerRad;
    cfg.noise.drop_prob = n.value("drop_prob", 0.0);
    cfg.noise.spurious_rate = n.value("spurious_rate", 0.0);
    cfg.noise.score_scale = n.value("score_scale", 2.0);
    if (cfg.noise.drop_prob < 0.0 || cfg.noise.drop_prob > 1.0 ||
        cfg.noise.point_sigma < 0.0 || cfg.noise.spurious_rate < 0.0) {
      throw IoError(ctx + ": invalid noise config");
    }
  }
  if (j.contains("window")) {
    cfg.window = WindowFromJson(j.at("window"), ctx);
  }
  cfg.frame_hz = j.value("frame_hz", 2.0);
  cfg.update_every = j.value("update_every", 4);
  cfg.n_frames = j.value("n_frames", 60);
  if (cfg.n_frames < 1 || cfg.update_every < 1) {
    throw IoError(ctx + ": n_frames and update_every must be >= 1");
  }
  cfg.builder = BuilderParamsFromJson(
      j.contains("builder") ? j.at("builder") : Json::object(), cfg.window,
      ctx);
  if (j.contains("eval_thresholds")) {
    cfg.eval_thresholds =
        j.at("eval_thresholds").get<std::vector<double>>();
    if (cfg.eval_thresholds.empty()) {
      throw IoError(ctx + ": eval_thresholds must not be empty");
    }
  }
  const std::string mode = j.value("mode", "single_scene");
  if (mode == "single_scene") {
    cfg.mode = ScenarioMode::kSingleScene;
  } else if (mode == "cross_scene") {
    cfg.mode = ScenarioMode::kCrossScene;
  } else {
    throw IoError(ctx + ": mode must be single_scene or cross_scene");
  }
  cfg.initial_map_path = j.value("initial_map", "");
  cfg.seed = j.value("seed", std::uint64_t{0});
  return cfg;
}

}  // namespace

ScenarioConfig LoadScenarioConfig(const std::string& path) {
  return ScenarioConfigFromJson(ReadJsonFile(path), path);
}

void SaveScenarioConfig(const ScenarioConfig& cfg, const std::string& path) {
  WriteTextFile(path, ScenarioConfigToJson(cfg).dump(2) + "\n");
}

std::string ConfigHash(const ScenarioConfig& cfg) {
  const std::string canonical = ScenarioConfigToJson(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void SaveReport(const EvalReport& report, const ScenarioConfig& cfg,
                const std::string& path) {
  Json j;
  j["format_version"] = 1;
  j["metadata"] = Json{{"config_hash", ConfigHash(cfg)},
                       {"seed", cfg.seed},
                       {"thresholds", report.thresholds},
                       {"chamfer_samples", report.chamfer_samples},
                       {"chamfer_variant", "mean_of_mins"},
                       {"pr_pooling", "detections_pooled_before_auc"},
                       {"library_version", kLibraryVersion},
                       {"config", ScenarioConfigToJson(cfg)}};
  Json ap, gap;
  for (Category c : kAllCategories) {
    const int i = static_cast<int>(c);
    ap[CategoryName(c)] = CategoryResultToJson(report.ap[i], report.thresholds);
    gap[CategoryName(c)] =
        CategoryResultToJson(report.gap[i], report.thresholds);
  }
  j["ap"] = std::move(ap);
  j["mAP"] = report.map_mean.has_value() ? Json(*report.map_mean) : Json();
  j["gap"] = std::move(gap);
  j["mGAP"] = report.gap_mean.has_value() ? Json(*report.gap_mean) : Json();
  WriteTextFile(path, j.dump(2) + "\n");
}

TracedRegion LoadTracedRegion(const std::string& path) {
  const Json j = ReadJsonFile(path);
  if (!j.is_object() || !j.contains("rectangles")) {
    throw IoError(path + ": missing rectangles");
  }
  TracedRegion tr;
  for (const Json& jr : j.at("rectangles")) {
    tr.rectangles.emplace_back(PoseFromJson(jr.at("pose"), path),
                               WindowFromJson(jr.at("window"), path));
  }
  return tr;
}

void SaveTracedRegion(const TracedRegion& tr, const std::string& path) {
  Json rects = Json::array();
  for (const auto& [pose, window] : tr.rectangles) {
    rects.push_back(
        Json{{"pose", PoseToJson(pose)}, {"window", WindowToJson(window)}});
  }
  Json j{{"format_version", 1}, {"rectangles", std::move(rects)}};
  WriteTextFile(path, j.dump(2) + "\n");
}

void SaveMask(const BevMask& mask, const GridSpec& spec, double tau,
              const Pose& pose, const std::string& path) {
  std::ostringstream out;
  out << "# gmap-mask 1\n";
  out << "channel " << mask.channel << "\n";
  out << "rows " << mask.rows << "\n";
  out << "cols " << mask.cols << "\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "resolution %.6f\ntau %.6f\n",
                spec.resolution, tau);
  out << buf;
  std::snprintf(buf, sizeof(buf), "pose %.6f %.6f %.6f\n", pose.x, pose.y,
                pose.yaw * kDegPerRad);
  out << buf;
  for (int r = 0; r < mask.rows; ++r) {
    for (int c = 0; c < mask.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.6f", mask.At(r, c));
      out << (c == 0 ? "" : " ") << buf;
    }
    out << "\n";
  }
  WriteTextFile(path, out.str());
}

BevMask LoadMask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line.rfind("# gmap-mask", 0) != 0) {
    throw IoError(path + ": not a mask file");
  }
  BevMask mask;
  std::string key;
  while (in >> key) {
    if (key == "channel") {
      in >> mask.channel;
    } else if (key == "rows") {
      in >> mask.rows;
    } else if (key == "cols") {
      in >> mask.cols;
    } else if (key == "resolution" || key == "tau") {
      double ignored;
      in >> ignored;
    } else if (key == "pose") {
      double ignored;
      in >> ignored >> ignored >> ignored;
      break;
    } else {
      throw IoError(path + ": unexpected header key " + key);
    }
  }
  if (mask.rows <= 0 || mask.cols <= 0) {
    throw IoError(path + ": invalid mask dimensions");
  }
  mask.values.resize(static_cast<std::size_t>(mask.rows) * mask.cols);
  for (double& v : mask.values) {
    if (!(in >> v)) throw IoError(path + ": truncated mask values");
  }
  return mask;
}

namespace {

const char* CategoryColor(Category c) {
  switch (c) {
    case Category::kRoadBoundary: return "#d62728";
    case Category::kLaneDivider: return "#1f77b4";
    case Category::kPedCrossing: return "#2ca02c";
  }
  return "#000000";
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void RenderSvg(const std::vector<const VectorMap*>& maps,
               const TracedRegion* traced, const std::string& path) {
  // World bounds over all inputs; y is flipped for SVG.
  double min_x = 0.0, min_y = 0.0, max_x = 10.0, max_y = 10.0;
  bool seen = false;
  const auto grow = [&](const Point2& p) {
    if (!seen) {
      min_x = max_x = p.x;
      min_y = max_y = p.y;
      seen = true;
      return;
    }
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  };
  for (const VectorMap* m : maps) {
    for (const MapElement& e : m->elements) {
      for (const Point2& p : e.geometry.points) grow(p);
    }
  }
  if (traced) {
    for (const auto& [pose, window] : traced->rectangles) {
      for (double sx : {-1.0, 1.0}) {
        for (double sy : {-1.0, 1.0}) {
          grow(TransformPoint({sx * window.length / 2.0, sy * window.width / 2.0},
                              pose, TransformDirection::kEgoToGlobal));
        }
      }
    }
  }
  const double margin = 10.0;
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;

  const auto sx = [&](double x) { return Fmt(x - min_x); };
  const auto sy = [&](double y) { return Fmt(max_y - y); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 "
      << Fmt(max_x - min_x) << " " << Fmt(max_y - min_y) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (traced) {
    for (const auto& [pose, window] : traced->rectangles) {
      out << "<polygon points=\"";
      bool first = true;
      for (const auto& [cx, cy] :
           {std::pair{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}) {
        const Point2 p = TransformPoint(
            {cx * window.length / 2.0, cy * window.width / 2.0}, pose,
            TransformDirection::kEgoToGlobal);
        out << (first ? "" : " ") << sx(p.x) << "," << sy(p.y);
        first = false;
      }
      out << "\" fill=\"#ffd54f\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
  }

  for (std::size_t mi = 0; mi < maps.size(); ++mi) {
    // The last map is drawn in category colors; earlier maps (GT underlays)
    // in gray.
    const bool underlay = mi + 1 < maps.size();
    for (const MapElement& e : maps[mi]->elements) {
      out << (e.geometry.closed ? "<polygon" : "<polyline") << " points=\"";
      bool first = true;
      for (const Point2& p : e.geometry.points) {
        out << (first ? "" : " ") << sx(p.x) << "," << sy(p.y);
        first = false;
      }
      out << "\" fill=\"none\" stroke=\""
          << (underlay ? "#9e9e9e" : CategoryColor(e.category))
          << "\" stroke-width=\"0.6\"/>\n";
    }
  }

  // Legend.
  double ly = 6.0;
  for (Category c : kAllCategories) {
    out << "<line x1=\"4\" y1=\"" << Fmt(ly) << "\" x2=\"12\" y2=\""
        << Fmt(ly) << "\" stroke=\"" << CategoryColor(c)
        << "\" stroke-width=\"1\"/>\n";
    out << "<text x=\"14\" y=\"" << Fmt(ly + 1.5)
        << "\" font-size=\"4\" fill=\"black\">" << CategoryName(c)
        << "</text>\n";
    ly += 6.0;
  }
  out << "</svg>\n";
  WriteTextFile(path, out.str());
}

void WriteArtifacts(const ScenarioArtifacts& art, const ScenarioConfig& cfg,
                    const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "frames");
  const auto at = [&](const std::string& name) {
    return (fs::path(out_dir) / name).string();
  };
  SaveMap(art.gt_global, at("gt_global.json"));
  for (std::size_t i = 0; i < art.frame_preds.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "frames/%04zu_pred.json", i);
    SaveMap(art.frame_preds[i], at(name), art.poses[i]);
    std::snprintf(name, sizeof(name), "frames/%04zu_gt.json", i);
    SaveMap(art.frame_gts[i], at(name), art.poses[i]);
  }
  SaveMap(art.state.map, at("built_global.json"));
  SaveTracedRegion(art.traced, at("traced_region.json"));
  SaveReport(art.report, cfg, at("report.json"));
  SaveScenarioConfig(cfg, at("config.json"));
  RenderSvg({&art.gt_global, &art.state.map}, &art.traced, at("render.svg"));
}

}  // namespace gmap
