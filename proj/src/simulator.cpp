#include "gmap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace gmap {

namespace {

Polyline OpenSegment(Point2 a, Point2 b) {
  Polyline p;
  p.points = {a, b};
  return p;
}

Polyline ClosedRect(double min_x, double min_y, double max_x, double max_y) {
  Polyline p;
  p.points = {{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}};
  p.closed = true;
  return p;
}

}  // namespace

VectorMap GenerateGroundTruth(const WorldConfig& cfg) {
  if (cfg.blocks_x < 1 || cfg.blocks_y < 1 || cfg.block_size <= 0.0 ||
      cfg.road_width <= 0.0 || cfg.lanes_per_road < 1 ||
      cfg.crossing_length <= 0.0) {
    throw std::invalid_argument("GenerateGroundTruth: invalid world config");
  }
  const double bs = cfg.block_size;
  const double half_road = cfg.road_width / 2.0;
  VectorMap map;
  map.frame = Frame::kGlobal;
  std::uint64_t next_id = 0;

  const auto add = [&](Category cat, Polyline geom) {
    map.elements.push_back(
        {next_id++, cat, std::move(geom), 1.0});
  };

  // Block boundaries.
  for (int bx = 0; bx < cfg.blocks_x; ++bx) {
    for (int by = 0; by < cfg.blocks_y; ++by) {
      add(Category::kRoadBoundary,
          ClosedRect(bx * bs + half_road, by * bs + half_road,
                     (bx + 1) * bs - half_road, (by + 1) * bs - half_road));
    }
  }

  // Road segments: horizontal lines y = j*bs (j = 0..blocks_y), one segment
  // per block column; vertical lines analogously.
  const double lane_width = cfg.road_width / cfg.lanes_per_road;
  const auto add_segment_features = [&](Point2 a, Point2 b, bool horizontal) {
    // Lane dividers at interior lane offsets from the road centerline.
    for (int k = 1; k < cfg.lanes_per_road; ++k) {
      const double offset = -half_road + k * lane_width;
      if (horizontal) {
        add(Category::kLaneDivider,
            OpenSegment({a.x, a.y + offset}, {b.x, b.y + offset}));
      } else {
        add(Category::kLaneDivider,
            OpenSegment({a.x + offset, a.y}, {b.x + offset, b.y}));
      }
    }
    // One ped crossing at the segment midpoint, spanning the road width.
    const Point2 mid{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
    const double half_len = cfg.crossing_length / 2.0;
    if (horizontal) {
      add(Category::kPedCrossing,
          ClosedRect(mid.x - half_len, mid.y - half_road, mid.x + half_len,
                     mid.y + half_road));
    } else {
      add(Category::kPedCrossing,
          ClosedRect(mid.x - half_road, mid.y - half_len, mid.x + half_road,
                     mid.y + half_len));
    }
  };

  for (int j = 0; j <= cfg.blocks_y; ++j) {
    for (int i = 0; i < cfg.blocks_x; ++i) {
      add_segment_features({i * bs + half_road, j * bs},
                           {(i + 1) * bs - half_road, j * bs},
                           /*horizontal=*/true);
    }
  }
  for (int i = 0; i <= cfg.blocks_x; ++i) {
    for (int j = 0; j < cfg.blocks_y; ++j) {
      add_segment_features({i * bs, j * bs + half_road},
                           {i * bs, (j + 1) * bs - half_road},
                           /*horizontal=*/false);
    }
  }
  return map;
}

std::vector<Pose> GenerateTrajectory(const VectorMap& /*gt*/,
                                     const ScenarioConfig& cfg) {
  const double bs = cfg.world.block_size;
  const double x_max = cfg.world.blocks_x * bs;

  // Boustrophedon over the horizontal road centerlines, connected along the
  // outer vertical roads.
  std::vector<Point2> route;
  for (int j = 0; j <= cfg.world.blocks_y; ++j) {
    const double y = j * bs;
    if (j % 2 == 0) {
      route.push_back({0.0, y});
      route.push_back({x_max, y});
    } else {
      route.push_back({x_max, y});
      route.push_back({0.0, y});
    }
  }

  std::vector<double> seg_start;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    seg_start.push_back(total);
    total += Distance(route[i], route[i + 1]);
  }

  const double step = cfg.window.length / 24.0;
  std::vector<Pose> poses;
  poses.reserve(cfg.n_frames);
  for (int f = 0; f < cfg.n_frames; ++f) {
    double s = std::fmod(f * step, total);
    std::size_t seg = 0;
    while (seg + 1 < seg_start.size() && seg_start[seg + 1] <= s) ++seg;
    const Point2& a = route[seg];
    const Point2& b = route[seg + 1];
    const double len = Distance(a, b);
    const double t = len > 0.0 ? (s - seg_start[seg]) / len : 0.0;
    Pose pose;
    pose.x = a.x + t * (b.x - a.x);
    pose.y = a.y + t * (b.y - a.y);
    pose.yaw = NormalizeYaw(std::atan2(b.y - a.y, b.x - a.x));
    poses.push_back(pose);
  }
  return poses;
}

std::uint64_t FrameSeed(std::uint64_t run_seed, int frame_index) {
  // splitmix64 over the combined value.
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL *
                                   (static_cast<std::uint64_t>(frame_index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

VectorMap Perceive(const VectorMap& gt, const Pose& pose,
                   const ClipWindow& window, const NoiseConfig& noise,
                   std::uint64_t frame_seed) {
  std::mt19937_64 rng(frame_seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  Pose perceived = pose;
  if (noise.pose_sigma_xy > 0.0) {
    perceived.x += unit_normal(rng) * noise.pose_sigma_xy;
    perceived.y += unit_normal(rng) * noise.pose_sigma_xy;
  }
  if (noise.pose_sigma_yaw > 0.0) {
    perceived.yaw = NormalizeYaw(perceived.yaw +
                                 unit_normal(rng) * noise.pose_sigma_yaw);
  }

  const VectorMap clipped =
      FragmentsToLocalMap(ClipMap(gt, perceived, window));

  VectorMap out;
  out.frame = Frame::kEgo;
  std::uint64_t next_id = 0;
  for (const MapElement& e : clipped.elements) {
    if (uniform(rng) < noise.drop_prob) continue;
    MapElement elem = e;
    double total_disp = 0.0;
    if (noise.point_sigma > 0.0) {
      for (Point2& p : elem.geometry.points) {
        const double dx = unit_normal(rng) * noise.point_sigma;
        const double dy = unit_normal(rng) * noise.point_sigma;
        p.x += dx;
        p.y += dy;
        total_disp += std::hypot(dx, dy);
      }
    }
    if (!IsValidPolyline(elem.geometry)) continue;
    const double mean_disp = total_disp / elem.geometry.points.size();
    elem.score = std::max(0.05, 1.0 - mean_disp / noise.score_scale);
    elem.id = next_id++;
    out.elements.push_back(std::move(elem));
  }

  if (noise.spurious_rate > 0.0) {
    std::poisson_distribution<int> poisson(noise.spurious_rate);
    const int count = poisson(rng);
    const double hx = window.length / 2.0;
    const double hy = window.width / 2.0;
    for (int i = 0; i < count; ++i) {
      const int cat_idx = static_cast<int>(uniform(rng) * kCategoryCount) %
                          kCategoryCount;
      const Category cat = kAllCategories[cat_idx];
      const double cx = (uniform(rng) * 1.6 - 0.8) * hx;
      const double cy = (uniform(rng) * 1.6 - 0.8) * hy;
      MapElement elem;
      elem.category = cat;
      if (cat == Category::kPedCrossing) {
        const double hw = 1.0 + 2.0 * uniform(rng);
        const double hh = 0.8 + 1.2 * uniform(rng);
        elem.geometry = ClosedRect(cx - hw, cy - hh, cx + hw, cy + hh);
      } else {
        const double heading = uniform(rng) * 2.0 * M_PI;
        const double len = 2.0 + 6.0 * uniform(rng);
        elem.geometry = OpenSegment(
            {cx, cy},
            {cx + len * std::cos(heading), cy + len * std::sin(heading)});
      }
      elem.score = 0.1 + 0.4 * uniform(rng);
      elem.id = next_id++;
      out.elements.push_back(std::move(elem));
    }
  }
  return out;
}

VectorMap ClipToTracedRegion(const VectorMap& gt, const TracedRegion& tr) {
  if (gt.frame != Frame::kGlobal) {
    throw std::invalid_argument("ClipToTracedRegion: map must be global");
  }
  constexpr double kStep = 0.25;
  VectorMap out;
  out.frame = Frame::kGlobal;
  std::uint64_t next_id = 0;

  for (const MapElement& e : gt.elements) {
    const double total = PolylineLength(e.geometry);
    const int n = std::max(2, static_cast<int>(std::ceil(total / kStep)) + 1);
    const Polyline dense = ResamplePolyline(e.geometry, n);

    std::vector<char> inside(dense.points.size());
    bool all_inside = true;
    for (std::size_t i = 0; i < dense.points.size(); ++i) {
      inside[i] = tr.Contains(dense.points[i]);
      all_inside = all_inside && inside[i];
    }
    if (all_inside && (!e.geometry.closed ||
                       tr.Contains(e.geometry.points.front()))) {
      MapElement kept = e;
      kept.id = next_id++;
      out.elements.push_back(std::move(kept));
      continue;
    }

    // Maximal contiguous in-region runs of the densified polyline.
    std::vector<std::vector<Point2>> runs;
    std::size_t i = 0;
    while (i < dense.points.size()) {
      if (!inside[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < dense.points.size() && inside[j + 1]) ++j;
      runs.emplace_back(dense.points.begin() + i, dense.points.begin() + j + 1);
      i = j + 1;
    }
    // A run of a closed element crossing the start vertex is split in two.
    if (e.geometry.closed && runs.size() >= 2 && inside.front() &&
        inside.back()) {
      std::vector<Point2> merged = std::move(runs.back());
      runs.pop_back();
      merged.insert(merged.end(), runs.front().begin(), runs.front().end());
      runs.erase(runs.begin());
      runs.push_back(std::move(merged));
    }
    for (std::vector<Point2>& run : runs) {
      if (run.size() < 2) continue;
      Polyline piece;
      piece.points = std::move(run);
      if (!IsValidPolyline(piece) ||
          PolylineLength(piece) < kMinFragmentLength) {
        continue;
      }
      MapElement elem;
      elem.id = next_id++;
      elem.category = e.category;
      elem.geometry = std::move(piece);
      elem.score = e.score;
      out.elements.push_back(std::move(elem));
    }
  }
  return out;
}

ScenarioArtifacts RunScenario(const ScenarioConfig& cfg,
                              const std::optional<VectorMap>& initial) {
  if (cfg.n_frames < 1 || cfg.update_every < 1) {
    throw std::invalid_argument("RunScenario: invalid frame counts");
  }
  ScenarioArtifacts art;
  art.gt_global = GenerateGroundTruth(cfg.world);
  art.poses = GenerateTrajectory(art.gt_global, cfg);

  if (initial.has_value()) {
    art.state.map = *initial;
    art.state.map.frame = Frame::kGlobal;
    for (const MapElement& e : art.state.map.elements) {
      art.state.next_id = std::max(art.state.next_id, e.id + 1);
    }
  }

  for (int f = 0; f < cfg.n_frames; ++f) {
    const Pose& pose = art.poses[f];
    VectorMap pred = Perceive(art.gt_global, pose, cfg.window, cfg.noise,
                              FrameSeed(cfg.seed, f));
    VectorMap gt_local =
        FragmentsToLocalMap(ClipMap(art.gt_global, pose, cfg.window));
    art.traced = UpdateTracedRegion(std::move(art.traced), pose, cfg.window);
    if (f % cfg.update_every == 0) {
      art.state = MergeStep(art.state, pred, pose, cfg.builder);
    }
    art.frame_preds.push_back(std::move(pred));
    art.frame_gts.push_back(std::move(gt_local));
  }

  const EvalReport ap =
      ApStream(art.frame_preds, art.frame_gts, cfg.eval_thresholds);
  const VectorMap gt_region = ClipToTracedRegion(art.gt_global, art.traced);
  const EvalReport gap =
      GapMap(art.state.map, gt_region, cfg.eval_thresholds);
  art.report = CombineReports(ap, gap);
  return art;
}

}  // namespace gmap
