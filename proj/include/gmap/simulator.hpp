#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmap/builder.hpp"
#include "gmap/metrics.hpp"
#include "gmap/rasterizer.hpp"

namespace gmap {

// Procedural Manhattan-grid world used in place of real dataset maps.
struct WorldConfig {
  int blocks_x = 2;
  int blocks_y = 2;
  double block_size = 100.0;
  double road_width = 8.0;
  int lanes_per_road = 2;
  double crossing_length = 4.0;
  std::uint64_t seed = 0;
};

// Knobs of the noisy-perception oracle standing in for a learned model.
struct NoiseConfig {
  double point_sigma = 0.0;      // per-vertex Gaussian jitter, meters
  double pose_sigma_xy = 0.0;    // per-frame localization drift, meters
  double pose_sigma_yaw = 0.0;   // radians
  double drop_prob = 0.0;        // per-element dropout
  double spurious_rate = 0.0;    // expected spurious elements per frame
  double score_scale = 2.0;      // score = max(0.05, 1 - displacement/scale)
};

enum class ScenarioMode { kSingleScene, kCrossScene };

struct ScenarioConfig {
  WorldConfig world;
  NoiseConfig noise;
  ClipWindow window{60.0, 30.0};
  double frame_hz = 2.0;
  int update_every = 4;
  int n_frames = 60;
  BuilderParams builder;
  std::vector<double> eval_thresholds = DefaultThresholds();
  ScenarioMode mode = ScenarioMode::kSingleScene;
  std::string initial_map_path;  // cross-scene only; empty = start empty
  std::uint64_t seed = 0;
};

struct ScenarioArtifacts {
  VectorMap gt_global;
  std::vector<Pose> poses;
  std::vector<VectorMap> frame_preds;  // ego frame, one per frame
  std::vector<VectorMap> frame_gts;    // noiseless clips, ego frame
  GlobalMapState state;
  TracedRegion traced;
  EvalReport report;
};

// Deterministic Manhattan grid: one closed road-boundary rectangle per block
// (inset by road_width/2), (lanes_per_road - 1) lane dividers per road
// segment, and one closed ped crossing at every road-segment midpoint.
// Element counts: bx*by boundaries,
// (lanes-1) * (bx*(by+1) + by*(bx+1)) dividers,
// bx*(by+1) + by*(bx+1) crossings.
VectorMap GenerateGroundTruth(const WorldConfig& cfg);

// Constant-speed boustrophedon route over the road grid; consecutive poses
// advance window.length/24 meters, wrapping when the route is exhausted.
std::vector<Pose> GenerateTrajectory(const VectorMap& gt,
                                     const ScenarioConfig& cfg);

// Noisy-perception oracle: clips GT at a drift-perturbed pose, drops and
// jitters elements, and injects spurious ones. Deterministic per frame_seed.
VectorMap Perceive(const VectorMap& gt, const Pose& pose,
                   const ClipWindow& window, const NoiseConfig& noise,
                   std::uint64_t frame_seed);

// Ground truth restricted to the traced region; pieces shorter than the
// clip minimum are dropped.
VectorMap ClipToTracedRegion(const VectorMap& gt, const TracedRegion& tr);

std::uint64_t FrameSeed(std::uint64_t run_seed, int frame_index);

// Full closed loop: perceive each frame, merge every update_every-th frame,
// then compute AP over the frame stream and GAP against GT clipped to the
// traced region. `initial` seeds the builder state for cross-scene runs.
ScenarioArtifacts RunScenario(
    const ScenarioConfig& cfg,
    const std::optional<VectorMap>& initial = std::nullopt);

}  // namespace gmap
