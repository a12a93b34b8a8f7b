#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gmap/simulator.hpp"

using namespace gmap;

namespace {

int CountCategory(const VectorMap& m, Category cat) {
  int n = 0;
  for (const MapElement& e : m.elements) {
    if (e.category == cat) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("ground truth element counts") {
  WorldConfig cfg;

  SUBCASE("single block") {
    cfg.blocks_x = 1;
    cfg.blocks_y = 1;
    const VectorMap gt = GenerateGroundTruth(cfg);
    CHECK(CountCategory(gt, Category::kRoadBoundary) == 1);
    // 4 road segments around the block, one crossing each.
    CHECK(CountCategory(gt, Category::kPedCrossing) == 4);
    CHECK(CountCategory(gt, Category::kLaneDivider) == 4);
  }

  SUBCASE("2x2 grid") {
    const VectorMap gt = GenerateGroundTruth(cfg);
    const int segments = cfg.blocks_x * (cfg.blocks_y + 1) +
                         cfg.blocks_y * (cfg.blocks_x + 1);
    CHECK(segments == 12);
    CHECK(CountCategory(gt, Category::kRoadBoundary) == 4);
    CHECK(CountCategory(gt, Category::kPedCrossing) == 12);
    CHECK(CountCategory(gt, Category::kLaneDivider) ==
          (cfg.lanes_per_road - 1) * segments);
  }

  SUBCASE("extra lanes add dividers") {
    cfg.lanes_per_road = 3;
    const VectorMap gt = GenerateGroundTruth(cfg);
    CHECK(CountCategory(gt, Category::kLaneDivider) == 2 * 12);
  }
}

TEST_CASE("ground truth is well formed and deterministic") {
  WorldConfig cfg;
  const VectorMap a = GenerateGroundTruth(cfg);
  CHECK(a.frame == Frame::kGlobal);
  CHECK_FALSE(ValidateMap(a).has_value());
  for (const MapElement& e : a.elements) {
    if (e.category == Category::kPedCrossing) CHECK(e.geometry.closed);
    if (e.category == Category::kRoadBoundary) CHECK(e.geometry.closed);
    if (e.category == Category::kLaneDivider) CHECK_FALSE(e.geometry.closed);
    CHECK(e.score == 1.0);
  }

  const VectorMap b = GenerateGroundTruth(cfg);
  REQUIRE(b.elements.size() == a.elements.size());
  for (std::size_t i = 0; i < a.elements.size(); ++i) {
    CHECK(ChamferDistance(a.elements[i].geometry, b.elements[i].geometry) <
          1e-12);
  }
}

TEST_CASE("trajectory steps are constant and on the road grid") {
  ScenarioConfig cfg;
  const VectorMap gt = GenerateGroundTruth(cfg.world);
  const auto poses = GenerateTrajectory(gt, cfg);
  REQUIRE(static_cast<int>(poses.size()) == cfg.n_frames);
  const double step = cfg.window.length / 24.0;
  for (std::size_t i = 0; i + 1 < poses.size(); ++i) {
    const double d = std::hypot(poses[i + 1].x - poses[i].x,
                                poses[i + 1].y - poses[i].y);
    // Wrap and corner frames can be shorter; never longer than the step.
    CHECK(d <= step + 1e-9);
  }
  // Poses stay within the world bounds.
  const double max_x = cfg.world.blocks_x * cfg.world.block_size;
  const double max_y = cfg.world.blocks_y * cfg.world.block_size;
  for (const Pose& p : poses) {
    CHECK(p.x >= -1e-9);
    CHECK(p.x <= max_x + 1e-9);
    CHECK(p.y >= -1e-9);
    CHECK(p.y <= max_y + 1e-9);
  }
}

TEST_CASE("frame seed decorrelates frames and runs") {
  CHECK(FrameSeed(1, 0) != FrameSeed(1, 1));
  CHECK(FrameSeed(1, 0) != FrameSeed(2, 0));
  CHECK(FrameSeed(7, 13) == FrameSeed(7, 13));
}

TEST_CASE("perceive") {
  WorldConfig world;
  const VectorMap gt = GenerateGroundTruth(world);
  const Pose pose{world.block_size / 2.0, 0.0, 0.0};
  const ClipWindow window{60, 30};

  SUBCASE("noiseless perception equals the clip") {
    NoiseConfig clean;
    const VectorMap obs = Perceive(gt, pose, window, clean, 123);
    const auto frags = ClipMap(gt, pose, window);
    REQUIRE(obs.elements.size() == frags.size());
    for (std::size_t i = 0; i < frags.size(); ++i) {
      CHECK(ChamferDistance(obs.elements[i].geometry,
                            frags[i].element.geometry) < 1e-12);
      CHECK(obs.elements[i].score == 1.0);
    }
  }

  SUBCASE("drop_prob 1 removes every real element") {
    NoiseConfig noise;
    noise.drop_prob = 1.0;
    CHECK(Perceive(gt, pose, window, noise, 123).elements.empty());
  }

  SUBCASE("deterministic per frame seed") {
    NoiseConfig noise;
    noise.point_sigma = 0.5;
    noise.pose_sigma_xy = 0.3;
    noise.drop_prob = 0.2;
    noise.spurious_rate = 2.0;
    const VectorMap a = Perceive(gt, pose, window, noise, 77);
    const VectorMap b = Perceive(gt, pose, window, noise, 77);
    REQUIRE(a.elements.size() == b.elements.size());
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
      CHECK(a.elements[i].score == b.elements[i].score);
      CHECK(ChamferDistance(a.elements[i].geometry, b.elements[i].geometry) <
            1e-12);
    }
    const VectorMap c = Perceive(gt, pose, window, noise, 78);
    bool differs = a.elements.size() != c.elements.size();
    for (std::size_t i = 0; !differs && i < a.elements.size(); ++i) {
      differs = ChamferDistance(a.elements[i].geometry,
                                c.elements[i].geometry) > 0.0;
    }
    CHECK(differs);
  }

  SUBCASE("jitter lowers scores") {
    NoiseConfig noise;
    noise.point_sigma = 0.5;
    const VectorMap obs = Perceive(gt, pose, window, noise, 5);
    REQUIRE_FALSE(obs.elements.empty());
    for (const MapElement& e : obs.elements) {
      CHECK(e.score < 1.0);
      CHECK(e.score >= 0.05);
    }
  }

  SUBCASE("spurious elements appear with low scores") {
    NoiseConfig noise;
    noise.drop_prob = 1.0;
    noise.spurious_rate = 4.0;
    int total = 0;
    for (int f = 0; f < 20; ++f) {
      const VectorMap obs = Perceive(gt, pose, window, noise, FrameSeed(9, f));
      total += static_cast<int>(obs.elements.size());
      for (const MapElement& e : obs.elements) {
        CHECK(e.score <= 0.5);
        CHECK(e.score >= 0.1);
      }
    }
    // Poisson(4) over 20 frames.
    CHECK(total > 40);
    CHECK(total < 120);
  }
}

TEST_CASE("clip to traced region") {
  WorldConfig world;
  world.blocks_x = 1;
  world.blocks_y = 1;
  const VectorMap gt = GenerateGroundTruth(world);

  SUBCASE("empty region keeps nothing") {
    CHECK(ClipToTracedRegion(gt, {}).elements.empty());
  }

  SUBCASE("a region covering the world keeps everything") {
    TracedRegion tr = UpdateTracedRegion(
        {}, Pose{50, 50, 0}, ClipWindow{400, 400});
    const VectorMap kept = ClipToTracedRegion(gt, tr);
    REQUIRE(kept.elements.size() == gt.elements.size());
    double gt_len = 0.0, kept_len = 0.0;
    for (const MapElement& e : gt.elements) gt_len += PolylineLength(e.geometry);
    for (const MapElement& e : kept.elements) {
      kept_len += PolylineLength(e.geometry);
    }
    CHECK(kept_len == doctest::Approx(gt_len).epsilon(1e-3));
  }

  SUBCASE("a partial region keeps a strict subset of length") {
    TracedRegion tr = UpdateTracedRegion(
        {}, Pose{50, 0, 0}, ClipWindow{60, 30});
    const VectorMap kept = ClipToTracedRegion(gt, tr);
    REQUIRE_FALSE(kept.elements.empty());
    double gt_len = 0.0, kept_len = 0.0;
    for (const MapElement& e : gt.elements) gt_len += PolylineLength(e.geometry);
    for (const MapElement& e : kept.elements) {
      kept_len += PolylineLength(e.geometry);
    }
    CHECK(kept_len < gt_len);
  }
}

TEST_CASE("run scenario end to end") {
  ScenarioConfig cfg;
  cfg.world.blocks_x = 1;
  cfg.world.blocks_y = 1;
  cfg.n_frames = 16;
  const ScenarioArtifacts art = RunScenario(cfg);
  CHECK(static_cast<int>(art.poses.size()) == cfg.n_frames);
  CHECK(static_cast<int>(art.frame_preds.size()) == cfg.n_frames);
  CHECK(static_cast<int>(art.frame_gts.size()) == cfg.n_frames);
  CHECK_FALSE(art.state.map.elements.empty());
  CHECK(art.state.map.frame == Frame::kGlobal);
  CHECK_FALSE(art.traced.rectangles.empty());
  REQUIRE(art.report.gap_mean.has_value());
  // Noiseless short run still maps its traced region well.
  CHECK(*art.report.gap_mean > 0.8);

  // Determinism.
  const ScenarioArtifacts again = RunScenario(cfg);
  REQUIRE(again.state.map.elements.size() == art.state.map.elements.size());
  CHECK(*again.report.gap_mean == *art.report.gap_mean);
}

TEST_CASE("dropping every element zeroes both metrics") {
  ScenarioConfig cfg;
  cfg.world.blocks_x = 1;
  cfg.world.blocks_y = 1;
  cfg.n_frames = 16;
  cfg.noise.drop_prob = 1.0;
  const ScenarioArtifacts art = RunScenario(cfg);
  CHECK(art.state.map.elements.empty());
  REQUIRE(art.report.gap_mean.has_value());
  CHECK(*art.report.gap_mean == 0.0);
  REQUIRE(art.report.map_mean.has_value());
  CHECK(*art.report.map_mean == 0.0);
}

TEST_CASE("built elements stay inside the inflated traced region") {
  ScenarioConfig cfg;
  cfg.world.blocks_x = 1;
  cfg.world.blocks_y = 1;
  cfg.n_frames = 24;
  cfg.noise.point_sigma = 0.5;
  cfg.noise.spurious_rate = 2.0;
  cfg.seed = 5;
  const ScenarioArtifacts art = RunScenario(cfg);

  const double margin = 2.0 + 4.0 * cfg.noise.point_sigma;
  const auto inside_inflated = [&](const Point2& p) {
    for (const auto& [pose, window] : art.traced.rectangles) {
      const Polyline probe{{p}, false};
      const Point2 ego =
          TransformPolyline(probe, pose, TransformDirection::kGlobalToEgo)
              .points[0];
      if (std::abs(ego.x) <= window.length / 2.0 + margin &&
          std::abs(ego.y) <= window.width / 2.0 + margin) {
        return true;
      }
    }
    return false;
  };
  for (const MapElement& e : art.state.map.elements) {
    for (const Point2& p : e.geometry.points) {
      CHECK(inside_inflated(p));
    }
  }
}

TEST_CASE("warm-starting from a previous run never hurts on average") {
  double cold_total = 0.0, warm_total = 0.0;
  for (int s = 0; s < 10; ++s) {
    ScenarioConfig cfg;
    cfg.world.blocks_x = 1;
    cfg.world.blocks_y = 1;
    cfg.n_frames = 24;
    cfg.noise.point_sigma = 0.2;
    cfg.noise.drop_prob = 0.3;
    cfg.seed = 300 + s;
    const ScenarioArtifacts cold = RunScenario(cfg);
    cold_total += cold.report.gap_mean.value_or(0.0);

    ScenarioConfig warm_cfg = cfg;
    warm_cfg.mode = ScenarioMode::kCrossScene;
    const ScenarioArtifacts warm = RunScenario(warm_cfg, cold.state.map);
    warm_total += warm.report.gap_mean.value_or(0.0);
  }
  CHECK(warm_total >= cold_total - 1e-9);
}
