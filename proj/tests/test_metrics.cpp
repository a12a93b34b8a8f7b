#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>

#include "doctest.h"
#include "gmap/metrics.hpp"

using namespace gmap;

namespace {

MapElement Element(std::uint64_t id, Category cat,
                   std::initializer_list<Point2> pts, double score = 1.0) {
  MapElement e;
  e.id = id;
  e.category = cat;
  e.geometry.points = pts;
  e.score = score;
  return e;
}

VectorMap MakeMap(Frame frame, std::vector<MapElement> elems) {
  VectorMap m;
  m.frame = frame;
  m.elements = std::move(elems);
  return m;
}

Detection Det(double score, bool tp) {
  Detection d;
  d.score = score;
  d.is_tp = tp;
  return d;
}

// Envelope AUC oracle: integrate max-precision-at-recall>=r over the distinct
// recall steps, directly from the definition.
double BruteForceAuc(const PrCurve& curve) {
  std::vector<double> recalls;
  for (const auto& [r, p] : curve.points) recalls.push_back(r);
  std::sort(recalls.begin(), recalls.end());
  recalls.erase(std::unique(recalls.begin(), recalls.end()), recalls.end());
  double area = 0.0, prev = 0.0;
  for (double r : recalls) {
    double env = 0.0;
    for (const auto& [pr, pp] : curve.points) {
      if (pr >= r) env = std::max(env, pp);
    }
    area += (r - prev) * env;
    prev = r;
  }
  return area;
}

}  // namespace

TEST_CASE("match frame detections") {
  const VectorMap gt = MakeMap(
      Frame::kEgo, {Element(0, Category::kLaneDivider, {{0, 0}, {10, 0}}),
                    Element(1, Category::kLaneDivider, {{0, 5}, {10, 5}})});

  SUBCASE("close prediction is a TP, far one an FP") {
    const VectorMap pred = MakeMap(
        Frame::kEgo,
        {Element(0, Category::kLaneDivider, {{0, 0.2}, {10, 0.2}}, 0.9),
         Element(1, Category::kLaneDivider, {{0, 20}, {10, 20}}, 0.8)});
    const FrameMatch m = MatchFrameDetections(pred, gt, 1.0);
    REQUIRE(m.detections.size() == 2);
    CHECK(m.gt_count[static_cast<int>(Category::kLaneDivider)] == 2);
    CHECK(m.detections[0].is_tp);
    CHECK_FALSE(m.detections[1].is_tp);
  }

  SUBCASE("each GT element can be claimed once") {
    const VectorMap pred = MakeMap(
        Frame::kEgo,
        {Element(0, Category::kLaneDivider, {{0, 0.1}, {10, 0.1}}, 0.9),
         Element(1, Category::kLaneDivider, {{0, 0.2}, {10, 0.2}}, 0.8)});
    const FrameMatch m = MatchFrameDetections(pred, gt, 1.0);
    int tps = 0;
    for (const Detection& d : m.detections) tps += d.is_tp ? 1 : 0;
    CHECK(tps == 1);
  }

  SUBCASE("threshold is strict") {
    const VectorMap one_gt = MakeMap(
        Frame::kEgo, {Element(0, Category::kLaneDivider, {{0, 0}, {10, 0}})});
    const VectorMap pred = MakeMap(
        Frame::kEgo,
        {Element(0, Category::kLaneDivider, {{0, 1}, {10, 1}}, 0.9)});
    CHECK_FALSE(MatchFrameDetections(pred, one_gt, 1.0).detections[0].is_tp);
    CHECK(MatchFrameDetections(pred, one_gt, 1.0 + 1e-9).detections[0].is_tp);
  }

  SUBCASE("categories never cross-match") {
    const VectorMap pred = MakeMap(
        Frame::kEgo,
        {Element(0, Category::kRoadBoundary, {{0, 0}, {10, 0}}, 0.9)});
    const FrameMatch m = MatchFrameDetections(pred, gt, 1.0);
    CHECK_FALSE(m.detections[0].is_tp);
  }

  SUBCASE("frame mismatch throws") {
    const VectorMap pred = MakeMap(Frame::kGlobal, {});
    CHECK_THROWS_AS(MatchFrameDetections(pred, gt, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("pr curve worked example") {
  // TP(0.9), FP(0.8), TP(0.7) against 2 GT elements.
  const PrCurve curve =
      ComputePrCurve({Det(0.9, true), Det(0.8, false), Det(0.7, true)}, 2);
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0].first == doctest::Approx(0.5));
  CHECK(curve.points[0].second == doctest::Approx(1.0));
  CHECK(curve.points[1].first == doctest::Approx(0.5));
  CHECK(curve.points[1].second == doctest::Approx(0.5));
  CHECK(curve.points[2].first == doctest::Approx(1.0));
  CHECK(curve.points[2].second == doctest::Approx(2.0 / 3.0));

  CHECK(Auc(curve) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("auc edge cases") {
  CHECK(Auc(ComputePrCurve({}, 3)) == 0.0);
  CHECK(Auc(ComputePrCurve({Det(0.9, true)}, 1)) == doctest::Approx(1.0));
  CHECK(Auc(ComputePrCurve({Det(0.9, false)}, 1)) == 0.0);
}

TEST_CASE("auc against brute-force envelope") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    const int gt_count = 1 + static_cast<int>(rng() % 8);
    const int n = static_cast<int>(rng() % 12);
    std::vector<Detection> dets;
    int tps = 0;
    for (int i = 0; i < n; ++i) {
      const bool tp = tps < gt_count && (rng() % 2 == 0);
      tps += tp ? 1 : 0;
      dets.push_back(Det(score(rng), tp));
    }
    const PrCurve curve = ComputePrCurve(dets, gt_count);
    CHECK(Auc(curve) == doctest::Approx(BruteForceAuc(curve)).epsilon(1e-12));
  }
}

TEST_CASE("auc invariant under monotone score transforms") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> score(0.05, 0.95);
  for (int it = 0; it < 50; ++it) {
    std::vector<Detection> dets;
    for (int i = 0; i < 8; ++i) dets.push_back(Det(score(rng), rng() % 2 == 0));
    const double base = Auc(ComputePrCurve(dets, 4));
    std::vector<Detection> warped = dets;
    for (Detection& d : warped) d.score = std::sqrt(d.score);
    CHECK(Auc(ComputePrCurve(warped, 4)) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("ap stream pools detections before the auc") {
  // Frame 0: one perfect prediction. Frame 1: one FP above a TP.
  const auto gt_line = [](double y) {
    return Element(0, Category::kLaneDivider, {{0, y}, {10, y}});
  };
  const std::vector<VectorMap> gts = {
      MakeMap(Frame::kEgo, {gt_line(0)}),
      MakeMap(Frame::kEgo, {gt_line(0)})};
  const std::vector<VectorMap> preds = {
      MakeMap(Frame::kEgo,
              {Element(0, Category::kLaneDivider, {{0, 0}, {10, 0}}, 0.9)}),
      MakeMap(Frame::kEgo,
              {Element(0, Category::kLaneDivider, {{0, 30}, {10, 30}}, 0.8),
               Element(1, Category::kLaneDivider, {{0, 0}, {10, 0}}, 0.7)})};
  const EvalReport r = ApStream(preds, gts, {1.0});
  const CategoryResult& lane =
      r.ap[static_cast<int>(Category::kLaneDivider)];
  REQUIRE(lane.evaluated);
  // Pooled curve: TP(0.9), FP(0.8), TP(0.7) with 2 GT -> 5/6.
  CHECK(lane.ap_per_threshold.at(1.0) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK_FALSE(r.ap[static_cast<int>(Category::kPedCrossing)].evaluated);
  REQUIRE(r.map_mean.has_value());
  CHECK(*r.map_mean == doctest::Approx(5.0 / 6.0));

  CHECK_THROWS_AS(ApStream(preds, {gts[0]}, {1.0}), std::invalid_argument);
}

TEST_CASE("gap on identical maps is 1") {
  const VectorMap gt = MakeMap(
      Frame::kGlobal,
      {Element(0, Category::kRoadBoundary, {{0, 0}, {50, 0}}, 1.0),
       Element(1, Category::kLaneDivider, {{0, 4}, {50, 4}}, 1.0)});
  const EvalReport r = GapMap(gt, gt, DefaultThresholds());
  for (Category cat : {Category::kRoadBoundary, Category::kLaneDivider}) {
    const CategoryResult& res = r.gap[static_cast<int>(cat)];
    REQUIRE(res.evaluated);
    CHECK(res.mean_ap == doctest::Approx(1.0));
  }
  CHECK_FALSE(r.gap[static_cast<int>(Category::kPedCrossing)].evaluated);
  REQUIRE(r.gap_mean.has_value());
  CHECK(*r.gap_mean == doctest::Approx(1.0));
}

TEST_CASE("gap on empty prediction is 0, empty everything is unevaluated") {
  const VectorMap gt = MakeMap(
      Frame::kGlobal, {Element(0, Category::kLaneDivider, {{0, 0}, {50, 0}})});
  const VectorMap empty = MakeMap(Frame::kGlobal, {});
  EvalReport r = GapMap(empty, gt, DefaultThresholds());
  CHECK(r.gap[static_cast<int>(Category::kLaneDivider)].evaluated);
  CHECK(r.gap[static_cast<int>(Category::kLaneDivider)].mean_ap == 0.0);

  r = GapMap(empty, empty, DefaultThresholds());
  CHECK_FALSE(r.gap_mean.has_value());

  const VectorMap ego = MakeMap(Frame::kEgo, {});
  CHECK_THROWS_AS(GapMap(ego, gt, DefaultThresholds()),
                  std::invalid_argument);
}

TEST_CASE("gap increases as the prediction degrades") {
  const VectorMap gt = MakeMap(
      Frame::kGlobal, {Element(0, Category::kLaneDivider, {{0, 0}, {50, 0}}),
                       Element(1, Category::kLaneDivider, {{0, 4}, {50, 4}})});
  double prev = 1.1;
  for (double dy : {0.0, 0.6, 1.2, 2.0}) {
    VectorMap pred = gt;
    for (MapElement& e : pred.elements) {
      for (Point2& p : e.geometry.points) p.y += dy;
    }
    const EvalReport r = GapMap(pred, gt, DefaultThresholds());
    const double gap = *r.gap_mean;
    CHECK(gap <= prev + 1e-12);
    prev = gap;
  }
  CHECK(prev == 0.0);  // offset 2.0 is past every threshold
}

TEST_CASE("combine reports keeps ap and gap sides") {
  const VectorMap gt = MakeMap(
      Frame::kGlobal, {Element(0, Category::kLaneDivider, {{0, 0}, {50, 0}})});
  const std::vector<VectorMap> ego_gt = {MapToEgo(gt, Pose{0, 0, 0})};
  const EvalReport ap_part = ApStream(ego_gt, ego_gt, DefaultThresholds());
  const EvalReport gap_part = GapMap(gt, gt, DefaultThresholds());
  const EvalReport both = CombineReports(ap_part, gap_part);
  CHECK(*both.map_mean == doctest::Approx(1.0));
  CHECK(*both.gap_mean == doctest::Approx(1.0));
  CHECK(both.thresholds == DefaultThresholds());
}
