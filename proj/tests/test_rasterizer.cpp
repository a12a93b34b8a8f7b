#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gmap/rasterizer.hpp"

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

const BevMask& MaskFor(const std::vector<BevMask>& masks, Category cat) {
  for (const BevMask& m : masks) {
    if (m.channel == CategoryName(cat)) return m;
  }
  REQUIRE(false);
  return masks.front();
}

// Cell whose center is nearest to the ego point.
std::pair<int, int> CellAt(const GridSpec& spec, const Point2& p) {
  int best_r = 0, best_c = 0;
  double best = 1e18;
  for (int r = 0; r < spec.Rows(); ++r) {
    for (int c = 0; c < spec.Cols(); ++c) {
      const Point2 ctr = spec.CellCenter(r, c);
      const double d = std::hypot(ctr.x - p.x, ctr.y - p.y);
      if (d < best) {
        best = d;
        best_r = r;
        best_c = c;
      }
    }
  }
  return {best_r, best_c};
}

}  // namespace

TEST_CASE("grid spec shape and validation") {
  GridSpec spec;
  spec.window = {60, 30};
  spec.resolution = 0.3;
  CHECK(spec.Rows() == 100);
  CHECK(spec.Cols() == 200);
  ValidateGridSpec(spec);

  spec.resolution = 0.7;
  CHECK_THROWS_AS(ValidateGridSpec(spec), std::invalid_argument);
}

TEST_CASE("soft rasterization analytic values") {
  GridSpec spec;
  spec.window = {6, 6};
  spec.resolution = 1.0;
  const double tau = 1.0;
  // Line passing exactly through a row of cell centers (y = 0.5).
  const auto masks = RasterizeSoft(
      {Element(0, Category::kLaneDivider, {{-3, 0.5}, {3, 0.5}})}, spec, tau);
  REQUIRE(masks.size() == 3);
  const BevMask& m = MaskFor(masks, Category::kLaneDivider);

  const auto [r0, c0] = CellAt(spec, {0.5, 0.5});
  CHECK(m.At(r0, c0) == doctest::Approx(1.0).epsilon(1e-9));

  // One grid step away: D = tau -> exp(-1).
  const auto [r1, c1] = CellAt(spec, {0.5, 1.5});
  CHECK(m.At(r1, c1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  // Other categories are all-zero but present.
  const BevMask& road = MaskFor(masks, Category::kRoadBoundary);
  for (double v : road.values) CHECK(v == 0.0);

  CHECK_THROWS_AS(RasterizeSoft({}, spec, 0.0), std::invalid_argument);
}

TEST_CASE("soft rasterization takes the max over elements") {
  GridSpec spec;
  spec.window = {6, 6};
  spec.resolution = 1.0;
  // Two parallel lines at D = 0.5 and D = 1.5 from the probed center.
  const auto masks = RasterizeSoft(
      {Element(0, Category::kLaneDivider, {{-3, 1.0}, {3, 1.0}}),
       Element(1, Category::kLaneDivider, {{-3, 2.0}, {3, 2.0}})},
      spec, 1.0);
  const BevMask& m = MaskFor(masks, Category::kLaneDivider);
  const auto [r, c] = CellAt(spec, {0.5, 0.5});
  CHECK(m.At(r, c) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("intensity decreases with distance and lives in (0, 1]") {
  GridSpec spec;
  spec.window = {12, 12};
  spec.resolution = 1.0;
  const auto masks = RasterizeSoft(
      {Element(0, Category::kRoadBoundary, {{-6, 0.5}, {6, 0.5}})}, spec, 2.0);
  const BevMask& m = MaskFor(masks, Category::kRoadBoundary);
  double prev = 2.0;
  for (double y : {0.5, 1.5, 2.5, 3.5, 4.5}) {
    const auto [r, c] = CellAt(spec, {0.5, y});
    const double v = m.At(r, c);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("doubling tau takes the square root of each intensity") {
  GridSpec spec;
  spec.window = {12, 12};
  spec.resolution = 1.0;
  const std::vector<MapElement> elems = {
      Element(0, Category::kLaneDivider, {{-6, 0.5}, {6, 0.5}})};
  const auto narrow_masks = RasterizeSoft(elems, spec, 1.0);
  const auto wide_masks = RasterizeSoft(elems, spec, 2.0);
  const BevMask& base = MaskFor(narrow_masks, Category::kLaneDivider);
  const BevMask& wide = MaskFor(wide_masks, Category::kLaneDivider);
  for (std::size_t i = 0; i < base.values.size(); ++i) {
    CHECK(wide.values[i] ==
          doctest::Approx(std::sqrt(base.values[i])).epsilon(1e-9));
  }
}

TEST_CASE("traced region membership and mask") {
  TracedRegion tr;
  CHECK_FALSE(tr.Contains({0, 0}));
  tr = UpdateTracedRegion(tr, Pose{0, 0, 0}, ClipWindow{60, 30});
  tr = UpdateTracedRegion(tr, Pose{100, 0, M_PI / 2.0}, ClipWindow{60, 30});
  CHECK(tr.Contains({0, 0}));
  CHECK(tr.Contains({29.9, 14.9}));
  CHECK_FALSE(tr.Contains({0, 15.1}));
  // Rotated rectangle: extends 15 in x, 30 in y around (100, 0).
  CHECK(tr.Contains({100, 29.9}));
  CHECK_FALSE(tr.Contains({100 + 15.1, 0}));

  GridSpec spec;
  spec.window = {6, 6};
  spec.resolution = 1.0;
  const BevMask mask = TracedMask(tr, Pose{0, 0, 0}, spec);
  CHECK(mask.channel == kTracedRegionChannel);
  for (double v : mask.values) CHECK((v == 0.0 || v == 1.0));
  const auto [r, c] = CellAt(spec, {0.5, 0.5});
  CHECK(mask.At(r, c) == 1.0);

  const BevMask far_mask = TracedMask(tr, Pose{500, 500, 0}, spec);
  for (double v : far_mask.values) CHECK(v == 0.0);
}

TEST_CASE("clip and rasterize emits four masks") {
  VectorMap global;
  global.frame = Frame::kGlobal;
  global.elements = {
      Element(0, Category::kRoadBoundary, {{-50, 10}, {50, 10}}),
      Element(1, Category::kLaneDivider, {{-50, 0}, {50, 0}})};
  TracedRegion tr = UpdateTracedRegion({}, Pose{0, 0, 0}, ClipWindow{60, 30});
  GridSpec spec;
  spec.window = {60, 30};
  spec.resolution = 0.3;
  const auto masks = ClipAndRasterize(global, tr, Pose{0, 0, 0}, spec, 1.0);
  REQUIRE(masks.size() == 4);
  CHECK(masks[0].channel == CategoryName(Category::kRoadBoundary));
  CHECK(masks[1].channel == CategoryName(Category::kLaneDivider));
  CHECK(masks[2].channel == CategoryName(Category::kPedCrossing));
  CHECK(masks[3].channel == kTracedRegionChannel);
  for (const BevMask& m : masks) {
    CHECK(m.rows == 100);
    CHECK(m.cols == 200);
    CHECK(static_cast<int>(m.values.size()) == m.rows * m.cols);
  }
  // Lane divider runs through the window; the nearest cell center is half a
  // cell away from the line.
  double peak = 0.0;
  for (double v : masks[1].values) peak = std::max(peak, v);
  CHECK(peak == doctest::Approx(std::exp(-0.15)).epsilon(1e-9));
  // Nothing to rasterize for ped crossings.
  for (double v : masks[2].values) CHECK(v == 0.0);
}
