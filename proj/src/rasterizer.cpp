#include "gmap/rasterizer.hpp"

#include <cmath>
#include <stdexcept>

namespace gmap {

int GridSpec::Rows() const {
  return static_cast<int>(std::llround(window.width / resolution));
}

int GridSpec::Cols() const {
  return static_cast<int>(std::llround(window.length / resolution));
}

Point2 GridSpec::CellCenter(int row, int col) const {
  return {-window.length / 2.0 + (col + 0.5) * resolution,
          -window.width / 2.0 + (row + 0.5) * resolution};
}

void ValidateGridSpec(const GridSpec& spec) {
  if (spec.resolution <= 0.0) {
    throw std::invalid_argument("GridSpec: resolution must be > 0");
  }
  const double rows = spec.window.width / spec.resolution;
  const double cols = spec.window.length / spec.resolution;
  if (std::abs(rows - std::llround(rows)) > 1e-9 ||
      std::abs(cols - std::llround(cols)) > 1e-9 || rows < 1 || cols < 1) {
    throw std::invalid_argument(
        "GridSpec: window dimensions must be positive multiples of the "
        "resolution");
  }
}

bool TracedRegion::Contains(const Point2& global_point) const {
  for (const auto& [pose, window] : rectangles) {
    const Point2 local =
        TransformPoint(global_point, pose, TransformDirection::kGlobalToEgo);
    if (std::abs(local.x) <= window.length / 2.0 &&
        std::abs(local.y) <= window.width / 2.0) {
      return true;
    }
  }
  return false;
}

std::vector<BevMask> RasterizeSoft(const std::vector<MapElement>& elements,
                                   const GridSpec& spec, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("RasterizeSoft: tau must be > 0");
  ValidateGridSpec(spec);
  const int rows = spec.Rows();
  const int cols = spec.Cols();

  std::vector<BevMask> masks;
  for (Category cat : kAllCategories) {
    BevMask mask;
    mask.channel = CategoryName(cat);
    mask.rows = rows;
    mask.cols = cols;
    mask.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    for (const MapElement& e : elements) {
      if (e.category != cat) continue;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          const Point2 center = spec.CellCenter(r, c);
          const double d = PointToPolylineDistance(center, e.geometry);
          const double intensity = std::exp(-d / tau);
          double& cell = mask.values[r * cols + c];
          cell = std::max(cell, intensity);
        }
      }
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

TracedRegion UpdateTracedRegion(TracedRegion tr, const Pose& pose,
                                const ClipWindow& window) {
  tr.rectangles.emplace_back(pose, window);
  return tr;
}

BevMask TracedMask(const TracedRegion& tr, const Pose& ego_pose,
                   const GridSpec& spec) {
  ValidateGridSpec(spec);
  BevMask mask;
  mask.channel = kTracedRegionChannel;
  mask.rows = spec.Rows();
  mask.cols = spec.Cols();
  mask.values.assign(static_cast<std::size_t>(mask.rows) * mask.cols, 0.0);
  for (int r = 0; r < mask.rows; ++r) {
    for (int c = 0; c < mask.cols; ++c) {
      const Point2 global = TransformPoint(spec.CellCenter(r, c), ego_pose,
                                           TransformDirection::kEgoToGlobal);
      if (tr.Contains(global)) mask.values[r * mask.cols + c] = 1.0;
    }
  }
  return mask;
}

std::vector<BevMask> ClipAndRasterize(const VectorMap& global_map,
                                      const TracedRegion& tr, const Pose& pose,
                                      const GridSpec& spec, double tau) {
  const std::vector<ClipFragment> fragments =
      ClipMap(global_map, pose, spec.window);
  std::vector<MapElement> elements;
  elements.reserve(fragments.size());
  for (const ClipFragment& frag : fragments) elements.push_back(frag.element);
  std::vector<BevMask> masks = RasterizeSoft(elements, spec, tau);
  masks.push_back(TracedMask(tr, pose, spec));
  return masks;
}

}  // namespace gmap
