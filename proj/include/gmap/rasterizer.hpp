#pragma once

#include <string>
#include <vector>

#include "gmap/map_model.hpp"

namespace gmap {

struct GridSpec {
  ClipWindow window;
  double resolution = 0.3;  // meters per cell

  int Rows() const;  // width / resolution
  int Cols() const;  // length / resolution
  // Center of cell (row, col) in the ego frame.
  Point2 CellCenter(int row, int col) const;
};

// Throws if the window dimensions are not divisible by the resolution.
void ValidateGridSpec(const GridSpec& spec);

struct BevMask {
  std::string channel;  // category name or "traced_region"
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major, each in [0,1]

  double At(int row, int col) const { return values[row * cols + col]; }
};

// Union of per-frame perception footprints.
struct TracedRegion {
  std::vector<std::pair<Pose, ClipWindow>> rectangles;

  bool Contains(const Point2& global_point) const;
};

// Soft rasterization: for each cell center, intensity =
// max over same-category elements of exp(-D / tau). One mask per drivable
// category, in category order; categories without elements are all-zero.
std::vector<BevMask> RasterizeSoft(const std::vector<MapElement>& elements,
                                   const GridSpec& spec, double tau);

TracedRegion UpdateTracedRegion(TracedRegion tr, const Pose& pose,
                                const ClipWindow& window);

// Binary mask of the traced region as seen from `ego_pose`.
BevMask TracedMask(const TracedRegion& tr, const Pose& ego_pose,
                   const GridSpec& spec);

// Clips the global map at `pose`, rasterizes the three element categories and
// appends the traced-region mask: always exactly 4 masks.
std::vector<BevMask> ClipAndRasterize(const VectorMap& global_map,
                                      const TracedRegion& tr, const Pose& pose,
                                      const GridSpec& spec, double tau);

}  // namespace gmap
