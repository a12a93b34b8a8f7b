#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmap/geometry.hpp"

namespace gmap {

enum class Category : std::uint8_t {
  kRoadBoundary = 0,
  kLaneDivider = 1,
  kPedCrossing = 2,
};

inline constexpr Category kAllCategories[] = {
    Category::kRoadBoundary, Category::kLaneDivider, Category::kPedCrossing};
inline constexpr int kCategoryCount = 3;

std::string CategoryName(Category c);
std::optional<Category> CategoryFromName(const std::string& name);

// Raster channel name for the traced-region mask; not a valid element
// category.
inline constexpr const char* kTracedRegionChannel = "traced_region";

struct MapElement {
  std::uint64_t id = 0;
  Category category = Category::kRoadBoundary;
  Polyline geometry;
  double score = 1.0;
};

enum class Frame { kEgo, kGlobal };

struct VectorMap {
  Frame frame = Frame::kEgo;
  std::vector<MapElement> elements;

  const MapElement* FindElement(std::uint64_t id) const;
  MapElement* FindElement(std::uint64_t id);
};

// Validates VectorMap invariants: distinct ids, valid geometries, scores in
// [0,1], closedness matching the category convention. Returns a diagnostic
// on failure.
std::optional<std::string> ValidateMap(const VectorMap& m);

struct ClipWindow {
  double length = 60.0;  // longitudinal extent (along heading), meters
  double width = 30.0;   // lateral extent, meters
};

struct ClipFragment {
  MapElement element;          // ego frame
  std::uint64_t parent_id = 0;
  double arc_offset = 0.0;     // arc length on the parent where this begins
};

// In-window pieces shorter than this are discarded by ClipMap.
inline constexpr double kMinFragmentLength = 0.2;

// Transforms every element of a global map into the ego frame of `pose` and
// intersects it with the axis-aligned rectangle
// x in [-length/2, length/2], y in [-width/2, width/2]. Each maximal
// connected in-window piece becomes one fragment; boundary crossings insert
// exact intersection points.
std::vector<ClipFragment> ClipMap(const VectorMap& m, const Pose& pose,
                                  const ClipWindow& window);

// Drops parentage, yielding a plain ego-frame map with regenerated ids.
VectorMap FragmentsToLocalMap(const std::vector<ClipFragment>& fragments);

VectorMap MapToGlobal(const VectorMap& m, const Pose& pose);
VectorMap MapToEgo(const VectorMap& m, const Pose& pose);

double NormalizeYaw(double yaw);

}  // namespace gmap
