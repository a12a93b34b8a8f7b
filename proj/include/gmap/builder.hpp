#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "gmap/map_model.hpp"

namespace gmap {

struct BuilderParams {
  // Per-category Chamfer matching distance D_c, indexed by Category.
  std::array<double, kCategoryCount> match_distance = {2.0, 1.0, 0.5};
  // Per-category NMS buffer radius r_c; defaults equal the match distances.
  std::array<double, kCategoryCount> nms_buffer = {2.0, 1.0, 0.5};
  double nms_iou_threshold = 0.5;
  ClipWindow window;
  double min_splice_span = 0.1;

  double MatchDistance(Category c) const {
    return match_distance[static_cast<int>(c)];
  }
  double NmsBuffer(Category c) const {
    return nms_buffer[static_cast<int>(c)];
  }
};

struct MatchResult {
  // (parent global element id, local element id)
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::vector<std::uint64_t> unmatched_global;
  std::vector<std::uint64_t> unmatched_local;
};

struct GlobalMapState {
  VectorMap map{Frame::kGlobal, {}};
  std::uint64_t next_id = 0;
};

// Per category, solves the minimum-total-cost assignment on the Chamfer cost
// matrix between clipped global fragments and local elements, then discards
// pairs with Chamfer distance > D_c. Pairs are reported against the
// fragment's parent id; when two fragments of one parent both match, the
// lower-cost pair wins and the other local element is released.
MatchResult MatchMaps(const std::vector<ClipFragment>& global_fragments,
                      const VectorMap& local, const BuilderParams& params);

// Splices `local_elem` (already in the global frame) into `parent` between
// the projected arc lengths of its endpoints. A closed local element
// replaces the parent geometry wholly. Result keeps the parent id and takes
// the local score.
MapElement InplaceReplace(const MapElement& parent, double fragment_offset,
                          const MapElement& local_elem,
                          const BuilderParams& params);

// Score-ordered greedy suppression per category: an element is kept iff its
// buffered IoU with every already-kept element of the same category is below
// the threshold. Input order of survivors is preserved.
std::vector<MapElement> MapNms(const std::vector<MapElement>& elements,
                               const BuilderParams& params);

// One full merge: clip, match, in-place replace, append unmatched locals,
// then Map NMS over the categories present in the local map.
GlobalMapState MergeStep(const GlobalMapState& state,
                         const VectorMap& local_pred, const Pose& pose,
                         const BuilderParams& params);

}  // namespace gmap
