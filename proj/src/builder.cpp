#include "gmap/builder.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "gmap/assignment.hpp"

namespace gmap {

MatchResult MatchMaps(const std::vector<ClipFragment>& global_fragments,
                      const VectorMap& local, const BuilderParams& params) {
  MatchResult result;
  std::set<std::uint64_t> matched_parents;
  std::set<std::uint64_t> matched_locals;

  for (Category cat : kAllCategories) {
    std::vector<int> frag_idx;
    std::vector<int> local_idx;
    for (int i = 0; i < static_cast<int>(global_fragments.size()); ++i) {
      if (global_fragments[i].element.category == cat) frag_idx.push_back(i);
    }
    for (int j = 0; j < static_cast<int>(local.elements.size()); ++j) {
      if (local.elements[j].category == cat) local_idx.push_back(j);
    }
    if (frag_idx.empty() || local_idx.empty()) continue;

    const int rows = static_cast<int>(frag_idx.size());
    const int cols = static_cast<int>(local_idx.size());
    std::vector<double> cost(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        cost[i * cols + j] =
            ChamferDistance(global_fragments[frag_idx[i]].element.geometry,
                            local.elements[local_idx[j]].geometry);
      }
    }
    const std::vector<int> row_to_col = SolveAssignment(cost, rows, cols);

    // Threshold, then resolve parents matched through multiple fragments.
    struct Candidate {
      std::uint64_t parent_id;
      std::uint64_t local_id;
      double cost;
    };
    std::map<std::uint64_t, Candidate> best_per_parent;
    for (int i = 0; i < rows; ++i) {
      const int j = row_to_col[i];
      if (j < 0) continue;
      const double c = cost[i * cols + j];
      if (c > params.MatchDistance(cat)) continue;
      const std::uint64_t parent = global_fragments[frag_idx[i]].parent_id;
      const std::uint64_t local_id = local.elements[local_idx[j]].id;
      auto it = best_per_parent.find(parent);
      if (it == best_per_parent.end() || c < it->second.cost) {
        best_per_parent.insert_or_assign(parent, Candidate{parent, local_id, c});
      }
    }
    for (const auto& [parent, cand] : best_per_parent) {
      result.pairs.emplace_back(cand.parent_id, cand.local_id);
      matched_parents.insert(cand.parent_id);
      matched_locals.insert(cand.local_id);
    }
  }

  std::set<std::uint64_t> seen_parents;
  for (const ClipFragment& frag : global_fragments) {
    if (!seen_parents.insert(frag.parent_id).second) continue;
    if (!matched_parents.count(frag.parent_id)) {
      result.unmatched_global.push_back(frag.parent_id);
    }
  }
  for (const MapElement& e : local.elements) {
    if (!matched_locals.count(e.id)) {
      result.unmatched_local.push_back(e.id);
    }
  }
  return result;
}

namespace {

Polyline Reversed(const Polyline& p) {
  Polyline out = p;
  std::reverse(out.points.begin(), out.points.end());
  return out;
}

}  // namespace

MapElement InplaceReplace(const MapElement& parent, double /*fragment_offset*/,
                          const MapElement& local_elem,
                          const BuilderParams& params) {
  if (parent.category != local_elem.category) {
    throw std::invalid_argument("InplaceReplace: category mismatch");
  }

  // A closed local element is a complete observation; replace wholly.
  if (local_elem.geometry.closed) {
    MapElement out = local_elem;
    out.id = parent.id;
    return out;
  }

  Polyline local = local_elem.geometry;
  double s1 = ProjectPoint(local.points.front(), parent.geometry).arc_length;
  double s2 = ProjectPoint(local.points.back(), parent.geometry).arc_length;
  if (s1 > s2) {
    local = Reversed(local);
    std::swap(s1, s2);
  }

  const auto higher_score_unchanged = [&]() {
    MapElement out =
        local_elem.score > parent.score ? local_elem : parent;
    out.id = parent.id;
    return out;
  };
  if (std::abs(s2 - s1) < params.min_splice_span) {
    return higher_score_unchanged();
  }

  // Parent vertices with arc length strictly below s1 / above s2 survive.
  std::vector<Point2> pts;
  double arc = 0.0;
  const std::vector<Point2>& pv = parent.geometry.points;
  std::vector<double> vertex_arc(pv.size(), 0.0);
  for (std::size_t i = 1; i < pv.size(); ++i) {
    arc += Distance(pv[i - 1], pv[i]);
    vertex_arc[i] = arc;
  }
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (vertex_arc[i] < s1) pts.push_back(pv[i]);
  }
  pts.insert(pts.end(), local.points.begin(), local.points.end());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (vertex_arc[i] > s2) pts.push_back(pv[i]);
  }

  // Drop near-duplicate joints at the splice seams.
  std::vector<Point2> deduped;
  for (const Point2& p : pts) {
    if (deduped.empty() || Distance(deduped.back(), p) > kMinPointSeparation) {
      deduped.push_back(p);
    }
  }

  MapElement out;
  out.id = parent.id;
  out.category = parent.category;
  out.geometry.points = std::move(deduped);
  out.geometry.closed = parent.geometry.closed;
  out.score = local_elem.score;
  if (!IsValidPolyline(out.geometry)) {
    return higher_score_unchanged();
  }
  return out;
}

std::vector<MapElement> MapNms(const std::vector<MapElement>& elements,
                               const BuilderParams& params) {
  std::vector<char> keep(elements.size(), false);
  std::vector<double> length(elements.size(), 0.0);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    length[i] = PolylineLength(elements[i].geometry);
  }
  for (Category cat : kAllCategories) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(elements.size()); ++i) {
      if (elements[i].category == cat) idx.push_back(i);
    }
    // Score-descending; ties go to the more complete geometry.
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (elements[a].score != elements[b].score) {
        return elements[a].score > elements[b].score;
      }
      if (length[a] != length[b]) return length[a] > length[b];
      return elements[a].id < elements[b].id;
    });
    std::vector<int> kept;
    for (int i : idx) {
      bool suppressed = false;
      for (int k : kept) {
        const double iou = BufferedIou(elements[i].geometry,
                                       elements[k].geometry,
                                       params.NmsBuffer(cat));
        if (iou >= params.nms_iou_threshold) {
          suppressed = true;
          break;
        }
      }
      if (!suppressed) {
        kept.push_back(i);
        keep[i] = true;
      }
    }
  }
  std::vector<MapElement> out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (keep[i]) out.push_back(elements[i]);
  }
  return out;
}

GlobalMapState MergeStep(const GlobalMapState& state,
                         const VectorMap& local_pred, const Pose& pose,
                         const BuilderParams& params) {
  if (local_pred.frame != Frame::kEgo) {
    throw std::invalid_argument("MergeStep: local map must be in ego frame");
  }
  GlobalMapState next = state;
  if (local_pred.elements.empty()) return next;

  const std::vector<ClipFragment> fragments =
      ClipMap(next.map, pose, params.window);
  const MatchResult match = MatchMaps(fragments, local_pred, params);
  const VectorMap local_global = MapToGlobal(local_pred, pose);

  for (const auto& [parent_id, local_id] : match.pairs) {
    MapElement* parent = next.map.FindElement(parent_id);
    const MapElement* local_elem = local_global.FindElement(local_id);
    double offset = 0.0;
    for (const ClipFragment& frag : fragments) {
      if (frag.parent_id == parent_id) {
        offset = frag.arc_offset;
        break;
      }
    }
    *parent = InplaceReplace(*parent, offset, *local_elem, params);
  }
  for (std::uint64_t local_id : match.unmatched_local) {
    MapElement e = *local_global.FindElement(local_id);
    e.id = next.next_id++;
    next.map.elements.push_back(std::move(e));
  }

  // NMS over the categories touched by this local map.
  std::set<Category> touched;
  for (const MapElement& e : local_pred.elements) touched.insert(e.category);
  std::vector<MapElement> touched_elems;
  std::vector<MapElement> untouched_elems;
  for (MapElement& e : next.map.elements) {
    (touched.count(e.category) ? touched_elems : untouched_elems)
        .push_back(std::move(e));
  }
  std::vector<MapElement> survivors = MapNms(touched_elems, params);
  next.map.elements.clear();
  for (MapElement& e : untouched_elems) {
    next.map.elements.push_back(std::move(e));
  }
  for (MapElement& e : survivors) {
    next.map.elements.push_back(std::move(e));
  }
  return next;
}

}  // namespace gmap
