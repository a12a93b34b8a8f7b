#include "gmap/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gmap {

namespace {
constexpr double kEps = 1e-12;
}

std::string CategoryName(Category c) {
  switch (c) {
    case Category::kRoadBoundary: return "road_boundary";
    case Category::kLaneDivider: return "lane_divider";
    case Category::kPedCrossing: return "ped_crossing";
  }
  return "unknown";
}

std::optional<Category> CategoryFromName(const std::string& name) {
  if (name == "road_boundary") return Category::kRoadBoundary;
  if (name == "lane_divider") return Category::kLaneDivider;
  if (name == "ped_crossing") return Category::kPedCrossing;
  return std::nullopt;
}

const MapElement* VectorMap::FindElement(std::uint64_t id) const {
  for (const MapElement& e : elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

MapElement* VectorMap::FindElement(std::uint64_t id) {
  for (MapElement& e : elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::optional<std::string> ValidateMap(const VectorMap& m) {
  std::set<std::uint64_t> ids;
  for (const MapElement& e : m.elements) {
    if (!ids.insert(e.id).second) {
      return "duplicate element id " + std::to_string(e.id);
    }
    if (e.score < 0.0 || e.score > 1.0 || !std::isfinite(e.score)) {
      return "element " + std::to_string(e.id) + ": score out of [0,1]";
    }
    if (!IsValidPolyline(e.geometry)) {
      return "element " + std::to_string(e.id) + ": invalid polyline";
    }
  }
  return std::nullopt;
}

double NormalizeYaw(double yaw) {
  yaw = std::fmod(yaw, 2.0 * M_PI);
  if (yaw > M_PI) yaw -= 2.0 * M_PI;
  if (yaw <= -M_PI) yaw += 2.0 * M_PI;
  return yaw;
}

namespace {

// Liang-Barsky clip of segment a->b against |x| <= hx, |y| <= hy.
// Returns false if the segment misses the window, otherwise the inside
// parameter interval [t0, t1].
bool ClipSegment(const Point2& a, const Point2& b, double hx, double hy,
                 double* t0, double* t1) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  double lo = 0.0, hi = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x + hx, hx - a.x, a.y + hy, hy - a.y};
  for (int i = 0; i < 4; ++i) {
    if (std::abs(p[i]) < kEps) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      lo = std::max(lo, t);
    } else {
      hi = std::min(hi, t);
    }
  }
  if (lo > hi) return false;
  *t0 = lo;
  *t1 = hi;
  return true;
}

struct Piece {
  std::vector<Point2> points;
  double arc_offset = 0.0;
  bool open_at_end = false;  // polyline was still inside after its last segment
};

// Removes consecutive near-duplicate points introduced by boundary clipping.
void Dedupe(std::vector<Point2>* pts) {
  std::vector<Point2> out;
  for (const Point2& p : *pts) {
    if (out.empty() || Distance(out.back(), p) > kMinPointSeparation) {
      out.push_back(p);
    }
  }
  *pts = std::move(out);
}

}  // namespace

std::vector<ClipFragment> ClipMap(const VectorMap& m, const Pose& pose,
                                  const ClipWindow& window) {
  if (m.frame != Frame::kGlobal) {
    throw std::invalid_argument("ClipMap: map must be in the global frame");
  }
  const double hx = window.length / 2.0;
  const double hy = window.width / 2.0;

  std::vector<ClipFragment> fragments;
  for (const MapElement& elem : m.elements) {
    const Polyline ego =
        TransformPolyline(elem.geometry, pose, TransformDirection::kGlobalToEgo);

    // Segment list, including the closing segment for closed polylines.
    std::vector<std::pair<Point2, Point2>> segments;
    const std::size_t n = ego.points.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      segments.emplace_back(ego.points[i], ego.points[i + 1]);
    }
    if (ego.closed && n >= 2) {
      segments.emplace_back(ego.points[n - 1], ego.points[0]);
    }

    std::vector<Piece> pieces;
    Piece current;
    bool in_piece = false;
    double arc = 0.0;
    for (const auto& [a, b] : segments) {
      const double seg_len = Distance(a, b);
      double t0 = 0.0, t1 = 1.0;
      if (!ClipSegment(a, b, hx, hy, &t0, &t1)) {
        if (in_piece) {
          current.open_at_end = false;
          pieces.push_back(std::move(current));
          current = {};
          in_piece = false;
        }
        arc += seg_len;
        continue;
      }
      const auto at = [&](double t) -> Point2 {
        return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
      };
      if (!in_piece) {
        current = {};
        current.arc_offset = arc + t0 * seg_len;
        current.points.push_back(at(t0));
        in_piece = true;
      } else if (t0 > kEps) {
        // Left the window at the previous vertex and re-entered mid-segment.
        current.open_at_end = false;
        pieces.push_back(std::move(current));
        current = {};
        current.arc_offset = arc + t0 * seg_len;
        current.points.push_back(at(t0));
      }
      current.points.push_back(at(t1));
      if (t1 < 1.0 - kEps) {
        current.open_at_end = false;
        pieces.push_back(std::move(current));
        current = {};
        in_piece = false;
      }
      arc += seg_len;
    }
    if (in_piece) {
      current.open_at_end = true;
      pieces.push_back(std::move(current));
    }

    bool fully_inside_closed = false;
    if (ego.closed && pieces.size() == 1 && pieces[0].open_at_end &&
        pieces[0].arc_offset < kEps) {
      // Entire closed polyline inside the window; drop the duplicated
      // wrap-around vertex and keep it closed.
      fully_inside_closed = true;
      pieces[0].points.pop_back();
    } else if (ego.closed && pieces.size() >= 2 && pieces.back().open_at_end &&
               pieces.front().arc_offset < kEps) {
      // The piece crossing the start vertex is split in two; merge them.
      Piece merged = std::move(pieces.back());
      pieces.pop_back();
      const Piece& head = pieces.front();
      merged.points.insert(merged.points.end(), head.points.begin() + 1,
                           head.points.end());
      pieces.erase(pieces.begin());
      pieces.push_back(std::move(merged));
    }

    for (Piece& piece : pieces) {
      Dedupe(&piece.points);
      Polyline geom;
      geom.points = std::move(piece.points);
      geom.closed = fully_inside_closed;
      if (!IsValidPolyline(geom)) continue;
      if (PolylineLength(geom) < kMinFragmentLength) continue;
      ClipFragment frag;
      frag.element.id = elem.id;
      frag.element.category = elem.category;
      frag.element.geometry = std::move(geom);
      frag.element.score = elem.score;
      frag.parent_id = elem.id;
      frag.arc_offset = piece.arc_offset;
      fragments.push_back(std::move(frag));
    }
  }
  return fragments;
}

VectorMap FragmentsToLocalMap(const std::vector<ClipFragment>& fragments) {
  VectorMap out;
  out.frame = Frame::kEgo;
  std::uint64_t next_id = 0;
  for (const ClipFragment& frag : fragments) {
    MapElement e = frag.element;
    e.id = next_id++;
    out.elements.push_back(std::move(e));
  }
  return out;
}

VectorMap MapToGlobal(const VectorMap& m, const Pose& pose) {
  if (m.frame != Frame::kEgo) {
    throw std::invalid_argument("MapToGlobal: map must be in the ego frame");
  }
  VectorMap out;
  out.frame = Frame::kGlobal;
  out.elements.reserve(m.elements.size());
  for (const MapElement& e : m.elements) {
    MapElement g = e;
    g.geometry =
        TransformPolyline(e.geometry, pose, TransformDirection::kEgoToGlobal);
    out.elements.push_back(std::move(g));
  }
  return out;
}

VectorMap MapToEgo(const VectorMap& m, const Pose& pose) {
  if (m.frame != Frame::kGlobal) {
    throw std::invalid_argument("MapToEgo: map must be in the global frame");
  }
  VectorMap out;
  out.frame = Frame::kEgo;
  out.elements.reserve(m.elements.size());
  for (const MapElement& e : m.elements) {
    MapElement g = e;
    g.geometry =
        TransformPolyline(e.geometry, pose, TransformDirection::kGlobalToEgo);
    out.elements.push_back(std::move(g));
  }
  return out;
}

}  // namespace gmap
