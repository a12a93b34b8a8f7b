#include "gmap/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace gmap {

namespace {

// Iterates the segments of a polyline, including the closing segment for
// closed polylines.
template <typename Fn>
void ForEachSegment(const Polyline& p, Fn&& fn) {
  const std::size_t n = p.points.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    fn(p.points[i], p.points[i + 1]);
  }
  if (p.closed && n >= 2) {
    fn(p.points[n - 1], p.points[0]);
  }
}

}  // namespace

bool IsValidPolyline(const Polyline& p) {
  if (p.points.size() < 2) return false;
  for (const Point2& pt : p.points) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) return false;
  }
  const std::size_t n = p.points.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (Distance(p.points[i], p.points[i + 1]) <= kMinPointSeparation)
      return false;
  }
  if (p.closed && Distance(p.points[n - 1], p.points[0]) <= kMinPointSeparation)
    return false;
  return PolylineLength(p) > 0.0;
}

Point2 TransformPoint(const Point2& p, const Pose& pose,
                      TransformDirection direction) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  if (direction == TransformDirection::kEgoToGlobal) {
    return {c * p.x - s * p.y + pose.x, s * p.x + c * p.y + pose.y};
  }
  const double dx = p.x - pose.x;
  const double dy = p.y - pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

double PolylineLength(const Polyline& p) {
  double total = 0.0;
  ForEachSegment(p, [&](const Point2& a, const Point2& b) {
    total += Distance(a, b);
  });
  return total;
}

Polyline ResamplePolyline(const Polyline& p, int n) {
  if (n < 2) throw std::invalid_argument("ResamplePolyline: n must be >= 2");
  const double total = PolylineLength(p);
  const double spacing = p.closed ? total / n : total / (n - 1);

  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));

  // Collect segments with cumulative start arc lengths.
  std::vector<Point2> starts, ends;
  std::vector<double> seg_start;
  double acc = 0.0;
  ForEachSegment(p, [&](const Point2& a, const Point2& b) {
    starts.push_back(a);
    ends.push_back(b);
    seg_start.push_back(acc);
    acc += Distance(a, b);
  });

  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    double target = spacing * i;
    if (!p.closed && i == n - 1) {
      out.push_back(p.points.back());
      continue;
    }
    target = std::min(target, total);
    while (seg + 1 < starts.size() &&
           seg_start[seg + 1] <= target + 1e-12) {
      ++seg;
    }
    const double seg_len = Distance(starts[seg], ends[seg]);
    const double t =
        seg_len > 0.0 ? (target - seg_start[seg]) / seg_len : 0.0;
    out.push_back({starts[seg].x + t * (ends[seg].x - starts[seg].x),
                   starts[seg].y + t * (ends[seg].y - starts[seg].y)});
  }

  Polyline result;
  result.points = std::move(out);
  result.closed = false;
  return result;
}

double PointToSegmentDistance(const Point2& q, const Point2& a,
                              const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 <= 0.0) return Distance(q, a);
  double t = ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(q.x - (a.x + t * dx), q.y - (a.y + t * dy));
}

double PointToPolylineDistance(const Point2& q, const Polyline& p) {
  double best = std::numeric_limits<double>::infinity();
  ForEachSegment(p, [&](const Point2& a, const Point2& b) {
    best = std::min(best, PointToSegmentDistance(q, a, b));
  });
  return best;
}

Projection ProjectPoint(const Point2& q, const Polyline& p) {
  Projection best{0.0, std::numeric_limits<double>::infinity()};
  double acc = 0.0;
  ForEachSegment(p, [&](const Point2& a, const Point2& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    double t = 0.0;
    if (len > 0.0) {
      t = ((q.x - a.x) * dx + (q.y - a.y) * dy) / (len * len);
      t = std::clamp(t, 0.0, 1.0);
    }
    const double d = std::hypot(q.x - (a.x + t * dx), q.y - (a.y + t * dy));
    if (d < best.distance) {
      best.distance = d;
      best.arc_length = acc + t * len;
    }
    acc += len;
  });
  return best;
}

double ChamferDistance(const Polyline& a, const Polyline& b) {
  const Polyline sa = ResamplePolyline(a, kChamferSampleCount);
  const Polyline sb = ResamplePolyline(b, kChamferSampleCount);
  double sum_ab = 0.0;
  for (const Point2& q : sa.points) sum_ab += PointToPolylineDistance(q, b);
  double sum_ba = 0.0;
  for (const Point2& q : sb.points) sum_ba += PointToPolylineDistance(q, a);
  return 0.5 * (sum_ab / sa.points.size() + sum_ba / sb.points.size());
}

Polyline TransformPolyline(const Polyline& p, const Pose& pose,
                           TransformDirection direction) {
  Polyline out;
  out.closed = p.closed;
  out.points.reserve(p.points.size());
  for (const Point2& pt : p.points) {
    out.points.push_back(TransformPoint(pt, pose, direction));
  }
  return out;
}

void BoundingBox::Expand(double margin) {
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;
}

bool BoundingBox::Intersects(const BoundingBox& other) const {
  return min_x <= other.max_x && other.min_x <= max_x &&
         min_y <= other.max_y && other.min_y <= max_y;
}

BoundingBox ComputeBoundingBox(const Polyline& p) {
  BoundingBox box{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  for (const Point2& pt : p.points) {
    box.min_x = std::min(box.min_x, pt.x);
    box.min_y = std::min(box.min_y, pt.y);
    box.max_x = std::max(box.max_x, pt.x);
    box.max_y = std::max(box.max_y, pt.y);
  }
  return box;
}

namespace {

// Bit grid over a rectangular window, used to approximate buffered areas.
class BitGrid {
 public:
  BitGrid(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_((rows * cols + 63) / 64, 0) {}

  void Set(std::size_t r, std::size_t c) {
    const std::size_t idx = r * cols_ + c;
    words_[idx >> 6] |= (std::uint64_t{1} << (idx & 63));
  }

  static std::pair<std::size_t, std::size_t> IntersectionUnionCount(
      const BitGrid& a, const BitGrid& b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      inter += static_cast<std::size_t>(
          std::popcount(a.words_[i] & b.words_[i]));
      uni += static_cast<std::size_t>(
          std::popcount(a.words_[i] | b.words_[i]));
    }
    return {inter, uni};
  }

 private:
  std::size_t rows_, cols_;
  std::vector<std::uint64_t> words_;
};

// Marks every cell whose center lies within distance r of the polyline.
void StampBuffer(const Polyline& p, double r, double origin_x, double origin_y,
                 double res, std::size_t rows, std::size_t cols,
                 BitGrid* grid) {
  ForEachSegment(p, [&](const Point2& a, const Point2& b) {
    const double min_x = std::min(a.x, b.x) - r;
    const double max_x = std::max(a.x, b.x) + r;
    const double min_y = std::min(a.y, b.y) - r;
    const double max_y = std::max(a.y, b.y) + r;
    const auto clamp_idx = [](double v, std::size_t hi) {
      if (v < 0.0) return std::size_t{0};
      const std::size_t i = static_cast<std::size_t>(v);
      return std::min(i, hi - 1);
    };
    const std::size_t c0 = clamp_idx((min_x - origin_x) / res, cols);
    const std::size_t c1 = clamp_idx((max_x - origin_x) / res, cols);
    const std::size_t r0 = clamp_idx((min_y - origin_y) / res, rows);
    const std::size_t r1 = clamp_idx((max_y - origin_y) / res, rows);
    for (std::size_t row = r0; row <= r1; ++row) {
      const double cy = origin_y + (row + 0.5) * res;
      for (std::size_t col = c0; col <= c1; ++col) {
        const double cx = origin_x + (col + 0.5) * res;
        if (PointToSegmentDistance({cx, cy}, a, b) <= r) grid->Set(row, col);
      }
    }
  });
}

}  // namespace

double BufferedIou(const Polyline& a, const Polyline& b, double r) {
  if (r <= 0.0) throw std::invalid_argument("BufferedIou: r must be > 0");

  BoundingBox box_a = ComputeBoundingBox(a);
  BoundingBox box_b = ComputeBoundingBox(b);
  box_a.Expand(r);
  box_b.Expand(r);
  if (!box_a.Intersects(box_b)) return 0.0;

  const double res = kBufferedIouResolution;
  const double origin_x = std::min(box_a.min_x, box_b.min_x) - res;
  const double origin_y = std::min(box_a.min_y, box_b.min_y) - res;
  const double max_x = std::max(box_a.max_x, box_b.max_x) + res;
  const double max_y = std::max(box_a.max_y, box_b.max_y) + res;
  const std::size_t cols =
      static_cast<std::size_t>(std::ceil((max_x - origin_x) / res)) + 1;
  const std::size_t rows =
      static_cast<std::size_t>(std::ceil((max_y - origin_y) / res)) + 1;

  BitGrid grid_a(rows, cols);
  BitGrid grid_b(rows, cols);
  StampBuffer(a, r, origin_x, origin_y, res, rows, cols, &grid_a);
  StampBuffer(b, r, origin_x, origin_y, res, rows, cols, &grid_b);

  const auto [inter, uni] = BitGrid::IntersectionUnionCount(grid_a, grid_b);
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace gmap
