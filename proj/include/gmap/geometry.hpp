#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace gmap {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double Distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Ordered 2D point sequence. When `closed` is set the segment from the last
// point back to the first is part of the geometry; the first point is not
// repeated at the end.
struct Polyline {
  std::vector<Point2> points;
  bool closed = false;
};

// Minimum separation between consecutive vertices.
inline constexpr double kMinPointSeparation = 1e-9;

// Checks the Polyline invariants: at least 2 points, finite coordinates,
// no consecutive duplicates, positive total length.
bool IsValidPolyline(const Polyline& p);

struct Projection {
  double arc_length = 0.0;  // meters from the polyline start
  double distance = 0.0;    // meters, >= 0
};

// SE(2) pose: translation in meters, yaw in radians.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

enum class TransformDirection { kEgoToGlobal, kGlobalToEgo };

Point2 TransformPoint(const Point2& p, const Pose& pose,
                      TransformDirection direction);

double PolylineLength(const Polyline& p);

// Resamples to n points at equal arc-length spacing. Open polylines keep both
// endpoints (spacing L/(n-1)); closed polylines get n points at spacing L/n
// starting at the first vertex.
Polyline ResamplePolyline(const Polyline& p, int n);

double PointToSegmentDistance(const Point2& q, const Point2& a,
                              const Point2& b);

// Minimum distance from q to the continuous geometry of p.
double PointToPolylineDistance(const Point2& q, const Polyline& p);

// Closest point on p to q. Ties are broken toward the smallest arc length.
Projection ProjectPoint(const Point2& q, const Polyline& p);

// Number of resampled points per side in the Chamfer computation.
inline constexpr int kChamferSampleCount = 100;

// Symmetric Chamfer distance: 0.5 * (mean over resampled points of a of the
// distance to the continuous b + the same with a and b swapped).
double ChamferDistance(const Polyline& a, const Polyline& b);

Polyline TransformPolyline(const Polyline& p, const Pose& pose,
                           TransformDirection direction);

// Cell size of the grid backend used by BufferedIou.
inline constexpr double kBufferedIouResolution = 0.05;

// IoU of the two polylines buffered by a disc of radius r (round caps and
// joins), computed on a 0.05 m grid. Absolute error <= 0.01.
double BufferedIou(const Polyline& a, const Polyline& b, double r);

struct BoundingBox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  void Expand(double margin);
  bool Intersects(const BoundingBox& other) const;
};

BoundingBox ComputeBoundingBox(const Polyline& p);

}  // namespace gmap
