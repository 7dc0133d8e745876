#pragma once

#include <array>
#include <span>

namespace oagrasp {

// Image coordinate convention used everywhere: x grows rightward, y grows
// downward, angles are degrees applied counterclockwise in (x, y) math
// convention. Fixed once here; parsers, augmentation and anchors follow it.

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Oriented grasp rectangle: (x, y) center, w along the theta direction,
// h across it. theta is canonical in [-90, 90); the rectangle is invariant
// under a 180 degree turn.
struct GraspRect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;

  double area() const { return w * h; }
};

// Reduces an angle to [-90, 90) by modulo-180 arithmetic.
double canonical_angle(double deg);

// Canonicalizes theta and validates w > 0, h > 0. Throws std::invalid_argument.
GraspRect make_grasp(double x, double y, double w, double h, double theta);

// Distance between two orientations under 180 degree grasp symmetry,
// in [0, 90]: min(d, 180 - d) with d = |a - b| mod 180.
double angle_diff(double a_deg, double b_deg);

// Convex quad, positive shoelace area under the winding produced by
// rect_to_polygon.
struct Polygon4 {
  std::array<Vec2, 4> v;
};

// Corners of the (+-w/2, +-h/2) box rotated by theta about the center.
Polygon4 rect_to_polygon(const GraspRect& g);

double polygon_area(std::span<const Vec2> poly);

// Exact rotated-rectangle IoU: Sutherland-Hodgman clipping of one quad
// against the other, shoelace area, intersections below 1e-12 treated as
// zero. Symmetric in its arguments.
double oriented_iou(const GraspRect& a, const GraspRect& b);

// True iff some ground truth grasp is within angle_thr in orientation and
// has IoU >= iou_thr with the prediction. Empty gts yields false.
bool is_success(const GraspRect& pred, std::span<const GraspRect> gts,
                double angle_thr, double iou_thr);

}  // namespace oagrasp
