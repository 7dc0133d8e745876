#include "oagrasp/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace oagrasp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSliverArea = 1e-12;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// Clip buffer large enough for any quad-quad intersection (max 8 vertices).
struct ClipPoly {
  std::array<Vec2, 16> v;
  int n = 0;
};

// Intersection of segment (s, e) with the infinite line through (a, b).
// Callers only reach this when s and e straddle the line.
Vec2 line_intersect(Vec2 s, Vec2 e, Vec2 a, Vec2 b) {
  const Vec2 d1 = e - s;
  const Vec2 d2 = b - a;
  const double denom = cross(d1, d2);
  if (std::fabs(denom) < 1e-300) return s;
  const double t = cross(a - s, d2) / denom;
  return s + d1 * t;
}

// Sutherland-Hodgman: clip `subject` against the convex `clip` quad.
// Both polygons are wound with positive shoelace area, so interior points
// lie on the cross >= 0 side of each directed edge.
ClipPoly clip_quad(const Polygon4& subject, const Polygon4& clip) {
  ClipPoly out;
  out.n = 4;
  for (int i = 0; i < 4; ++i) out.v[i] = subject.v[i];

  for (int e = 0; e < 4 && out.n > 0; ++e) {
    const Vec2 a = clip.v[e];
    const Vec2 b = clip.v[(e + 1) % 4];
    const Vec2 edge = b - a;

    ClipPoly in = out;
    out.n = 0;
    for (int i = 0; i < in.n; ++i) {
      const Vec2 cur = in.v[i];
      const Vec2 prev = in.v[(i + in.n - 1) % in.n];
      const bool cur_in = cross(edge, cur - a) >= 0.0;
      const bool prev_in = cross(edge, prev - a) >= 0.0;
      if (cur_in) {
        if (!prev_in) out.v[out.n++] = line_intersect(prev, cur, a, b);
        out.v[out.n++] = cur;
      } else if (prev_in) {
        out.v[out.n++] = line_intersect(prev, cur, a, b);
      }
    }
  }
  return out;
}

}  // namespace

double canonical_angle(double deg) {
  double a = std::fmod(deg + 90.0, 180.0);
  if (a < 0.0) a += 180.0;
  return a - 90.0;
}

GraspRect make_grasp(double x, double y, double w, double h, double theta) {
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("grasp rectangle requires w > 0 and h > 0");
  }
  return GraspRect{x, y, w, h, canonical_angle(theta)};
}

double angle_diff(double a_deg, double b_deg) {
  const double d = std::fmod(std::fabs(a_deg - b_deg), 180.0);
  return std::min(d, 180.0 - d);
}

Polygon4 rect_to_polygon(const GraspRect& g) {
  const double c = std::cos(deg_to_rad(g.theta));
  const double s = std::sin(deg_to_rad(g.theta));
  const double hw = 0.5 * g.w;
  const double hh = 0.5 * g.h;
  // Winding (-,-), (+,-), (+,+), (-,+): positive shoelace area in image
  // coordinates.
  const std::array<Vec2, 4> local = {
      Vec2{-hw, -hh}, Vec2{hw, -hh}, Vec2{hw, hh}, Vec2{-hw, hh}};
  Polygon4 p;
  for (int i = 0; i < 4; ++i) {
    p.v[i] = Vec2{g.x + c * local[i].x - s * local[i].y,
                  g.y + s * local[i].x + c * local[i].y};
  }
  return p;
}

double polygon_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return std::fabs(twice) * 0.5;
}

double oriented_iou(const GraspRect& a, const GraspRect& b) {
  // Shift both rects so their midpoint sits at the origin; clipping then
  // runs on small coordinates regardless of where the pair lives.
  const double cx = 0.5 * (a.x + b.x);
  const double cy = 0.5 * (a.y + b.y);
  GraspRect as = a;
  GraspRect bs = b;
  as.x -= cx;
  as.y -= cy;
  bs.x -= cx;
  bs.y -= cy;

  const ClipPoly inter = clip_quad(rect_to_polygon(as), rect_to_polygon(bs));
  double inter_area =
      polygon_area(std::span<const Vec2>(inter.v.data(), inter.n));
  if (inter_area < kSliverArea) return 0.0;

  const double union_area = a.area() + b.area() - inter_area;
  if (union_area <= 0.0) return 0.0;
  return inter_area / union_area;
}

bool is_success(const GraspRect& pred, std::span<const GraspRect> gts,
                double angle_thr, double iou_thr) {
  for (const GraspRect& gt : gts) {
    if (angle_diff(pred.theta, gt.theta) <= angle_thr &&
        oriented_iou(pred, gt) >= iou_thr) {
      return true;
    }
  }
  return false;
}

}  // namespace oagrasp
