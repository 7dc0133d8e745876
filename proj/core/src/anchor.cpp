#include "oagrasp/anchor.hpp"

#include <cmath>
#include <stdexcept>

namespace oagrasp {

AnchorGrid build_anchor_grid(int image_size, int stride, double anchor_w,
                             double anchor_h, int k) {
  if (image_size <= 0 || stride <= 0 || image_size % stride != 0) {
    throw std::invalid_argument(
        "build_anchor_grid: image_size must be a positive multiple of stride");
  }
  if (k < 1) throw std::invalid_argument("build_anchor_grid: k must be >= 1");
  if (!(anchor_w > 0.0) || !(anchor_h > 0.0)) {
    throw std::invalid_argument("build_anchor_grid: anchor size must be positive");
  }

  AnchorGrid grid;
  grid.grid_h = image_size / stride;
  grid.grid_w = image_size / stride;
  grid.stride = stride;
  grid.k = k;
  grid.anchors.resize(static_cast<std::size_t>(grid.size()));

  const double spacing = 180.0 / k;
  for (int i = 0; i < grid.grid_h; ++i) {
    for (int j = 0; j < grid.grid_w; ++j) {
      for (int a = 0; a < k; ++a) {
        Anchor& an = grid.anchors[grid.linear_index(i, j, a)];
        an.x = (j + 0.5) * stride;
        an.y = (i + 0.5) * stride;
        an.w = anchor_w;
        an.h = anchor_h;
        an.theta = -90.0 + a * spacing;
      }
    }
  }
  return grid;
}

GraspRect decode(const Delta& d, const Anchor& a, int k) {
  GraspRect g;
  g.x = d.dx * a.w + a.x;
  g.y = d.dy * a.h + a.y;
  g.w = std::exp(d.dw) * a.w;
  g.h = std::exp(d.dh) * a.h;
  g.theta = canonical_angle(d.dtheta * (180.0 / k) + a.theta);
  return g;
}

Delta encode(const GraspRect& g, const Anchor& a, int k) {
  Delta d;
  d.dx = (g.x - a.x) / a.w;
  d.dy = (g.y - a.y) / a.h;
  d.dw = std::log(g.w / a.w);
  d.dh = std::log(g.h / a.h);
  d.dtheta = canonical_angle(g.theta - a.theta) * (k / 180.0);
  return d;
}

std::pair<double, double> mean_anchor(std::span<const GraspRect> gts) {
  if (gts.empty()) {
    throw std::invalid_argument("mean_anchor: no ground-truth grasps");
  }
  double sw = 0.0;
  double sh = 0.0;
  for (const GraspRect& g : gts) {
    sw += g.w;
    sh += g.h;
  }
  const double n = static_cast<double>(gts.size());
  return {sw / n, sh / n};
}

}  // namespace oagrasp
