#pragma once

#include <span>
#include <utility>
#include <vector>

#include "oagrasp/geometry.hpp"

namespace oagrasp {

// Oriented reference grasp attached to a feature-map cell.
struct Anchor {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;  // degrees, [-90, 90)
};

// Dimensionless deformation relating a grasp to an anchor. dw and dh are
// log-space, so any real value is legal.
struct Delta {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;
  double dtheta = 0.0;
};

// Dense [grid_h][grid_w][k] layout; linear index (i * grid_w + j) * k + a.
struct AnchorGrid {
  int grid_h = 0;
  int grid_w = 0;
  int stride = 0;
  int k = 0;
  std::vector<Anchor> anchors;

  int linear_index(int i, int j, int a) const {
    return (i * grid_w + j) * k + a;
  }
  const Anchor& at(int i, int j, int a) const {
    return anchors[linear_index(i, j, a)];
  }
  int size() const { return grid_h * grid_w * k; }
};

// Cell (i, j) anchors sit at ((j + 0.5) * stride, (i + 0.5) * stride); the k
// orientations start at -90 and are spaced 180/k degrees apart. image_size
// must be divisible by stride.
AnchorGrid build_anchor_grid(int image_size, int stride, double anchor_w,
                             double anchor_h, int k);

// Applies the deformation to the anchor:
//   x = dx * aw + ax, y = dy * ah + ay,
//   w = exp(dw) * aw, h = exp(dh) * ah,
//   theta = dtheta * (180 / k) + atheta, canonicalized.
GraspRect decode(const Delta& d, const Anchor& a, int k);

// Exact inverse of decode; the angle residual is wrapped to [-90, 90) so the
// regression target has the smallest magnitude.
Delta encode(const GraspRect& g, const Anchor& a, int k);

// Arithmetic mean of ground-truth widths and heights; throws on empty input.
std::pair<double, double> mean_anchor(std::span<const GraspRect> gts);

}  // namespace oagrasp
