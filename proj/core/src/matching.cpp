#include "oagrasp/matching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oagrasp {

int LabelMap::num_positive() const {
  int n = 0;
  for (std::uint8_t p : positive) n += p;
  return n;
}

LabelMap angle_match(const AnchorGrid& grid, std::span<const GraspRect> gts,
                     double angle_thr) {
  if (!(angle_thr > 0.0)) {
    throw std::invalid_argument("angle_match: angle_thr must be positive");
  }
  LabelMap labels;
  labels.grid_h = grid.grid_h;
  labels.grid_w = grid.grid_w;
  labels.k = grid.k;
  labels.positive.assign(labels.size(), 0);
  labels.gt_index.assign(labels.size(), -1);
  labels.target.assign(labels.size(), Delta{});

  // Best angle distance seen per anchor, for deterministic overwrites when
  // several grasps share a cell.
  std::vector<double> best(labels.size(), 0.0);

  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    const GraspRect& gt = gts[gi];
    const int j = static_cast<int>(std::floor(gt.x / grid.stride));
    const int i = static_cast<int>(std::floor(gt.y / grid.stride));
    if (i < 0 || i >= grid.grid_h || j < 0 || j >= grid.grid_w) continue;

    for (int a = 0; a < grid.k; ++a) {
      const int idx = grid.linear_index(i, j, a);
      const Anchor& anchor = grid.anchors[idx];
      const double d = angle_diff(anchor.theta, gt.theta);
      if (d >= angle_thr) continue;
      if (labels.positive[idx] && best[idx] <= d) continue;
      labels.positive[idx] = 1;
      labels.gt_index[idx] = static_cast<int>(gi);
      labels.target[idx] = encode(gt, anchor, grid.k);
      best[idx] = d;
    }
  }
  return labels;
}

int jaccard_label(const GraspRect& pred, std::span<const GraspRect> gts,
                  double angle_thr, double iou_thr) {
  return is_success(pred, gts, angle_thr, iou_thr) ? 1 : 0;
}

SampleSet sample_pgp(const LabelMap& labels, int p_max, Rng& rng) {
  if (p_max < 1) throw std::invalid_argument("sample_pgp: p_max must be >= 1");

  std::vector<int> pos_ids;
  std::vector<int> neg_ids;
  pos_ids.reserve(64);
  neg_ids.reserve(labels.positive.size());
  for (int i = 0; i < labels.size(); ++i) {
    (labels.positive[i] ? pos_ids : neg_ids).push_back(i);
  }

  SampleSet out;
  const int p = std::min<int>(p_max, static_cast<int>(pos_ids.size()));
  const int want_neg = p > 0 ? 3 * p : 4 * p_max;

  for (int pick : rng.sample_without_replacement(
           static_cast<int>(pos_ids.size()), p)) {
    out.positives.push_back(pos_ids[pick]);
  }
  for (int pick : rng.sample_without_replacement(
           static_cast<int>(neg_ids.size()), want_neg)) {
    out.negatives.push_back(neg_ids[pick]);
  }
  return out;
}

std::vector<int> select_top_t(std::span<const double> scores, int t) {
  if (t < 1) throw std::invalid_argument("select_top_t: t must be >= 1");
  std::vector<int> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  if (static_cast<int>(order.size()) > t) order.resize(t);
  return order;
}

}  // namespace oagrasp
