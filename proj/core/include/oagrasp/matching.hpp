#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oagrasp/anchor.hpp"
#include "oagrasp/geometry.hpp"
#include "oagrasp/rng.hpp"

namespace oagrasp {

// Per-anchor ground-truth assignment. Positives carry the index of the
// matched grasp and its encoded regression target.
struct LabelMap {
  int grid_h = 0;
  int grid_w = 0;
  int k = 0;
  std::vector<std::uint8_t> positive;  // [grid_h * grid_w * k]
  std::vector<int> gt_index;           // -1 for negatives
  std::vector<Delta> target;           // valid where positive

  int size() const { return grid_h * grid_w * k; }
  int num_positive() const;
};

// Indices into the LabelMap chosen for one loss evaluation.
struct SampleSet {
  std::vector<int> positives;
  std::vector<int> negatives;
  int total() const {
    return static_cast<int>(positives.size() + negatives.size());
  }
};

// Angle Matching: for each ground truth, the k anchors of the cell holding
// its center are candidates; a candidate is positive iff its orientation is
// strictly within angle_thr of the grasp. Ground truths centered outside the
// image are skipped. When two grasps claim one anchor, the closer orientation
// wins (earlier gt index on ties).
LabelMap angle_match(const AnchorGrid& grid, std::span<const GraspRect> gts,
                     double angle_thr);

// Jaccard Matching label for a decoded grasp: 1 iff some ground truth is
// within angle_thr in orientation and iou_thr in overlap. Shares its
// implementation with is_success.
int jaccard_label(const GraspRect& pred, std::span<const GraspRect> gts,
                  double angle_thr, double iou_thr);

// Samples P = min(p_max, #positives) positives and 3P negatives uniformly
// without replacement. A batch with no positives yields 4 * p_max negatives
// so the score loss stays defined.
SampleSet sample_pgp(const LabelMap& labels, int p_max, Rng& rng);

// Indices of the t largest scores, descending; ties broken by the lowest
// linear index. Returns everything when the map has fewer than t entries.
std::vector<int> select_top_t(std::span<const double> scores, int t);

}  // namespace oagrasp
