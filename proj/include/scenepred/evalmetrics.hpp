#pragma once

#include <span>
#include <utility>
#include <vector>

#include "scenepred/camgeo.hpp"
#include "scenepred/raster.hpp"

namespace scenepred {

/// Adjusted Rand index over pixels whose true label is foreground (non-zero).
/// Throws std::invalid_argument on shape mismatch or fewer than two
/// foreground pixels.
double ari_fg(const LabelMap& pred, const LabelMap& truth);

struct EntityMatch {
  int truth_label = 0;
  int pred_label = -1;  // -1: left unmatched
  double iou = 0.0;
};

struct SegEvalResult {
  double ari_fg = 0.0;
  bool ari_defined = false;
  double mean_iou = 0.0;
  std::vector<EntityMatch> per_entity;
};

/// Greedy one-to-one matching: repeatedly takes the (truth entity, predicted
/// label) pair with the highest IoU among unmatched ones, over the true
/// entities present (background included unless `include_background` is
/// false). The mean runs over matched entities; entities left without a
/// partner (more entities than predicted labels) are listed with pred_label -1.
SegEvalResult matched_iou(const LabelMap& pred, const LabelMap& truth,
                          bool include_background = true);

/// Both metrics; ari_defined is false when the frame has under two
/// foreground pixels.
SegEvalResult evaluate_segmentation(const LabelMap& pred, const LabelMap& truth,
                                    bool include_background = true);

/// Sample Pearson correlation. Throws std::invalid_argument for fewer than two
/// pairs or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct Polar {
  double viewing_angle = 0.0;  // from the optical axis, positive to the right
  double distance = 0.0;
};

Polar polar_decompose(const Point3& x);

}  // namespace scenepred
