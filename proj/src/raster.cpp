#include "scenepred/raster.hpp"

#include <cmath>
#include <string>

namespace scenepred {

SegMap seg_from_labels(const LabelMap& labels, std::size_t num_objects) {
  SegMap seg;
  seg.slots.assign(num_objects + 1, Grid<double>(labels.width(), labels.height(), 0.0));
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const int label = labels[p];
    if (label < 0 || static_cast<std::size_t>(label) > num_objects)
      throw std::invalid_argument("label " + std::to_string(label) + " out of range");
    const std::size_t slot = label == 0 ? num_objects : static_cast<std::size_t>(label - 1);
    seg.slots[slot][p] = 1.0;
  }
  return seg;
}

LabelMap labels_from_seg(const SegMap& seg) {
  if (seg.slots.empty()) return {};
  const std::size_t k_bg = seg.num_objects();
  LabelMap labels(seg.width(), seg.height(), 0);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < seg.num_slots(); ++k)
      if (seg.slots[k][p] > seg.slots[best][p]) best = k;
    labels[p] = best == k_bg ? 0 : static_cast<int>(best + 1);
  }
  return labels;
}

void check_seg_simplex(const SegMap& seg, double tolerance) {
  if (seg.slots.empty()) throw std::invalid_argument("segmentation has no slots");
  for (const auto& slot : seg.slots)
    if (!slot.same_shape(seg.slots.front()))
      throw std::invalid_argument("segmentation slots differ in shape");
  const std::size_t n = seg.slots.front().size();
  for (std::size_t p = 0; p < n; ++p) {
    double sum = 0.0;
    for (const auto& slot : seg.slots) {
      const double v = slot[p];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("segmentation entry negative or non-finite at pixel " +
                                    std::to_string(p));
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance)
      throw std::invalid_argument("segmentation pixel " + std::to_string(p) +
                                  " sums to " + std::to_string(sum));
  }
}

}  // namespace scenepred
