#include "scenepred/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace scenepred {
namespace {

double choose2(double n) { return 0.5 * n * (n - 1.0); }

std::vector<int> present_labels(const LabelMap& labels) {
  std::vector<int> out(labels.data());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double ari_fg(const LabelMap& pred, const LabelMap& truth) {
  if (!pred.same_shape(truth)) throw std::invalid_argument("ari_fg: shape mismatch");
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> row_sums;
  std::map<int, double> col_sums;
  double n = 0.0;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    if (truth[p] == 0) continue;
    table[{truth[p], pred[p]}] += 1.0;
    row_sums[truth[p]] += 1.0;
    col_sums[pred[p]] += 1.0;
    n += 1.0;
  }
  if (n < 2.0) throw std::invalid_argument("ari_fg: fewer than two foreground pixels");

  double index = 0.0;
  for (const auto& [cell, count] : table) index += choose2(count);
  double sum_rows = 0.0;
  for (const auto& [label, count] : row_sums) sum_rows += choose2(count);
  double sum_cols = 0.0;
  for (const auto& [label, count] : col_sums) sum_cols += choose2(count);
  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  // Both partitions trivial (single cluster each, or all singletons).
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

SegEvalResult matched_iou(const LabelMap& pred, const LabelMap& truth, bool include_background) {
  if (!pred.same_shape(truth)) throw std::invalid_argument("matched_iou: shape mismatch");
  std::vector<int> entities = present_labels(truth);
  if (!include_background) std::erase(entities, 0);
  const std::vector<int> classes = present_labels(pred);

  std::map<std::pair<int, int>, double> inter;
  std::map<int, double> truth_area;
  std::map<int, double> pred_area;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    inter[{truth[p], pred[p]}] += 1.0;
    truth_area[truth[p]] += 1.0;
    pred_area[pred[p]] += 1.0;
  }

  struct Candidate {
    double iou;
    int entity;
    int cls;
  };
  std::vector<Candidate> candidates;
  for (int e : entities)
    for (int c : classes) {
      const auto it = inter.find({e, c});
      const double i = it == inter.end() ? 0.0 : it->second;
      candidates.push_back({i / (truth_area[e] + pred_area[c] - i), e, c});
    }
  // Highest IoU first; ties broken by label order for reproducibility.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });

  SegEvalResult result;
  std::map<int, EntityMatch> matched;
  std::vector<int> used_classes;
  for (const auto& c : candidates) {
    if (matched.contains(c.entity)) continue;
    if (std::find(used_classes.begin(), used_classes.end(), c.cls) != used_classes.end()) continue;
    matched[c.entity] = {c.entity, c.cls, c.iou};
    used_classes.push_back(c.cls);
  }
  double sum = 0.0;
  for (int e : entities) {
    const auto it = matched.find(e);
    if (it == matched.end()) {
      result.per_entity.push_back({e, -1, 0.0});
      continue;
    }
    result.per_entity.push_back(it->second);
    sum += it->second.iou;
  }
  result.mean_iou = matched.empty() ? 0.0 : sum / static_cast<double>(matched.size());
  return result;
}

SegEvalResult evaluate_segmentation(const LabelMap& pred, const LabelMap& truth,
                                    bool include_background) {
  SegEvalResult result = matched_iou(pred, truth, include_background);
  try {
    result.ari_fg = ari_fg(pred, truth);
    result.ari_defined = true;
  } catch (const std::invalid_argument&) {
    if (!pred.same_shape(truth)) throw;
    result.ari_defined = false;
  }
  return result;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two pairs");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw std::invalid_argument("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Polar polar_decompose(const Point3& x) { return {std::atan2(x.x(), x.y()), x.norm()}; }

}  // namespace scenepred
