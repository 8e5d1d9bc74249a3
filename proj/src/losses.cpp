#include "scenepred/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scenepred {

nlohmann::json LossReport::to_json() const {
  return {{"image", image},   {"location", location}, {"pose", pose},  {"center", center},
          {"collapse", collapse}, {"lambda", lambda}, {"total", total}};
}

double image_loss(const Frame& pred, const Frame& truth) {
  if (!pred.same_shape(truth)) throw std::invalid_argument("image_loss: shape mismatch");
  if (pred.empty()) throw std::invalid_argument("image_loss: empty frame");
  double sum = 0.0;
  for (std::size_t p = 0; p < pred.size(); ++p)
    for (std::size_t c = 0; c < 3; ++c) {
      const double d = pred[p][c] - truth[p][c];
      sum += d * d;
    }
  return sum / (3.0 * static_cast<double>(pred.size()));
}

double location_loss(std::span<const Point3> predicted, std::span<const Point3> inferred,
                     const MatchMatrix& match) {
  if (predicted.size() != inferred.size() + 1 || match.cols() != predicted.size() ||
      match.rows() < inferred.size())
    throw std::invalid_argument("location_loss: inconsistent slot counts");
  double loss = 0.0;
  for (std::size_t k = 0; k < inferred.size(); ++k) {
    Point3 mix = Point3::Zero();
    for (std::size_t l = 0; l < predicted.size(); ++l) mix += match(k, l) * predicted[l];
    loss += (mix - inferred[k]).squaredNorm();
  }
  return loss;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("js_divergence: size mismatch");
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log(q[i] / m);
  }
  return std::max(js, 0.0);
}

double pose_loss(std::span<const PoseDistribution> predicted,
                 std::span<const PoseDistribution> inferred, const MatchMatrix& match) {
  if (predicted.size() != inferred.size() + 1 || match.cols() != predicted.size() ||
      match.rows() < inferred.size())
    throw std::invalid_argument("pose_loss: inconsistent slot counts");
  double loss = 0.0;
  for (std::size_t k = 0; k < inferred.size(); ++k) {
    std::vector<double> mix(inferred[k].bins(), 0.0);
    for (std::size_t l = 0; l < predicted.size(); ++l) {
      if (predicted[l].bins() != mix.size())
        throw std::invalid_argument("pose_loss: bin count mismatch");
      for (std::size_t m = 0; m < mix.size(); ++m) mix[m] += match(k, l) * predicted[l].probs[m];
    }
    loss += js_divergence(inferred[k].probs, mix);
  }
  return loss;
}

std::vector<double> center_terms(std::span<const Point3> locations, const SegMap& seg,
                                 const DepthMap& depth, const CameraIntrinsics& cam,
                                 double epsilon) {
  if (seg.num_objects() != locations.size())
    throw std::invalid_argument("center_loss: one location per object slot required");
  if (seg.width() != depth.width() || seg.height() != depth.height() || depth.width() != cam.width ||
      depth.height() != cam.height)
    throw std::invalid_argument("center_loss: raster shape mismatch");
  std::vector<Point3> points(depth.size());
  for (int row = 0; row < depth.height(); ++row)
    for (int col = 0; col < depth.width(); ++col)
      points[static_cast<std::size_t>(row) * static_cast<std::size_t>(depth.width()) +
             static_cast<std::size_t>(col)] =
          pixel_to_point(cam.col_to_i(col), cam.row_to_j(row), depth(col, row), cam);

  std::vector<double> terms(locations.size(), 0.0);
  for (std::size_t k = 0; k < locations.size(); ++k) {
    Point3 weighted = Point3::Zero();
    double mass = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double w = seg.slots[k][p];
      weighted += w * points[p];
      mass += w;
    }
    if (mass < epsilon) continue;
    terms[k] = (locations[k] - weighted / (mass + epsilon)).squaredNorm();
  }
  return terms;
}

double center_loss(std::span<const Point3> locations, const SegMap& seg, const DepthMap& depth,
                   const CameraIntrinsics& cam, double epsilon) {
  double sum = 0.0;
  for (double t : center_terms(locations, seg, depth, cam, epsilon)) sum += t;
  return sum;
}

double collapse_loss(std::span<const Point3> locations, std::span<const Point3> shuffled,
                     double delta) {
  if (locations.size() != shuffled.size())
    throw std::invalid_argument("collapse_loss: paired scenes differ in object count");
  if (!(delta > 0.0)) throw std::invalid_argument("collapse_loss: delta must be positive");
  double loss = 0.0;
  for (std::size_t k = 0; k < locations.size(); ++k)
    loss -= std::min(delta, (locations[k] - shuffled[k]).lpNorm<1>());
  return loss;
}

LossReport total_loss(double image, double location, double pose, double center, double collapse,
                      double lambda) {
  LossReport r{image, location, pose, center, collapse, lambda, 0.0};
  r.total = image + lambda * (location + pose + center + collapse);
  return r;
}

}  // namespace scenepred
