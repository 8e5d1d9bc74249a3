#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "scenepred/camgeo.hpp"
#include "scenepred/kinematics.hpp"
#include "scenepred/objmatch.hpp"
#include "scenepred/raster.hpp"

namespace scenepred {

struct LossReport {
  double image = 0.0;
  double location = 0.0;
  double pose = 0.0;
  double center = 0.0;
  double collapse = 0.0;
  double lambda = 1.0;
  double total = 0.0;

  nlohmann::json to_json() const;
};

/// Mean squared difference over all pixels and channels.
double image_loss(const Frame& pred, const Frame& truth);

/// sum_k | sum_l r_kl x'_l - x_k |^2 over foreground rows k. `predicted` has
/// K+1 entries (background last); `inferred` has K.
double location_loss(std::span<const Point3> predicted, std::span<const Point3> inferred,
                     const MatchMatrix& match);

/// Jensen-Shannon divergence (natural log) between p and q.
double js_divergence(std::span<const double> p, std::span<const double> q);

/// sum_k JS(inferred_k || sum_l r_kl predicted_l).
double pose_loss(std::span<const PoseDistribution> predicted,
                 std::span<const PoseDistribution> inferred, const MatchMatrix& match);

/// Per-object squared distance between the inferred center and the
/// membership-weighted mean of the back-projected pixels. Objects whose mask
/// mass is below `epsilon` contribute 0.
std::vector<double> center_terms(std::span<const Point3> locations, const SegMap& seg,
                                 const DepthMap& depth, const CameraIntrinsics& cam,
                                 double epsilon = 1e-6);
double center_loss(std::span<const Point3> locations, const SegMap& seg, const DepthMap& depth,
                   const CameraIntrinsics& cam, double epsilon = 1e-6);

/// sum_k -min(delta, |x_k - x_shuffled_k|_1).
double collapse_loss(std::span<const Point3> locations, std::span<const Point3> shuffled,
                     double delta);

/// image + lambda * (location + pose + center + collapse).
LossReport total_loss(double image, double location, double pose, double center, double collapse,
                      double lambda);

}  // namespace scenepred
