#pragma once

#include <span>
#include <vector>

#include "scenepred/camgeo.hpp"
#include "scenepred/objmatch.hpp"

namespace scenepred {

/// Probability over b equally spaced yaw bins. Storage index m holds the bin
/// centered at 2*pi*(m+1)/b, so the last bin sits at 2*pi (== 0).
struct PoseDistribution {
  std::vector<double> probs;

  std::size_t bins() const { return probs.size(); }
  static double bin_center(std::size_t index, std::size_t bins);
  /// One-hot at the bin whose center is nearest to `angle`.
  static PoseDistribution one_hot(double angle, std::size_t bins);
  static PoseDistribution uniform(std::size_t bins);
  /// Throws std::invalid_argument unless non-negative and summing to 1.
  void validate(double tolerance = 1e-9) const;

  friend bool operator==(const PoseDistribution&, const PoseDistribution&) = default;
};

/// Inferred state of one object slot in one frame.
struct ObjectState {
  Point3 location = Point3::Zero();
  PoseDistribution pose;
  IdentityCode identity = IdentityCode::Zero();
};

/// Distribution over the b discrete rotation speeds
///   offset + 2*pi*n/b,  n = -(b/2 - 1), ..., b/2
/// (i.e. -(b-2)pi/b ... pi when offset is 0). `offset` is the camera pan
/// between the two observed frames; pose differences measured in camera
/// coordinates are shifted by it to give rotation relative to the room.
struct AngularPosterior {
  std::vector<double> probs;
  double offset = 0.0;

  std::size_t bins() const { return probs.size(); }
  double speed(std::size_t index) const;
  /// Bin-difference (m - l) mod b for storage index `index`.
  static std::size_t bin_shift(std::size_t index, std::size_t bins);
  /// Storage index for the bin difference `shift` (taken mod b).
  static std::size_t index_of_shift(std::size_t shift, std::size_t bins);
};

/// Rotation speeds on the discrete grid, including the offset.
std::vector<double> speed_grid(std::size_t bins, double offset = 0.0);

struct Kinematics {
  Vec3 velocity = Vec3::Zero();
  AngularPosterior angular;
  double omega_point = 0.0;  // population-vector estimate, radians per step
};

/// Match-weighted average of the offsets between `now` and where each
/// earlier candidate would appear if it were static. `prev` holds the K
/// earlier objects; `match_row` has K+1 entries, the last for the background,
/// whose hypothesis (a static object) contributes zero offset.
Vec3 estimate_velocity(const ObjectState& now, std::span<const ObjectState> prev,
                       std::span<const double> match_row, const EgoMotion& ego_prev);

/// Unnormalized likelihood over the speed grid (storage order of
/// AngularPosterior): L[d] = sum_l prev[l] * now[(l + d) mod b].
std::vector<double> angular_likelihood(const PoseDistribution& pose_now,
                                       const PoseDistribution& pose_prev);

/// exp(kappa * cos(speed)) at each grid speed.
std::vector<double> von_mises_prior(std::size_t bins, double kappa, double offset = 0.0);

/// Normalized likelihood * prior. Throws std::invalid_argument when the
/// likelihood is all zero or negative anywhere.
AngularPosterior angular_posterior(std::span<const double> likelihood,
                                   std::span<const double> prior, double offset = 0.0);

/// Match-weighted mixture of per-candidate posteriors, renormalized.
AngularPosterior soft_angular_posterior(std::span<const AngularPosterior> candidates,
                                        std::span<const double> match_row);

/// Angle of sum_m probs[m] * (cos a_m, sin a_m). Throws std::domain_error when
/// the resultant is shorter than `epsilon`.
double population_vector(std::span<const double> probs, std::span<const double> angles,
                         double epsilon = 1e-9);
double population_vector(const PoseDistribution& pose, double epsilon = 1e-9);
double population_vector(const AngularPosterior& angular, double epsilon = 1e-9);

/// Location at the next frame under inertia: M(-w_obs) (x + v - v_obs).
Point3 predict_location(const Point3& location, const Vec3& velocity, const EgoMotion& ego);

/// Circularly shifts a bin distribution by `shift` radians. Whole-bin shifts
/// are exact; the remaining fraction of a bin is spread with a Von Mises kernel
/// of concentration `kappa` (kappa <= 0 or infinite rounds to the nearest bin).
std::vector<double> shift_distribution(std::span<const double> probs, double shift, double kappa);

/// Pose at the next frame: the circular convolution of `pose` with the
/// rotation-speed distribution, moved by the angular grid offset minus the
/// next camera pan `ego_yaw`.
PoseDistribution predict_pose(const PoseDistribution& pose, const AngularPosterior& angular,
                              double ego_yaw, double kappa_interp);

struct KinematicsParams {
  double kappa_prior = 1.0;
};

/// Full per-object estimate: velocity, soft angular posterior (background
/// candidate contributes the bare prior) and its population-vector point.
Kinematics estimate_kinematics(const ObjectState& now, std::span<const ObjectState> prev,
                               std::span<const double> match_row, const EgoMotion& ego_prev,
                               const KinematicsParams& params);

}  // namespace scenepred
