#include "scenepred/kinematics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scenepred {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void normalize(std::vector<double>& v, const char* what) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw std::invalid_argument(std::string(what) + ": distribution has no mass");
  for (double& x : v) x /= sum;
}

void require_even_bins(std::size_t bins) {
  if (bins < 2 || bins % 2 != 0) throw std::invalid_argument("bin count must be even and >= 2");
}

}  // namespace

double PoseDistribution::bin_center(std::size_t index, std::size_t bins) {
  return kTwoPi * static_cast<double>(index + 1) / static_cast<double>(bins);
}

PoseDistribution PoseDistribution::one_hot(double angle, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("pose needs at least one bin");
  const double width = kTwoPi / static_cast<double>(bins);
  auto nearest = static_cast<long>(std::llround(wrap_two_pi(angle) / width));
  // center m+1 bins from zero -> storage m; a round to 0 is the last bin.
  std::size_t index = static_cast<std::size_t>((nearest + static_cast<long>(bins) - 1) %
                                               static_cast<long>(bins));
  PoseDistribution pose{std::vector<double>(bins, 0.0)};
  pose.probs[index] = 1.0;
  return pose;
}

PoseDistribution PoseDistribution::uniform(std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("pose needs at least one bin");
  return {std::vector<double>(bins, 1.0 / static_cast<double>(bins))};
}

void PoseDistribution::validate(double tolerance) const {
  if (probs.empty()) throw std::invalid_argument("empty pose distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("pose probability negative or non-finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw std::invalid_argument("pose distribution sums to " + std::to_string(sum));
}

std::size_t AngularPosterior::bin_shift(std::size_t index, std::size_t bins) {
  // index 0 is n = -(b/2 - 1), i.e. a shift of b/2 + 1 bins.
  return (index + bins / 2 + 1) % bins;
}

std::size_t AngularPosterior::index_of_shift(std::size_t shift, std::size_t bins) {
  return (shift % bins + bins / 2 - 1) % bins;
}

double AngularPosterior::speed(std::size_t index) const {
  const auto b = static_cast<double>(bins());
  const double n = static_cast<double>(index) - (b / 2.0 - 1.0);
  return offset + kTwoPi * n / b;
}

std::vector<double> speed_grid(std::size_t bins, double offset) {
  require_even_bins(bins);
  AngularPosterior grid{std::vector<double>(bins, 0.0), offset};
  std::vector<double> out(bins);
  for (std::size_t s = 0; s < bins; ++s) out[s] = grid.speed(s);
  return out;
}

Vec3 estimate_velocity(const ObjectState& now, std::span<const ObjectState> prev,
                       std::span<const double> match_row, const EgoMotion& ego_prev) {
  if (match_row.size() != prev.size() + 1)
    throw std::invalid_argument("match row must have one entry per earlier object plus background");
  Vec3 v = Vec3::Zero();
  for (std::size_t l = 0; l < prev.size(); ++l)
    v += match_row[l] * (now.location - apparent_location(prev[l].location, ego_prev));
  return v;
}

std::vector<double> angular_likelihood(const PoseDistribution& pose_now,
                                       const PoseDistribution& pose_prev) {
  const std::size_t b = pose_now.bins();
  if (b != pose_prev.bins()) throw std::invalid_argument("pose distributions differ in bin count");
  require_even_bins(b);
  std::vector<double> out(b, 0.0);
  for (std::size_t d = 0; d < b; ++d) {
    double acc = 0.0;
    for (std::size_t l = 0; l < b; ++l) acc += pose_prev.probs[l] * pose_now.probs[(l + d) % b];
    out[AngularPosterior::index_of_shift(d, b)] = acc;
  }
  return out;
}

std::vector<double> von_mises_prior(std::size_t bins, double kappa, double offset) {
  std::vector<double> prior = speed_grid(bins, offset);
  for (double& s : prior) s = std::exp(kappa * (std::cos(s) - 1.0));
  return prior;
}

AngularPosterior angular_posterior(std::span<const double> likelihood,
                                   std::span<const double> prior, double offset) {
  if (likelihood.size() != prior.size())
    throw std::invalid_argument("likelihood and prior differ in size");
  require_even_bins(likelihood.size());
  AngularPosterior post{std::vector<double>(likelihood.size()), offset};
  bool any = false;
  for (std::size_t s = 0; s < likelihood.size(); ++s) {
    if (!(likelihood[s] >= 0.0)) throw std::invalid_argument("negative likelihood");
    any = any || likelihood[s] > 0.0;
    post.probs[s] = likelihood[s] * prior[s];
  }
  if (!any) throw std::invalid_argument("likelihood is zero everywhere");
  normalize(post.probs, "angular posterior");
  return post;
}

AngularPosterior soft_angular_posterior(std::span<const AngularPosterior> candidates,
                                        std::span<const double> match_row) {
  if (candidates.empty() || candidates.size() != match_row.size())
    throw std::invalid_argument("need one posterior per match candidate");
  AngularPosterior mix{std::vector<double>(candidates.front().bins(), 0.0),
                       candidates.front().offset};
  for (std::size_t l = 0; l < candidates.size(); ++l) {
    if (candidates[l].bins() != mix.bins())
      throw std::invalid_argument("candidate posteriors differ in bin count");
    for (std::size_t s = 0; s < mix.bins(); ++s)
      mix.probs[s] += match_row[l] * candidates[l].probs[s];
  }
  normalize(mix.probs, "soft angular posterior");
  return mix;
}

double population_vector(std::span<const double> probs, std::span<const double> angles,
                         double epsilon) {
  if (probs.size() != angles.size()) throw std::invalid_argument("probs/angles size mismatch");
  double cx = 0.0;
  double sy = 0.0;
  for (std::size_t m = 0; m < probs.size(); ++m) {
    cx += probs[m] * std::cos(angles[m]);
    sy += probs[m] * std::sin(angles[m]);
  }
  if (std::hypot(cx, sy) < epsilon)
    throw std::domain_error("population vector has no preferred direction");
  return std::atan2(sy, cx);
}

double population_vector(const PoseDistribution& pose, double epsilon) {
  std::vector<double> angles(pose.bins());
  for (std::size_t m = 0; m < angles.size(); ++m)
    angles[m] = PoseDistribution::bin_center(m, pose.bins());
  return population_vector(pose.probs, angles, epsilon);
}

double population_vector(const AngularPosterior& angular, double epsilon) {
  return population_vector(angular.probs, speed_grid(angular.bins(), angular.offset), epsilon);
}

Point3 predict_location(const Point3& location, const Vec3& velocity, const EgoMotion& ego) {
  return yaw_matrix(-ego.yaw_rate) * (location + velocity - ego.velocity);
}

std::vector<double> shift_distribution(std::span<const double> probs, double shift, double kappa) {
  const std::size_t b = probs.size();
  if (b == 0) return {};
  const double width = kTwoPi / static_cast<double>(b);
  const double whole = std::round(shift / width);
  const double residual = shift - whole * width;
  const long bl = static_cast<long>(b);
  const long k = ((static_cast<long>(whole) % bl) + bl) % bl;

  std::vector<double> rolled(b);
  for (std::size_t m = 0; m < b; ++m) rolled[(m + static_cast<std::size_t>(k)) % b] = probs[m];
  if (residual == 0.0 || !(kappa > 0.0) || !std::isfinite(kappa)) return rolled;

  // Kernel weight from a source bin to a target bin d bins further on;
  // identical for every source, so one normalizer serves all.
  std::vector<double> kernel(b);
  double z = 0.0;
  for (std::size_t d = 0; d < b; ++d) {
    kernel[d] = std::exp(kappa * (std::cos(static_cast<double>(d) * width - residual) - 1.0));
    z += kernel[d];
  }
  std::vector<double> out(b, 0.0);
  for (std::size_t l = 0; l < b; ++l) {
    if (rolled[l] == 0.0) continue;
    for (std::size_t d = 0; d < b; ++d) out[(l + d) % b] += rolled[l] * kernel[d] / z;
  }
  return out;
}

PoseDistribution predict_pose(const PoseDistribution& pose, const AngularPosterior& angular,
                              double ego_yaw, double kappa_interp) {
  const std::size_t b = pose.bins();
  if (angular.bins() != b) throw std::invalid_argument("pose and angular grids differ");
  std::vector<double> conv(b, 0.0);
  for (std::size_t m = 0; m < b; ++m) {
    if (pose.probs[m] == 0.0) continue;
    for (std::size_t s = 0; s < b; ++s)
      conv[(m + AngularPosterior::bin_shift(s, b)) % b] += pose.probs[m] * angular.probs[s];
  }
  PoseDistribution out{shift_distribution(conv, angular.offset - ego_yaw, kappa_interp)};
  normalize(out.probs, "predicted pose");
  return out;
}

Kinematics estimate_kinematics(const ObjectState& now, std::span<const ObjectState> prev,
                               std::span<const double> match_row, const EgoMotion& ego_prev,
                               const KinematicsParams& params) {
  Kinematics kin;
  kin.velocity = estimate_velocity(now, prev, match_row, ego_prev);

  const std::size_t b = now.pose.bins();
  const std::vector<double> prior = von_mises_prior(b, params.kappa_prior, ego_prev.yaw_rate);
  std::vector<AngularPosterior> candidates;
  candidates.reserve(prev.size() + 1);
  for (const auto& candidate : prev) {
    const std::vector<double> lik = angular_likelihood(now.pose, candidate.pose);
    candidates.push_back(angular_posterior(lik, prior, ego_prev.yaw_rate));
  }
  const std::vector<double> flat(b, 1.0);
  candidates.push_back(angular_posterior(flat, prior, ego_prev.yaw_rate));
  kin.angular = soft_angular_posterior(candidates, match_row);
  try {
    kin.omega_point = wrap_pi(population_vector(kin.angular));
  } catch (const std::domain_error&) {
    kin.omega_point = 0.0;
  }
  return kin;
}

}  // namespace scenepred
