#include <cmath>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scenepred/kinematics.hpp"

using namespace scenepred;

namespace {

constexpr double kPi = std::numbers::pi;

ObjectState at(const Point3& x, std::size_t bins = 8) {
  ObjectState s;
  s.location = x;
  s.pose = PoseDistribution::uniform(bins);
  return s;
}

PoseDistribution delta(std::size_t index, std::size_t bins) {
  PoseDistribution p{std::vector<double>(bins, 0.0)};
  p.probs[index] = 1.0;
  return p;
}

AngularPosterior angular_delta(std::size_t shift, std::size_t bins) {
  AngularPosterior a{std::vector<double>(bins, 0.0), 0.0};
  a.probs[AngularPosterior::index_of_shift(shift, bins)] = 1.0;
  return a;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<double> rotated(const std::vector<double>& p, std::size_t k) {
  std::vector<double> out(p.size());
  for (std::size_t m = 0; m < p.size(); ++m) out[(m + k) % p.size()] = p[m];
  return out;
}

}  // namespace

TEST(PoseDistribution, BinsAndOneHot) {
  EXPECT_NEAR(PoseDistribution::bin_center(0, 8), kPi / 4, 1e-15);
  EXPECT_NEAR(PoseDistribution::bin_center(7, 8), 2 * kPi, 1e-15);
  EXPECT_EQ(PoseDistribution::one_hot(kPi / 4, 8), delta(0, 8));
  EXPECT_EQ(PoseDistribution::one_hot(0.0, 8), delta(7, 8));
  EXPECT_EQ(PoseDistribution::one_hot(kPi / 2 + 0.1, 8), delta(1, 8));
  EXPECT_NO_THROW(PoseDistribution::uniform(16).validate());
  EXPECT_THROW((PoseDistribution{{0.5, 0.6}}.validate()), std::invalid_argument);
}

TEST(SpeedGrid, SymmetricRangeEndingAtPi) {
  const auto g = speed_grid(8);
  EXPECT_NEAR(g.front(), -3 * kPi / 4, 1e-15);
  EXPECT_NEAR(g.back(), kPi, 1e-15);
  EXPECT_NEAR(g[AngularPosterior::index_of_shift(0, 8)], 0.0, 1e-15);
  for (std::size_t s = 0; s < 8; ++s)
    EXPECT_EQ(AngularPosterior::index_of_shift(AngularPosterior::bin_shift(s, 8), 8), s);
  EXPECT_THROW(speed_grid(7), std::invalid_argument);
}

TEST(EstimateVelocity, Examples) {
  const std::vector<ObjectState> prev = {at({0, 3, 0})};
  const std::vector<double> row = {1.0, 0.0};
  const Vec3 v = estimate_velocity(at({1, 3, 0}), prev, row, {});
  EXPECT_LT((v - Vec3(1, 0, 0)).norm(), 1e-15);

  const std::vector<ObjectState> two = {at({0, 3, 0}), at({2, 3, 0})};
  const std::vector<double> mixed = {0.75, 0.25, 0.0};
  const Vec3 w = estimate_velocity(at({1, 3, 0}), two, mixed, {});
  EXPECT_LT((w - Vec3(0.5, 0, 0)).norm(), 1e-15);

  const EgoMotion ego{Vec3(0, 1, 0), 0.0};
  const Vec3 s = estimate_velocity(at(apparent_location({0.5, 4, 0}, ego)), std::vector{at({0.5, 4, 0})},
                                   row, ego);
  EXPECT_LT(s.norm(), 1e-15);
  EXPECT_THROW(estimate_velocity(at({0, 0, 0}), prev, mixed, {}), std::invalid_argument);
}

TEST(EstimateVelocity, BackgroundCandidateAddsNoOffset) {
  const std::vector<ObjectState> prev = {at({0, 3, 0})};
  const std::vector<double> row = {0.5, 0.5};
  const Vec3 v = estimate_velocity(at({1, 3, 0}), prev, row, {});
  EXPECT_LT((v - Vec3(0.5, 0, 0)).norm(), 1e-15);
}

TEST(AngularLikelihood, Examples) {
  const auto l = angular_likelihood(delta(5, 8), delta(3, 8));
  const auto grid = speed_grid(8);
  for (std::size_t s = 0; s < 8; ++s)
    EXPECT_EQ(l[s], std::abs(grid[s] - kPi / 2) < 1e-12 ? 1.0 : 0.0);

  const auto u = angular_likelihood(PoseDistribution::uniform(8), PoseDistribution::uniform(8));
  for (double x : u) EXPECT_NEAR(x, 1.0 / 8, 1e-15);

  const auto same = angular_likelihood(delta(2, 8), delta(2, 8));
  EXPECT_EQ(same[AngularPosterior::index_of_shift(0, 8)], 1.0);
  EXPECT_EQ(sum(same), 1.0);
}

TEST(AngularLikelihood, MatchesBruteForceAndIsShiftInvariant) {
  Rng rng(23);
  for (std::size_t b : {8u, 16u, 32u})
    for (int n = 0; n < 30; ++n) {
      const PoseDistribution now = oracle::random_pose(rng, b);
      const PoseDistribution prev = oracle::random_pose(rng, b);
      const auto fast = angular_likelihood(now, prev);
      EXPECT_EQ(fast, oracle::brute_force_angular_likelihood(now, prev));
      const std::size_t k = rng.below(b);
      const auto moved =
          angular_likelihood(PoseDistribution{rotated(now.probs, k)}, PoseDistribution{rotated(prev.probs, k)});
      for (std::size_t s = 0; s < b; ++s) EXPECT_NEAR(moved[s], fast[s], 1e-15);
    }
}

TEST(AngularPosterior, Examples) {
  const auto prior = von_mises_prior(8, 1.0);
  const AngularPosterior flat = angular_posterior(std::vector<double>(8, 1.0), prior);
  const double z = sum(prior);
  for (std::size_t s = 0; s < 8; ++s) EXPECT_NEAR(flat.probs[s], prior[s] / z, 1e-15);

  std::vector<double> spike(8, 0.0);
  spike[6] = 1.0;
  EXPECT_EQ(angular_posterior(spike, prior).probs, spike);

  std::vector<double> two(8, 0.0);
  two[AngularPosterior::index_of_shift(0, 8)] = 0.5;
  two[AngularPosterior::index_of_shift(2, 8)] = 0.5;
  const AngularPosterior post = angular_posterior(two, prior);
  EXPECT_NEAR(post.probs[AngularPosterior::index_of_shift(0, 8)], 0.7311, 1e-4);
  EXPECT_NEAR(post.probs[AngularPosterior::index_of_shift(2, 8)], 0.2689, 1e-4);
  const double e = std::exp(1.0);
  EXPECT_NEAR(post.probs[AngularPosterior::index_of_shift(0, 8)], e / (e + 1.0), 1e-12);

  EXPECT_THROW(angular_posterior(std::vector<double>(8, 0.0), prior), std::invalid_argument);
}

TEST(SoftAngularPosterior, Examples) {
  const AngularPosterior a = angular_delta(0, 8);
  const AngularPosterior b = angular_delta(2, 8);
  const std::vector<AngularPosterior> cands = {a, b};
  const std::vector<double> one_hot = {0.0, 1.0};
  EXPECT_EQ(soft_angular_posterior(cands, one_hot).probs, b.probs);
  const std::vector<AngularPosterior> same = {a, a};
  const std::vector<double> w = {0.3, 0.7};
  for (std::size_t s = 0; s < 8; ++s)
    EXPECT_NEAR(soft_angular_posterior(same, w).probs[s], a.probs[s], 1e-15);
  const std::vector<double> half = {0.5, 0.5};
  const AngularPosterior mix = soft_angular_posterior(cands, half);
  EXPECT_NEAR(mix.probs[AngularPosterior::index_of_shift(0, 8)], 0.5, 1e-15);
  EXPECT_NEAR(mix.probs[AngularPosterior::index_of_shift(2, 8)], 0.5, 1e-15);
}

TEST(PopulationVector, Examples) {
  const std::vector<double> angles = {0.0, kPi / 2, kPi, 3 * kPi / 2};
  const std::vector<double> d = {0.0, 1.0, 0.0, 0.0};
  EXPECT_NEAR(population_vector(d, angles), kPi / 2, 1e-15);
  const std::vector<double> h = {0.5, 0.5, 0.0, 0.0};
  EXPECT_NEAR(population_vector(h, angles), kPi / 4, 1e-15);
  EXPECT_THROW(population_vector(std::vector<double>(4, 0.25), angles), std::domain_error);
  EXPECT_THROW(population_vector(PoseDistribution::uniform(16)), std::domain_error);
}

TEST(PredictLocation, Examples) {
  const Point3 x(0.3, 2.0, -0.1);
  EXPECT_EQ(predict_location(x, Vec3::Zero(), {}), x);
  EXPECT_LT((predict_location(x, {1, 0, 0}, {}) - (x + Vec3(1, 0, 0))).norm(), 1e-15);
  const Point3 p = predict_location({0, 2, 0}, Vec3::Zero(), {Vec3(0, 1, 0), kPi / 2});
  EXPECT_LT((p - Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(PredictPose, Examples) {
  const PoseDistribution moved = predict_pose(delta(0, 8), angular_delta(2, 8), 0.0, 16.0);
  EXPECT_EQ(moved, delta(2, 8));

  Rng rng(4);
  const PoseDistribution p = oracle::random_pose(rng, 8);
  const PoseDistribution same = predict_pose(p, angular_delta(0, 8), 0.0, 16.0);
  for (std::size_t m = 0; m < 8; ++m) EXPECT_NEAR(same.probs[m], p.probs[m], 1e-15);

  // A camera pan of one bin moves camera-relative poses back by one bin.
  const PoseDistribution panned = predict_pose(p, angular_delta(0, 8), 2 * kPi / 8, 16.0);
  for (std::size_t m = 0; m < 8; ++m) EXPECT_NEAR(panned.probs[m], p.probs[(m + 1) % 8], 1e-15);
}

TEST(PredictPose, FractionalShiftSharpensWithConcentration) {
  const double quarter = 0.25 * 2 * kPi / 8;
  const PoseDistribution soft = predict_pose(delta(3, 8), angular_delta(0, 8), -quarter, 4.0);
  const PoseDistribution sharp = predict_pose(delta(3, 8), angular_delta(0, 8), -quarter, 4000.0);
  EXPECT_GT(sharp.probs[3], soft.probs[3]);
  EXPECT_GT(sharp.probs[3], 0.99);
  EXPECT_EQ(predict_pose(delta(3, 8), angular_delta(0, 8), -quarter, 0.0), delta(3, 8));
}

TEST(Kinematics, ProbabilityIsPreserved) {
  Rng rng(31);
  for (int n = 0; n < 200; ++n) {
    const std::size_t b = 2 * (2 + rng.below(15));
    const PoseDistribution now = oracle::random_pose(rng, b);
    const PoseDistribution prev = oracle::random_pose(rng, b);
    const auto lik = angular_likelihood(now, prev);
    const double offset = rng.uniform(-0.5, 0.5);
    const AngularPosterior post = angular_posterior(lik, von_mises_prior(b, 1.0, offset), offset);
    EXPECT_NEAR(sum(post.probs), 1.0, 1e-9);
    const AngularPosterior other =
        angular_posterior(std::vector<double>(b, 1.0), von_mises_prior(b, 2.0, offset), offset);
    const std::vector<AngularPosterior> cands = {post, other};
    const double r = rng.uniform();
    const std::vector<double> row = {r, 1.0 - r};
    EXPECT_NEAR(sum(soft_angular_posterior(cands, row).probs), 1.0, 1e-9);
    const PoseDistribution next = predict_pose(now, post, rng.uniform(-0.3, 0.3), b * b / 4.0);
    EXPECT_NEAR(sum(next.probs), 1.0, 1e-9);
    for (double x : next.probs) EXPECT_GE(x, 0.0);
  }
}

TEST(Kinematics, FullEstimateRecoversRotation) {
  const std::size_t b = 16;
  const double width = 2 * kPi / b;
  const EgoMotion ego{Vec3(0.02, 0.01, 0.0), width};
  ObjectState prev = at({0.5, 3.0, 0.0}, b);
  prev.pose = PoseDistribution::one_hot(4 * width, b);
  ObjectState now = at(apparent_location(prev.location + Vec3(0.1, 0.0, 0.0), ego), b);
  // Object turns two bins in the room while the camera pans one bin.
  now.pose = PoseDistribution::one_hot(5 * width, b);
  const std::vector<ObjectState> prevs = {prev};
  const std::vector<double> row = {1.0, 0.0};
  const Kinematics k = estimate_kinematics(now, prevs, row, ego, {1.0});
  // Velocity comes out in the later camera frame.
  EXPECT_LT((k.velocity - yaw_matrix(-width) * Vec3(0.1, 0, 0)).norm(), 1e-12);
  EXPECT_NEAR(k.omega_point, 2 * width, 1e-12);
  EXPECT_NEAR(k.angular.offset, width, 0.0);
}
