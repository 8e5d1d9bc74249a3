#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "scenepred/objmatch.hpp"
#include "scenepred/random.hpp"

using namespace scenepred;

namespace {

IdentityCode axis(int k, double scale = 1.0) {
  IdentityCode z = IdentityCode::Zero();
  z(k) = scale;
  return z;
}

std::vector<IdentityCode> random_codes(Rng& rng, std::size_t n) {
  std::vector<IdentityCode> out;
  for (std::size_t k = 0; k < n; ++k) {
    IdentityCode z;
    for (int d = 0; d < kIdentityDims; ++d) z(d) = rng.uniform(-2.0, 2.0);
    out.push_back(z);
  }
  return out;
}

}  // namespace

TEST(MatchScores, TwoThirdsOneThird) {
  IdentityCode near = IdentityCode::Zero();
  IdentityCode far = IdentityCode::Zero();
  far(0) = std::sqrt(2.0 * std::log(2.0));
  const MatchMatrix m = match_scores({IdentityCode::Zero(), far}, {near, far}, 1.0);
  EXPECT_NEAR(m(0, 0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m(0, 1), 1.0 / 3.0, 1e-12);
}

TEST(MatchScores, EqualDistancesGiveUniformRows) {
  std::vector<IdentityCode> prev;
  for (int k = 0; k < 4; ++k) prev.push_back(axis(k));
  const MatchMatrix m = match_scores({axis(5), axis(6), axis(7), axis(8)}, prev, 1.0);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t l = 0; l < 4; ++l) EXPECT_NEAR(m(k, l), 0.25, 1e-12);
}

TEST(MatchScores, SeparatedCodesGiveOneHotRows) {
  const std::vector<IdentityCode> prev = {axis(0, 10), axis(1, 10), IdentityCode::Zero()};
  const std::vector<IdentityCode> now = {axis(1, 10), axis(0, 10), IdentityCode::Zero()};
  const MatchMatrix m = match_scores(now, prev, 1.0);
  EXPECT_NEAR(m(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(m(1, 0), 1.0, 1e-12);
  EXPECT_NEAR(m(2, 2), 1.0, 1e-12);
}

TEST(MatchScores, RejectsBadInput) {
  EXPECT_THROW(match_scores({}, {axis(0)}, 1.0), std::invalid_argument);
  EXPECT_THROW(match_scores({axis(0)}, {axis(0)}, 0.0), std::invalid_argument);
  EXPECT_THROW(match_scores({axis(0), axis(1)}, {axis(0)}, 1.0), std::invalid_argument);
}

TEST(MatchScores, RowStochasticAndPermutationEquivariant) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(5);
    const auto now = random_codes(rng, n);
    const auto prev = random_codes(rng, n);
    const double sigma = rng.uniform(0.3, 3.0);
    const MatchMatrix m = match_scores(now, prev, sigma);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = n; k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
    std::vector<IdentityCode> permuted;
    for (std::size_t l = 0; l < n; ++l) permuted.push_back(prev[perm[l]]);
    const MatchMatrix mp = match_scores(now, permuted, sigma);
    for (std::size_t k = 0; k < n; ++k) {
      double sum = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        sum += m(k, l);
        EXPECT_NEAR(mp(k, l), m(k, perm[l]), 1e-14);
        for (std::size_t q = 0; q < n; ++q) {
          const double dl = (now[k] - prev[l]).norm();
          const double dq = (now[k] - prev[q]).norm();
          if (dl < dq) EXPECT_GE(m(k, l), m(k, q));
        }
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}
