#include "scenepred/objmatch.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scenepred {

MatchMatrix MatchMatrix::identity(std::size_t slots) {
  const auto n = static_cast<Eigen::Index>(slots);
  return MatchMatrix(Eigen::MatrixXd::Identity(n, n));
}

std::vector<double> MatchMatrix::row(std::size_t k) const {
  std::vector<double> out(cols());
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = (*this)(k, l);
  return out;
}

MatchMatrix match_scores(const std::vector<IdentityCode>& codes_now,
                         const std::vector<IdentityCode>& codes_prev, double sigma) {
  if (codes_now.empty() || codes_prev.empty())
    throw std::invalid_argument("identity code lists must include the background slot");
  if (codes_now.size() != codes_prev.size())
    throw std::invalid_argument("identity code lists differ in length");
  if (!(sigma > 0.0)) throw std::invalid_argument("RBF bandwidth must be positive");

  const auto n = static_cast<Eigen::Index>(codes_now.size());
  Eigen::MatrixXd scores(n, n);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  for (Eigen::Index k = 0; k < n; ++k) {
    // Subtracting the row's smallest squared distance keeps the best match at
    // exp(0) so rows never underflow to all zeros; it cancels on normalizing.
    std::vector<double> d2(static_cast<std::size_t>(n));
    double d2_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto& a = codes_now[static_cast<std::size_t>(k)];
      const auto& b = codes_prev[static_cast<std::size_t>(l)];
      if (!a.allFinite() || !b.allFinite()) throw std::invalid_argument("non-finite identity code");
      d2[static_cast<std::size_t>(l)] = (a - b).squaredNorm();
      d2_min = std::min(d2_min, d2[static_cast<std::size_t>(l)]);
    }
    double sum = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      const double s = std::exp(-(d2[static_cast<std::size_t>(l)] - d2_min) * inv_two_var);
      scores(k, l) = s;
      sum += s;
    }
    scores.row(k) /= sum;
  }
  return MatchMatrix(std::move(scores));
}

}  // namespace scenepred
