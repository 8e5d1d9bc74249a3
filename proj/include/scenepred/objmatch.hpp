#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace scenepred {

inline constexpr int kIdentityDims = 10;

/// Identity code of one object slot. The background slot uses the zero code.
using IdentityCode = Eigen::Matrix<double, kIdentityDims, 1>;

/// r(k, l): soft match of slot k in the current frame against slot l in the
/// earlier frame. Slot index K (the last) is the background in both frames.
/// Rows sum to one.
class MatchMatrix {
 public:
  MatchMatrix() = default;
  explicit MatchMatrix(Eigen::MatrixXd scores) : scores_(std::move(scores)) {}

  static MatchMatrix identity(std::size_t slots);

  std::size_t rows() const { return static_cast<std::size_t>(scores_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(scores_.cols()); }
  double operator()(std::size_t k, std::size_t l) const {
    return scores_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  }
  std::vector<double> row(std::size_t k) const;
  const Eigen::MatrixXd& scores() const { return scores_; }

 private:
  Eigen::MatrixXd scores_;
};

/// Gaussian RBF scores exp(-|z_k - z_l|^2 / (2 sigma^2)) normalized per row.
/// Both lists hold K object codes followed by the background code.
/// Throws std::invalid_argument on empty or mismatched lists, or sigma <= 0.
MatchMatrix match_scores(const std::vector<IdentityCode>& codes_now,
                         const std::vector<IdentityCode>& codes_prev, double sigma);

}  // namespace scenepred
