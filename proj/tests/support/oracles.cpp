#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

namespace scenepred::oracle {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::string describe(const char* what, std::size_t at, double got, double want) {
  std::ostringstream out;
  out.precision(17);
  out << what << " differs at " << at << ": " << got << " vs " << want;
  return out.str();
}

}  // namespace

SplatInstance random_splat_instance(Rng& rng, int max_size, int max_objects) {
  SplatInstance s;
  const int w = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_size - 1)));
  const int h = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_size - 1)));
  const auto k = rng.below(static_cast<std::uint64_t>(max_objects + 1));
  s.cam = {w, h, focal_from_fov(w, rng.uniform(0.6, 2.2))};
  s.frame = Frame(w, h);
  s.depth = DepthMap(w, h);
  for (std::size_t p = 0; p < s.frame.size(); ++p) {
    s.frame[p] = {rng.uniform(), rng.uniform(), rng.uniform()};
    s.depth[p] = rng.uniform(0.5, 6.0);
  }
  const std::size_t slots = k + 1;
  s.seg.slots.assign(slots, Grid<double>(w, h, 0.0));
  for (std::size_t p = 0; p < s.frame.size(); ++p) {
    const double mode = rng.uniform();
    if (mode < 0.4) {
      s.seg.slots[rng.below(slots)][p] = 1.0;
      continue;
    }
    double total = 0.0;
    for (std::size_t q = 0; q < slots; ++q) {
      const double v = rng.uniform() < 0.25 ? 0.0 : rng.uniform();
      s.seg.slots[q][p] = v;
      total += v;
    }
    if (total == 0.0) {
      s.seg.slots[0][p] = 1.0;
      continue;
    }
    for (std::size_t q = 0; q < slots; ++q) s.seg.slots[q][p] /= total;
  }
  for (std::size_t q = 0; q < k; ++q)
    s.motions.push_back({Point3(rng.uniform(-1.0, 1.0), rng.uniform(1.0, 4.0), rng.uniform(-0.5, 0.5)),
                         Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0.0),
                         rng.uniform(-0.4, 0.4)});
  s.motions.push_back(SlotMotion::background());
  s.ego = {Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0.0), rng.uniform(-0.15, 0.15)};
  s.beta = rng.uniform(0.2, 2.0);
  return s;
}

SplatResult brute_force_splat(const SplatInput& in) {
  const int w = in.cam.width;
  const int h = in.cam.height;
  SplatResult out{Frame(w, h, Rgb{0.0, 0.0, 0.0}), DepthMap(w, h, 0.0), Grid<double>(w, h, 0.0)};
  for (int tr = 0; tr < h; ++tr)
    for (int tc = 0; tc < w; ++tc) {
      double num[3] = {0.0, 0.0, 0.0};
      double den = 0.0;
      double depth = 0.0;
      double portion = 0.0;
      for (int sr = 0; sr < h; ++sr)
        for (int sc = 0; sc < w; ++sc) {
          const std::size_t p = static_cast<std::size_t>(sr) * static_cast<std::size_t>(w) +
                                static_cast<std::size_t>(sc);
          for (std::size_t k = 0; k < in.seg.num_slots(); ++k) {
            const double pi = in.seg.slots[k][p];
            if (pi == 0.0) continue;
            const Landing land = land_pixel(sc, sr, in.depth[p], in.motions[k], in.ego, in.cam);
            if (!land.valid) continue;
            const double bx = std::max(1.0 - std::abs(land.col - tc), 0.0);
            const double by = std::max(1.0 - std::abs(land.row - tr), 0.0);
            // Only the bilinear footprint touches this target.
            if (std::abs(land.col - tc) >= 1.0 || std::abs(land.row - tr) >= 1.0) continue;
            const double occlusion = std::exp(-in.beta * land.distance);
            const double weight = pi * occlusion * bx * by;
            num[0] += weight * in.frame[p][0];
            num[1] += weight * in.frame[p][1];
            num[2] += weight * in.frame[p][2];
            den += weight;
            depth += weight * land.distance;
            portion += pi * bx * by;
          }
        }
      if (den > 0.0) {
        out.image(tc, tr) = {num[0] / den, num[1] / den, num[2] / den};
        out.depth(tc, tr) = depth / den;
      }
      out.weight(tc, tr) = std::min(1.0, portion);
    }
  return out;
}

std::vector<double> brute_force_angular_likelihood(const PoseDistribution& now,
                                                   const PoseDistribution& prev) {
  const std::size_t b = now.bins();
  const std::vector<double> grid = speed_grid(b);
  std::vector<double> out(b, 0.0);
  for (std::size_t l = 0; l < b; ++l)
    for (std::size_t m = 0; m < b; ++m) {
      const double a_prev = kTwoPi * static_cast<double>(l + 1) / static_cast<double>(b);
      const double a_now = kTwoPi * static_cast<double>(m + 1) / static_cast<double>(b);
      const double speed = wrap_pi(a_now - a_prev);
      std::size_t slot = b;
      for (std::size_t n = 0; n < b; ++n)
        if (std::abs(wrap_pi(grid[n] - speed)) < 1e-9) slot = n;
      out.at(slot) += prev.probs[l] * now.probs[m];
    }
  return out;
}

PoseDistribution random_pose(Rng& rng, std::size_t bins) {
  PoseDistribution p{std::vector<double>(bins, 0.0)};
  const bool sparse = rng.uniform() < 0.3;
  double total = 0.0;
  for (auto& v : p.probs) {
    v = sparse && rng.uniform() < 0.7 ? 0.0 : rng.uniform();
    total += v;
  }
  if (total == 0.0) {
    p.probs[rng.below(bins)] = 1.0;
    return p;
  }
  for (auto& v : p.probs) v /= total;
  return p;
}

Point3 reference_unproject(double i, double j, double depth, double focal) {
  Point3 ray(i, focal, j);
  ray.normalize();
  return depth * ray;
}

SuiteResult geometry_suite(std::uint64_t seed, int samples) {
  SuiteResult r{"geometry", true, ""};
  Rng rng(seed);
  double worst_round = 0.0;
  double worst_group = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int w = 8 + static_cast<int>(rng.below(249));
    const int h = 8 + static_cast<int>(rng.below(249));
    const CameraIntrinsics cam{w, h, focal_from_fov(w, rng.uniform(0.2, 3.0))};
    const double i = rng.uniform(-cam.half_width(), cam.half_width());
    const double j = rng.uniform(-cam.half_height(), cam.half_height());
    const double d = std::exp(rng.uniform(std::log(0.05), std::log(100.0)));

    const Point3 x = pixel_to_point(i, j, d, cam);
    const Point3 ref = reference_unproject(i, j, d, cam.focal);
    const PixelProjection back = point_to_pixel(x, cam);
    const double scale = std::max({1.0, std::abs(i), std::abs(j)});
    worst_round = std::max({worst_round, (x - ref).norm() / ref.norm(),
                            std::abs(back.i - i) / scale, std::abs(back.j - j) / scale,
                            std::abs(back.depth - d) / d});

    const double a = rng.uniform(-10.0, 10.0);
    const double b = rng.uniform(-10.0, 10.0);
    const Mat3 ra = yaw_matrix(a);
    worst_group = std::max(
        {worst_group, (ra * yaw_matrix(b) - yaw_matrix(a + b)).cwiseAbs().maxCoeff(),
         (ra * yaw_matrix(-a) - Mat3::Identity()).cwiseAbs().maxCoeff(),
         (ra.transpose() * ra - Mat3::Identity()).cwiseAbs().maxCoeff(),
         std::abs(ra.determinant() - 1.0),
         (yaw_matrix(a + kTwoPi) - ra).cwiseAbs().maxCoeff()});
  }
  std::ostringstream out;
  out << "worst round trip " << worst_round << ", worst group law " << worst_group;
  r.detail = out.str();
  r.passed = worst_round < 1e-6 && worst_group < 1e-9;
  return r;
}

SuiteResult splat_suite(std::uint64_t seed, int instances) {
  SuiteResult r{"splat", true, std::to_string(instances) + " instances bit-identical"};
  Rng rng(seed);
  for (int n = 0; n < instances && r.passed; ++n) {
    const SplatInstance s = random_splat_instance(rng, 8, 2);
    const SplatResult fast = splat(s.input(), 1 + n % 3);
    const SplatResult slow = brute_force_splat(s.input());
    for (std::size_t p = 0; p < fast.weight.size() && r.passed; ++p) {
      for (int c = 0; c < 3; ++c)
        if (!bit_equal(fast.image[p][c], slow.image[p][c])) {
          r.passed = false;
          r.detail = describe("image", p, fast.image[p][c], slow.image[p][c]);
        }
      if (r.passed && !bit_equal(fast.depth[p], slow.depth[p])) {
        r.passed = false;
        r.detail = describe("depth", p, fast.depth[p], slow.depth[p]);
      }
      if (r.passed && !bit_equal(fast.weight[p], slow.weight[p])) {
        r.passed = false;
        r.detail = describe("weight", p, fast.weight[p], slow.weight[p]);
      }
    }
    if (!r.passed) r.detail = "instance " + std::to_string(n) + ": " + r.detail;
  }
  return r;
}

SuiteResult mass_suite(std::uint64_t seed, int instances) {
  SuiteResult r{"mass", true, ""};
  Rng rng(seed);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int n = 0; n < instances; ++n) {
    const SplatInstance s = random_splat_instance(rng, 8, 2);
    const SplatInput in = s.input();
    for (int row = 0; row < s.cam.height; ++row)
      for (int col = 0; col < s.cam.width; ++col) {
        const std::size_t p = static_cast<std::size_t>(row) * static_cast<std::size_t>(s.cam.width) +
                              static_cast<std::size_t>(col);
        bool interior = true;
        for (std::size_t k = 0; k < s.seg.num_slots() && interior; ++k) {
          if (s.seg.slots[k][p] == 0.0) continue;
          const Landing land = land_pixel(col, row, s.depth[p], s.motions[k], s.ego, s.cam);
          interior = land.valid && land.col >= 0.0 && land.col <= s.cam.width - 1.0 &&
                     land.row >= 0.0 && land.row <= s.cam.height - 1.0;
        }
        if (!interior) continue;
        worst = std::max(worst, std::abs(contributed_portion(in, col, row) - 1.0));
        ++checked;
      }
  }
  r.passed = checked > 0 && worst <= 1e-6;
  std::ostringstream out;
  out << checked << " interior pixels, worst |portion - 1| " << worst;
  r.detail = out.str();
  return r;
}

SuiteResult angular_suite(std::uint64_t seed, int pairs) {
  SuiteResult r{"angular", true, ""};
  Rng rng(seed);
  for (const std::size_t b : {8u, 16u, 32u}) {
    for (int n = 0; n < pairs && r.passed; ++n) {
      const PoseDistribution now = random_pose(rng, b);
      const PoseDistribution prev = random_pose(rng, b);
      const std::vector<double> fast = angular_likelihood(now, prev);
      const std::vector<double> slow = brute_force_angular_likelihood(now, prev);
      for (std::size_t d = 0; d < b; ++d)
        if (!bit_equal(fast[d], slow[d])) {
          r.passed = false;
          r.detail = "b=" + std::to_string(b) + " pair " + std::to_string(n) + ": " +
                     describe("likelihood", d, fast[d], slow[d]);
          break;
        }
    }
  }
  if (r.passed) r.detail = std::to_string(pairs) + " pairs per b in {8, 16, 32} exact";
  return r;
}

}  // namespace scenepred::oracle
