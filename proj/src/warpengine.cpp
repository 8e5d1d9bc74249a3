#include "scenepred/warpengine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scenepred/parallel.hpp"

namespace scenepred {
namespace {

// Visits the (up to four) grid neighbors of a landing within target rows
// [row_lo, row_hi): fn(col, row, bx, by).
template <typename Fn>
void for_each_neighbor(const Landing& land, int width, int height, int row_lo, int row_hi, Fn&& fn) {
  if (!land.valid) return;
  if (land.col <= -1.0 || land.col >= width || land.row <= -1.0 || land.row >= height) return;
  const int c0 = static_cast<int>(std::floor(land.col));
  const int q0 = static_cast<int>(std::floor(land.row));
  for (int q = q0; q <= q0 + 1; ++q) {
    if (q < row_lo || q >= row_hi) continue;
    const double by = std::max(1.0 - std::abs(land.row - q), 0.0);
    for (int c = c0; c <= c0 + 1; ++c) {
      if (c < 0 || c >= width) continue;
      const double bx = std::max(1.0 - std::abs(land.col - c), 0.0);
      fn(c, q, bx, by);
    }
  }
}

void check_inputs(const SplatInput& in) {
  if (in.frame.width() != in.cam.width || in.frame.height() != in.cam.height ||
      !in.depth.same_shape(in.frame) || in.seg.width() != in.cam.width ||
      in.seg.height() != in.cam.height)
    throw std::invalid_argument("splat inputs differ in raster shape");
  if (in.motions.size() != in.seg.num_slots())
    throw std::invalid_argument("need one motion hypothesis per segmentation slot");
}

}  // namespace

Point3 pixel_target(const Point3& m, const SlotMotion& motion, const EgoMotion& ego) {
  const Point3 moved =
      yaw_matrix(motion.omega) * (m - motion.center) + motion.center + motion.velocity;
  return yaw_matrix(-ego.yaw_rate) * (moved - ego.velocity);
}

std::vector<SlotMotion> slot_motions(std::span<const ObjectState> states,
                                     std::span<const Kinematics> kinematics) {
  if (states.size() != kinematics.size())
    throw std::invalid_argument("need one kinematics estimate per object state");
  std::vector<SlotMotion> motions;
  motions.reserve(states.size() + 1);
  for (std::size_t k = 0; k < states.size(); ++k)
    motions.push_back({states[k].location, kinematics[k].velocity, kinematics[k].omega_point});
  motions.push_back(SlotMotion::background());
  return motions;
}

Landing land_pixel(int col, int row, double depth, const SlotMotion& motion, const EgoMotion& ego,
                   const CameraIntrinsics& cam) {
  // A pixel that does not move lands exactly on its own grid center; the
  // projection round trip would otherwise leave rounding residue.
  if (motion.velocity.isZero(0.0) && motion.omega == 0.0 && ego.velocity.isZero(0.0) &&
      ego.yaw_rate == 0.0) {
    if (!(depth > 0.0)) throw std::invalid_argument("depth must be positive");
    return {static_cast<double>(col), static_cast<double>(row), depth, true};
  }
  const Point3 m = pixel_to_point(cam.col_to_i(col), cam.row_to_j(row), depth, cam);
  const Point3 target = pixel_target(m, motion, ego);
  Landing landing;
  if (!(target.y() > 0.0)) return landing;
  const PixelProjection proj = point_to_pixel(target, cam);
  landing.col = cam.i_to_col(proj.i);
  landing.row = cam.j_to_row(proj.j);
  landing.distance = proj.depth;
  landing.valid = std::isfinite(landing.col) && std::isfinite(landing.row);
  return landing;
}

SplatResult splat(const SplatInput& in, int threads) {
  check_inputs(in);
  const int width = in.cam.width;
  const int height = in.cam.height;
  const std::size_t slots = in.seg.num_slots();

  const std::size_t pixels = in.frame.size();
  std::vector<Landing> landings(pixels * slots);
  parallel_chunks(static_cast<std::size_t>(height), threads, [&](std::size_t r0, std::size_t r1) {
    for (auto row = static_cast<int>(r0); row < static_cast<int>(r1); ++row)
      for (int col = 0; col < width; ++col) {
        const std::size_t p = static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                              static_cast<std::size_t>(col);
        for (std::size_t k = 0; k < slots; ++k) {
          if (in.seg.slots[k][p] == 0.0) continue;
          landings[p * slots + k] =
              land_pixel(col, row, in.depth[p], in.motions[k], in.ego, in.cam);
        }
      }
  });

  struct Accum {
    double r = 0.0, g = 0.0, b = 0.0;
    double den = 0.0;
    double depth = 0.0;
    double portion = 0.0;
  };
  std::vector<Accum> acc(pixels);

  // Each worker owns a band of target rows and replays every landing in
  // source order, so per-target sums never depend on the partition.
  parallel_chunks(static_cast<std::size_t>(height), threads, [&](std::size_t t0, std::size_t t1) {
    for (std::size_t p = 0; p < pixels; ++p) {
      const Rgb& color = in.frame[p];
      for (std::size_t k = 0; k < slots; ++k) {
        const double pi = in.seg.slots[k][p];
        if (pi == 0.0) continue;
        const Landing& land = landings[p * slots + k];
        const double occlusion = std::exp(-in.beta * land.distance);
        for_each_neighbor(land, width, height, static_cast<int>(t0), static_cast<int>(t1),
                          [&](int c, int q, double bx, double by) {
                            const double w = pi * occlusion * bx * by;
                            Accum& a = acc[static_cast<std::size_t>(q) *
                                               static_cast<std::size_t>(width) +
                                           static_cast<std::size_t>(c)];
                            a.r += w * color[0];
                            a.g += w * color[1];
                            a.b += w * color[2];
                            a.den += w;
                            a.depth += w * land.distance;
                            a.portion += pi * bx * by;
                          });
      }
    }
  });

  SplatResult out{Frame(width, height, Rgb{0.0, 0.0, 0.0}), DepthMap(width, height, 0.0),
                  Grid<double>(width, height, 0.0)};
  for (std::size_t p = 0; p < pixels; ++p) {
    const Accum& a = acc[p];
    if (a.den > 0.0) {
      out.image[p] = {a.r / a.den, a.g / a.den, a.b / a.den};
      out.depth[p] = a.depth / a.den;
    }
    out.weight[p] = std::min(1.0, a.portion);
  }
  return out;
}

double contributed_portion(const SplatInput& in, int col, int row) {
  check_inputs(in);
  const std::size_t p = static_cast<std::size_t>(row) * static_cast<std::size_t>(in.cam.width) +
                        static_cast<std::size_t>(col);
  double total = 0.0;
  for (std::size_t k = 0; k < in.seg.num_slots(); ++k) {
    const double pi = in.seg.slots[k][p];
    if (pi == 0.0) continue;
    const Landing land = land_pixel(col, row, in.depth[p], in.motions[k], in.ego, in.cam);
    for_each_neighbor(land, in.cam.width, in.cam.height, 0, in.cam.height,
                      [&](int, int, double bx, double by) { total += pi * bx * by; });
  }
  return total;
}

Frame merge(const Frame& warp, const Grid<double>& weight, const Frame& imag) {
  if (!warp.same_shape(imag) || !warp.same_shape(weight))
    throw std::invalid_argument("merge inputs differ in shape");
  Frame out(warp.width(), warp.height());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double w = weight[p];
    for (std::size_t c = 0; c < 3; ++c) out[p][c] = warp[p][c] * w + imag[p][c] * (1.0 - w);
  }
  return out;
}

DepthMap merge(const DepthMap& warp, const Grid<double>& weight, const DepthMap& imag) {
  if (!warp.same_shape(imag) || !warp.same_shape(weight))
    throw std::invalid_argument("merge inputs differ in shape");
  DepthMap out(warp.width(), warp.height());
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p] = warp[p] * weight[p] + imag[p] * (1.0 - weight[p]);
  return out;
}

}  // namespace scenepred
