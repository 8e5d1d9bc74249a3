#pragma once

#include <span>
#include <vector>

#include "scenepred/camgeo.hpp"
#include "scenepred/kinematics.hpp"
#include "scenepred/raster.hpp"

namespace scenepred {

/// Rigid motion hypothesis for one segmentation slot: rotate by `omega` about
/// `center`, then translate by `velocity`. The background slot is static.
struct SlotMotion {
  Point3 center = Point3::Zero();
  Vec3 velocity = Vec3::Zero();
  double omega = 0.0;

  static SlotMotion background() { return {}; }
};

/// Predicted camera-frame location of surface point `m` at the next frame:
/// M(-w_obs) [M(omega) (m - center) + center + velocity - v_obs].
Point3 pixel_target(const Point3& m, const SlotMotion& motion, const EgoMotion& ego);

/// Slot motions for K objects (from inferred states and kinematics) followed by
/// the static background.
std::vector<SlotMotion> slot_motions(std::span<const ObjectState> states,
                                     std::span<const Kinematics> kinematics);

struct SplatResult {
  Frame image;        // 0 where nothing landed
  DepthMap depth;     // 0 where nothing landed
  Grid<double> weight;  // warp weight in [0, 1]
};

struct SplatInput {
  const Frame& frame;
  const DepthMap& depth;
  const SegMap& seg;
  std::span<const SlotMotion> motions;  // one per segmentation slot
  const EgoMotion& ego;
  const CameraIntrinsics& cam;
  double beta = 1.0;
};

/// Forward-splats every source pixel portion to the four grid neighbors of its
/// predicted landing point. Contributions are accumulated per target in source
/// raster order, then slot order, so the result does not depend on `threads`.
SplatResult splat(const SplatInput& in, int threads = 1);

/// One (source pixel, slot) landing: continuous raster coordinates of the
/// predicted location and its distance from the camera. `valid` is false when
/// the point lands behind the camera.
struct Landing {
  double col = 0.0;
  double row = 0.0;
  double distance = 0.0;
  bool valid = false;
};

/// Landing of source raster pixel (col, row) under `motion`.
Landing land_pixel(int col, int row, double depth, const SlotMotion& motion, const EgoMotion& ego,
                   const CameraIntrinsics& cam);

/// Portion of source pixel (col, row) that reaches the target grid, summed
/// over slots; 1 when every landing has all four neighbors inside the raster.
double contributed_portion(const SplatInput& in, int col, int row);

/// warp * weight + imag * (1 - weight), per pixel and channel.
Frame merge(const Frame& warp, const Grid<double>& weight, const Frame& imag);
DepthMap merge(const DepthMap& warp, const Grid<double>& weight, const DepthMap& imag);

struct PredictionBundle {
  Frame warp_image;
  DepthMap warp_depth;
  Grid<double> warp_weight;
  Frame imag_image;
  DepthMap imag_depth;
  Frame merged_image;
  DepthMap merged_depth;
};

}  // namespace scenepred
