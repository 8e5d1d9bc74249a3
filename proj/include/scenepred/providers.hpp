#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scenepred/camgeo.hpp"
#include "scenepred/config.hpp"
#include "scenepred/kinematics.hpp"
#include "scenepred/raster.hpp"
#include "scenepred/scenesim.hpp"

namespace scenepred {

/// An image handed to a provider together with its position in the triplet
/// (0 = t-1, 1 = t, 2 = t+1). Single-image models ignore the index; ground
/// truth backed providers use it to look up the frame.
struct FrameRef {
  const Frame& image;
  std::size_t index = 0;
};

struct ObjectInference {
  SegMap seg;
  std::vector<ObjectState> states;  // one per foreground slot of seg
};

/// Stand-in for the learned depth and object-extraction networks.
class InferenceProvider {
 public:
  virtual ~InferenceProvider() = default;
  virtual DepthMap infer_depth(const FrameRef& frame) const = 0;
  virtual ObjectInference infer_objects(const FrameRef& frame) const = 0;
};

struct ImaginationInput {
  std::span<const Frame> masked_images;       // I * pi_k per slot
  std::span<const DepthMap> masked_log_depth;  // log(D) * pi_k per slot
  const SegMap& seg;
  std::span<const Kinematics> kinematics;
  const EgoMotion& ego;
};

/// Per-slot imagined appearance, depth and occupancy at the next frame.
struct ImaginationOutput {
  std::vector<Frame> images;
  std::vector<DepthMap> depths;
  SegMap seg;
};

class ImaginationProvider {
 public:
  virtual ~ImaginationProvider() = default;
  virtual ImaginationOutput imagine(const ImaginationInput& in) const = 0;
};

/// Sum over slots of the per-slot predictions weighted by their occupancy.
std::pair<Frame, DepthMap> compose_imagination(const ImaginationOutput& out);

/// Slices the frame and log-depth by each segmentation slot.
std::vector<Frame> mask_image(const Frame& image, const SegMap& seg);
std::vector<DepthMap> mask_log_depth(const DepthMap& depth, const SegMap& seg);

/// Admissible region for inferred object locations.
struct ViewLimits {
  double half_angle = 0.0;    // max |bearing| from the optical axis
  double max_distance = 0.0;

  static ViewLimits from_config(const Config& config);
  bool admits(const Point3& x) const;
  /// Nearest admissible point at the same height (bearing and range clamped).
  Point3 clamp(const Point3& x) const;
};

/// Deterministic identity code for a ground-truth object id: `scale` times a
/// unit vector (distinct axes for ids 1..10, hashed directions beyond).
IdentityCode identity_code_for(int id, double scale);

struct OracleOptions {
  std::size_t bins = 16;
  double identity_scale = 10.0;
};

/// Ground truth in place of inference: rendered depth, one-hot segmentation,
/// true locations, one-hot poses at the nearest bin, hashed identity codes.
class OracleProvider final : public InferenceProvider {
 public:
  OracleProvider(const Triplet& triplet, OracleOptions options);
  DepthMap infer_depth(const FrameRef& frame) const override;
  ObjectInference infer_objects(const FrameRef& frame) const override;

 private:
  const Triplet& triplet_;
  OracleOptions options_;
};

struct NoiseConfig {
  double depth = 0.0;     // std-dev of multiplicative log-normal noise
  double location = 0.0;  // std-dev of additive Gaussian noise per axis
  double pose = 0.0;      // radians; random rotation plus Von Mises blur
  double seg = 0.0;       // scale of additive half-normal noise before renormalizing

  bool zero() const { return depth == 0.0 && location == 0.0 && pose == 0.0 && seg == 0.0; }
  NoiseConfig scaled(double factor) const {
    return {depth * factor, location * factor, pose * factor, seg * factor};
  }
};

/// Perturbs another provider's outputs; deterministic in (seed, frame index).
/// Zero noise returns the base outputs unchanged.
class NoisyProvider final : public InferenceProvider {
 public:
  NoisyProvider(std::shared_ptr<const InferenceProvider> base, NoiseConfig noise,
                std::uint64_t seed, ViewLimits limits);
  DepthMap infer_depth(const FrameRef& frame) const override;
  ObjectInference infer_objects(const FrameRef& frame) const override;

 private:
  std::shared_ptr<const InferenceProvider> base_;
  NoiseConfig noise_;
  std::uint64_t seed_;
  ViewLimits limits_;
};

/// Reads externally produced inference from a directory:
///   depth{n}.pfm, seg{n}_{k}.pfm (k = 0..K, background last), objects{n}.json
/// where objects{n}.json is {"objects": [{"location", "pose", "identity"}...]}.
class FileProvider final : public InferenceProvider {
 public:
  explicit FileProvider(std::filesystem::path directory);
  DepthMap infer_depth(const FrameRef& frame) const override;
  ObjectInference infer_objects(const FrameRef& frame) const override;

  /// Writes `depth` and `objects` for frame `index` in the layout above.
  static void write(const std::filesystem::path& directory, std::size_t index,
                    const DepthMap& depth, const ObjectInference& objects);

 private:
  std::filesystem::path directory_;
};

/// Persistence baseline: predicts that the next frame equals the current one.
class BaselineImagination final : public ImaginationProvider {
 public:
  ImaginationOutput imagine(const ImaginationInput& in) const override;
};

/// Provider outputs checked against the raster and state invariants; throws
/// InvariantViolation describing the first failure.
DepthMap checked_depth(const InferenceProvider& provider, const FrameRef& frame,
                       const CameraIntrinsics& cam);
ObjectInference checked_objects(const InferenceProvider& provider, const FrameRef& frame,
                                const CameraIntrinsics& cam, std::size_t bins,
                                const ViewLimits& limits);

}  // namespace scenepred
