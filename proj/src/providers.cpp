#include "scenepred/providers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scenepred/errors.hpp"
#include "scenepred/io.hpp"
#include "scenepred/random.hpp"

namespace scenepred {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string frame_tag(const FrameRef& frame) { return "frame " + std::to_string(frame.index); }

std::filesystem::path indexed(const std::filesystem::path& dir, const std::string& stem,
                              std::size_t index, const std::string& ext) {
  return dir / (stem + std::to_string(index) + ext);
}

std::filesystem::path seg_path(const std::filesystem::path& dir, std::size_t index,
                               std::size_t slot) {
  return dir / ("seg" + std::to_string(index) + "_" + std::to_string(slot) + ".pfm");
}

// Circular Von Mises blur of a bin distribution, centered at `shift` radians.
std::vector<double> blur_pose(const std::vector<double>& probs, double shift, double kappa) {
  const std::size_t b = probs.size();
  std::vector<double> out(b, 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < b; ++m) {
    double acc = 0.0;
    for (std::size_t l = 0; l < b; ++l) {
      if (probs[l] == 0.0) continue;
      const double gap = kTwoPi * (static_cast<double>(m) - static_cast<double>(l)) /
                         static_cast<double>(b);
      acc += probs[l] * std::exp(kappa * (std::cos(gap - shift) - 1.0));
    }
    out[m] = acc;
    total += acc;
  }
  for (double& p : out) p /= total;
  return out;
}

}  // namespace

std::pair<Frame, DepthMap> compose_imagination(const ImaginationOutput& out) {
  const std::size_t slots = out.seg.num_slots();
  if (slots == 0 || out.images.size() != slots || out.depths.size() != slots)
    throw std::invalid_argument("imagination output slot counts disagree");
  const int w = out.seg.width();
  const int h = out.seg.height();
  Frame image(w, h, Rgb{0.0, 0.0, 0.0});
  DepthMap depth(w, h, 0.0);
  for (std::size_t k = 0; k < slots; ++k) {
    if (!out.images[k].same_shape(out.seg.slots[k]) || !out.depths[k].same_shape(out.seg.slots[k]))
      throw std::invalid_argument("imagination output raster shapes disagree");
    for (std::size_t p = 0; p < image.size(); ++p) {
      const double pi = out.seg.slots[k][p];
      for (int c = 0; c < 3; ++c) image[p][c] += pi * out.images[k][p][c];
      depth[p] += pi * out.depths[k][p];
    }
  }
  return {std::move(image), std::move(depth)};
}

std::vector<Frame> mask_image(const Frame& image, const SegMap& seg) {
  std::vector<Frame> out;
  out.reserve(seg.num_slots());
  for (const auto& slot : seg.slots) {
    Frame masked(image.width(), image.height());
    for (std::size_t p = 0; p < image.size(); ++p)
      for (int c = 0; c < 3; ++c) masked[p][c] = image[p][c] * slot[p];
    out.push_back(std::move(masked));
  }
  return out;
}

std::vector<DepthMap> mask_log_depth(const DepthMap& depth, const SegMap& seg) {
  std::vector<DepthMap> out;
  out.reserve(seg.num_slots());
  for (const auto& slot : seg.slots) {
    DepthMap masked(depth.width(), depth.height());
    for (std::size_t p = 0; p < depth.size(); ++p) masked[p] = std::log(depth[p]) * slot[p];
    out.push_back(std::move(masked));
  }
  return out;
}

ViewLimits ViewLimits::from_config(const Config& config) {
  return {0.5 * config.view_angle_factor * config.fov, config.max_object_distance};
}

bool ViewLimits::admits(const Point3& x) const {
  return x.allFinite() && x.y() > 0.0 && std::abs(std::atan2(x.x(), x.y())) <= half_angle &&
         x.norm() <= max_distance;
}

Point3 ViewLimits::clamp(const Point3& x) const {
  const double bearing = std::clamp(std::atan2(x.x(), x.y()), -half_angle, half_angle);
  // Keep a sliver in front of the camera so the bearing stays defined.
  const double ground = std::max(std::hypot(x.x(), x.y()), 1e-3);
  Point3 out(ground * std::sin(bearing), ground * std::cos(bearing), x.z());
  const double r = out.norm();
  if (r > max_distance) out *= max_distance / r;
  // Rounding can leave a boundary point a hair outside; pull it inward.
  for (double shrink = 1.0 - 1e-12; !admits(out) && out.allFinite(); shrink -= 1e-12) {
    const double b = bearing * shrink;
    const double g = std::hypot(out.x(), out.y()) * shrink;
    out = Point3(g * std::sin(b), g * std::cos(b), out.z() * shrink);
  }
  return out;
}

IdentityCode identity_code_for(int id, double scale) {
  IdentityCode code = IdentityCode::Zero();
  if (id >= 1 && id <= kIdentityDims) {
    code[id - 1] = scale;
    return code;
  }
  Rng rng(derive_seed(0x1d, {static_cast<std::uint64_t>(static_cast<std::int64_t>(id))}));
  for (int d = 0; d < kIdentityDims; ++d) code[d] = rng.normal();
  return code * (scale / code.norm());
}

OracleProvider::OracleProvider(const Triplet& triplet, OracleOptions options)
    : triplet_(triplet), options_(options) {}

DepthMap OracleProvider::infer_depth(const FrameRef& frame) const {
  if (frame.index > 2) throw std::out_of_range("oracle: frame index out of range");
  return triplet_.frames[frame.index].depth;
}

ObjectInference OracleProvider::infer_objects(const FrameRef& frame) const {
  if (frame.index > 2) throw std::out_of_range("oracle: frame index out of range");
  const auto& truth = triplet_.truth[frame.index];
  ObjectInference out;
  out.seg = seg_from_labels(triplet_.frames[frame.index].labels, truth.size());
  out.states.reserve(truth.size());
  for (const auto& t : truth) {
    ObjectState s;
    s.location = t.location;
    s.pose = PoseDistribution::one_hot(t.pose, options_.bins);
    s.identity = identity_code_for(t.id, options_.identity_scale);
    out.states.push_back(std::move(s));
  }
  return out;
}

NoisyProvider::NoisyProvider(std::shared_ptr<const InferenceProvider> base, NoiseConfig noise,
                             std::uint64_t seed, ViewLimits limits)
    : base_(std::move(base)), noise_(noise), seed_(seed), limits_(limits) {
  if (!base_) throw std::invalid_argument("noisy provider needs a base provider");
  if (noise_.depth < 0.0 || noise_.location < 0.0 || noise_.pose < 0.0 || noise_.seg < 0.0)
    throw std::invalid_argument("noise scales must be non-negative");
}

DepthMap NoisyProvider::infer_depth(const FrameRef& frame) const {
  DepthMap depth = base_->infer_depth(frame);
  if (noise_.depth == 0.0) return depth;
  Rng rng(derive_seed(seed_, {frame.index, 1}));
  for (double& d : depth.data()) d *= std::exp(noise_.depth * rng.normal());
  return depth;
}

ObjectInference NoisyProvider::infer_objects(const FrameRef& frame) const {
  ObjectInference out = base_->infer_objects(frame);
  if (noise_.seg > 0.0) {
    Rng rng(derive_seed(seed_, {frame.index, 2}));
    const std::size_t pixels = out.seg.slots.empty() ? 0 : out.seg.slots.front().size();
    for (std::size_t p = 0; p < pixels; ++p) {
      double total = 0.0;
      for (auto& slot : out.seg.slots) {
        slot[p] += noise_.seg * std::abs(rng.normal());
        total += slot[p];
      }
      for (auto& slot : out.seg.slots) slot[p] /= total;
    }
  }
  if (noise_.location > 0.0) {
    Rng rng(derive_seed(seed_, {frame.index, 3}));
    for (auto& s : out.states) {
      const Point3 noisy = s.location + noise_.location * Point3(rng.normal(), rng.normal(),
                                                                 rng.normal());
      s.location = limits_.clamp(noisy);
    }
  }
  if (noise_.pose > 0.0) {
    Rng rng(derive_seed(seed_, {frame.index, 4}));
    const double kappa = 1.0 / (noise_.pose * noise_.pose);
    for (auto& s : out.states) {
      const double shift = noise_.pose * rng.normal();
      s.pose.probs = blur_pose(s.pose.probs, shift, kappa);
    }
  }
  return out;
}

FileProvider::FileProvider(std::filesystem::path directory) : directory_(std::move(directory)) {}

DepthMap FileProvider::infer_depth(const FrameRef& frame) const {
  return read_pfm(indexed(directory_, "depth", frame.index, ".pfm"));
}

ObjectInference FileProvider::infer_objects(const FrameRef& frame) const {
  const auto meta_path = indexed(directory_, "objects", frame.index, ".json");
  const nlohmann::json meta = read_json(meta_path);
  ObjectInference out;
  try {
    for (const auto& o : meta.at("objects")) out.states.push_back(object_state_from_json(o));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(meta_path.string() + ": " + e.what());
  }
  for (std::size_t k = 0; k <= out.states.size(); ++k)
    out.seg.slots.push_back(read_pfm(seg_path(directory_, frame.index, k)));
  return out;
}

void FileProvider::write(const std::filesystem::path& directory, std::size_t index,
                         const DepthMap& depth, const ObjectInference& objects) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  write_file_atomic(indexed(directory, "depth", index, ".pfm"), encode_pfm(depth));
  for (std::size_t k = 0; k < objects.seg.num_slots(); ++k)
    write_file_atomic(seg_path(directory, index, k), encode_pfm(objects.seg.slots[k]));
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : objects.states) list.push_back(to_json(s));
  write_file_atomic(indexed(directory, "objects", index, ".json"),
                    dump_json({{"objects", list}}));
}

ImaginationOutput BaselineImagination::imagine(const ImaginationInput& in) const {
  const std::size_t slots = in.seg.num_slots();
  if (in.masked_images.size() != slots || in.masked_log_depth.size() != slots)
    throw std::invalid_argument("imagination input slot counts disagree");
  const int w = in.seg.width();
  const int h = in.seg.height();
  // Reassemble the unmasked frame; every slot then carries the whole frame.
  Frame image(w, h, Rgb{0.0, 0.0, 0.0});
  DepthMap log_depth(w, h, 0.0);
  for (std::size_t k = 0; k < slots; ++k)
    for (std::size_t p = 0; p < image.size(); ++p) {
      for (int c = 0; c < 3; ++c) image[p][c] += in.masked_images[k][p][c];
      log_depth[p] += in.masked_log_depth[k][p];
    }
  DepthMap depth(w, h);
  for (std::size_t p = 0; p < depth.size(); ++p) depth[p] = std::exp(log_depth[p]);

  ImaginationOutput out;
  out.images.assign(slots, image);
  out.depths.assign(slots, depth);
  out.seg = in.seg;
  return out;
}

DepthMap checked_depth(const InferenceProvider& provider, const FrameRef& frame,
                       const CameraIntrinsics& cam) {
  DepthMap depth = provider.infer_depth(frame);
  if (depth.width() != cam.width || depth.height() != cam.height)
    throw InvariantViolation(frame_tag(frame) + ": depth map is " + std::to_string(depth.width()) +
                             "x" + std::to_string(depth.height()) + ", expected " +
                             std::to_string(cam.width) + "x" + std::to_string(cam.height));
  for (std::size_t p = 0; p < depth.size(); ++p)
    if (!std::isfinite(depth[p]) || !(depth[p] > 0.0))
      throw InvariantViolation(frame_tag(frame) + ": depth at pixel " + std::to_string(p) +
                               " is not a positive finite distance");
  return depth;
}

ObjectInference checked_objects(const InferenceProvider& provider, const FrameRef& frame,
                                const CameraIntrinsics& cam, std::size_t bins,
                                const ViewLimits& limits) {
  ObjectInference out = provider.infer_objects(frame);
  const std::string tag = frame_tag(frame);
  if (out.seg.num_slots() < 1) throw InvariantViolation(tag + ": segmentation has no slots");
  if (out.seg.width() != cam.width || out.seg.height() != cam.height)
    throw InvariantViolation(tag + ": segmentation raster size does not match the camera");
  try {
    check_seg_simplex(out.seg, 1e-6);
  } catch (const std::invalid_argument& e) {
    throw InvariantViolation(tag + ": " + e.what());
  }
  if (out.states.size() != out.seg.num_objects())
    throw InvariantViolation(tag + ": " + std::to_string(out.states.size()) +
                             " object states for " + std::to_string(out.seg.num_objects()) +
                             " segmentation slots");
  for (std::size_t k = 0; k < out.states.size(); ++k) {
    const auto& s = out.states[k];
    const std::string who = tag + ", object " + std::to_string(k);
    if (s.pose.bins() != bins)
      throw InvariantViolation(who + ": pose has " + std::to_string(s.pose.bins()) +
                               " bins, expected " + std::to_string(bins));
    try {
      s.pose.validate(1e-6);
    } catch (const std::invalid_argument& e) {
      throw InvariantViolation(who + ": " + e.what());
    }
    if (!limits.admits(s.location))
      throw InvariantViolation(who + ": location outside the admissible view");
    if (!s.identity.allFinite()) throw InvariantViolation(who + ": identity code is not finite");
  }
  return out;
}

}  // namespace scenepred
