#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "scenepred/config.hpp"
#include "scenepred/kinematics.hpp"
#include "scenepred/losses.hpp"
#include "scenepred/objmatch.hpp"
#include "scenepred/providers.hpp"
#include "scenepred/scenesim.hpp"
#include "scenepred/warpengine.hpp"

namespace scenepred {

/// Textual provider selection:
///   oracle
///   noisy[:depth=S,location=S,pose=S,seg=S,seed=N]
///   files:PATH
struct ProviderSpec {
  enum class Kind { oracle, noisy, files };
  Kind kind = Kind::oracle;
  NoiseConfig noise;
  std::uint64_t seed = 0;
  std::filesystem::path path;

  /// Throws ConfigError on malformed text.
  static ProviderSpec parse(const std::string& text);
  std::string to_string() const;
};

/// Provider for one triplet. `files_dir` is where a files provider reads from;
/// noisy providers draw from a seed mixed with the triplet's identity.
std::unique_ptr<InferenceProvider> make_provider(const ProviderSpec& spec, const Triplet& triplet,
                                                 const Config& config,
                                                 const std::filesystem::path& files_dir);

/// Inference for one frame, checked at the provider seam.
struct FrameInference {
  DepthMap depth;
  ObjectInference objects;
};

FrameInference infer_frame(const Triplet& triplet, const InferenceProvider& provider,
                           std::size_t index, const Config& config);

/// Identity codes of the object slots followed by the zero background code.
std::vector<IdentityCode> slot_codes(std::span<const ObjectState> states);

std::vector<Point3> locations_of(std::span<const ObjectState> states);

struct TripletPrediction {
  MatchMatrix match;  // frame t against frame t-1
  std::vector<Kinematics> kinematics;
  std::vector<SlotMotion> motions;
  PredictionBundle bundle;
  std::vector<Point3> predicted_locations;         // K objects then background
  std::vector<PoseDistribution> predicted_poses;  // K objects then background
};

/// Two observed frames to the next: match, kinematics, splat, imagination,
/// merge, and the predicted object states.
TripletPrediction predict_triplet(const Triplet& triplet, const FrameInference& prev,
                                  const FrameInference& now, const ImaginationProvider& imagination,
                                  const Config& config, int threads = 1);

/// Mean squared error over pixels whose weight exceeds `threshold`; the pixel
/// count goes to `count`. Returns 0 when no pixel qualifies.
double weighted_region_mse(const Frame& pred, const Frame& truth, const Grid<double>& weight,
                           double threshold, std::size_t* count = nullptr);

inline constexpr double kConfidentWeight = 0.99;

/// Everything the per-triplet prediction report needs.
nlohmann::json prediction_summary(const Triplet& triplet, const TripletPrediction& prediction);

/// Per-frame segmentation scores and the paired values behind the correlation
/// metrics for one triplet.
struct TripletMetrics {
  std::vector<double> ari;  // frames where ARI-fg is defined
  std::vector<double> iou;  // every frame
  std::vector<double> depth_pred, depth_true;
  std::vector<double> angle_pred, angle_true;
  std::vector<double> distance_pred, distance_true;

  nlohmann::json to_json() const;
};

TripletMetrics evaluate_triplet(const Triplet& triplet, const InferenceProvider& provider,
                                const Config& config);

/// Means of the segmentation scores and Pearson correlations of the pooled
/// pairs; undefined entries are null.
nlohmann::json aggregate_metrics(std::span<const TripletMetrics> metrics);

/// Loss terms of one triplet that do not need a batch partner, and the frame-t
/// locations the collapse term compares.
struct TripletLossTerms {
  double image = 0.0;
  double location = 0.0;
  double pose = 0.0;
  double center = 0.0;
  std::vector<Point3> locations;
};

TripletLossTerms triplet_loss_terms(const Triplet& triplet, const InferenceProvider& provider,
                                    const ImaginationProvider& imagination, const Config& config,
                                    int threads = 1);

/// Collapse-loss partner for each of `count` triplets. Consecutive batches of
/// `batch_size` are shuffled into a seeded cycle so no triplet pairs with
/// itself; a trailing batch of one joins the previous batch. Throws
/// ConfigError when fewer than two triplets exist.
std::vector<std::size_t> batch_partners(std::size_t count, std::size_t batch_size,
                                        std::uint64_t seed);

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Configuration stored with a triplet with command-line overrides applied.
Config resolved_config(const Config& stored, const Overrides& overrides);

struct GenerateSummary {
  int scenes = 0;
  std::vector<std::filesystem::path> triplets;  // relative to the dataset root
};

/// Renders `n_scenes` scenes and writes every usable triplet under
/// out_dir/scene_####/triplet_####, plus a dataset.json index.
GenerateSummary cmd_generate(const Config& config, int n_scenes,
                             const std::filesystem::path& out_dir, int threads);

/// Writes the prediction rasters and summary.json to out_dir; returns the
/// summary.
nlohmann::json cmd_predict(const std::filesystem::path& triplet_dir, const ProviderSpec& provider,
                           const std::filesystem::path& out_dir, const Overrides& overrides,
                           int threads);

/// Per-triplet and aggregate segmentation and correlation metrics. A files
/// provider path is a root mirroring the dataset layout.
nlohmann::json cmd_evaluate(const std::filesystem::path& dataset, const ProviderSpec& provider,
                            const Overrides& overrides, int threads);

/// Per-triplet loss reports and their means.
nlohmann::json cmd_losses(const std::filesystem::path& dataset, const ProviderSpec& provider,
                          const Overrides& overrides, int threads, bool collapse = true);

}  // namespace scenepred
