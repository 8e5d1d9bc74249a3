#include "scenepred/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "scenepred/errors.hpp"
#include "scenepred/evalmetrics.hpp"
#include "scenepred/io.hpp"
#include "scenepred/parallel.hpp"
#include "scenepred/random.hpp"

namespace scenepred {
namespace fs = std::filesystem;
namespace {

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("provider option '" + key + "' has bad value '" + value + "'");
}

std::string directory_name(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu", prefix, index);
  return buf;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> mean_of(std::span<const double> v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> try_pearson(std::span<const double> a, std::span<const double> b) {
  try {
    return pearson(a, b);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

template <typename T>
void append(std::vector<T>& to, const std::vector<T>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

std::vector<fs::path> dataset_triplets(const fs::path& dataset) {
  if (!fs::is_directory(dataset)) throw IoError(dataset.string() + ": no such dataset directory");
  auto dirs = list_triplets(dataset);
  if (dirs.empty()) throw IoError(dataset.string() + ": dataset holds no triplets");
  return dirs;
}

fs::path files_dir_for(const ProviderSpec& spec, const fs::path& dataset, const fs::path& triplet) {
  if (spec.kind != ProviderSpec::Kind::files) return {};
  return spec.path / fs::relative(triplet, dataset);
}

}  // namespace

ProviderSpec ProviderSpec::parse(const std::string& text) {
  ProviderSpec spec;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "oracle") {
    if (!rest.empty()) throw ConfigError("the oracle provider takes no options");
    spec.kind = Kind::oracle;
  } else if (head == "files") {
    if (rest.empty()) throw ConfigError("files provider needs a path: files:PATH");
    spec.kind = Kind::files;
    spec.path = rest;
  } else if (head == "noisy") {
    spec.kind = Kind::noisy;
    std::stringstream items(rest);
    std::string item;
    while (std::getline(items, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("noisy provider option '" + item + "' lacks '='");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (key == "seed") {
        const double s = parse_number(key, value);
        if (s < 0.0 || s != std::floor(s)) throw ConfigError("seed must be a non-negative integer");
        spec.seed = static_cast<std::uint64_t>(std::stoull(value));
        continue;
      }
      const double v = parse_number(key, value);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError("noise scale '" + key + "' must be finite and non-negative");
      if (key == "depth") spec.noise.depth = v;
      else if (key == "location") spec.noise.location = v;
      else if (key == "pose") spec.noise.pose = v;
      else if (key == "seg") spec.noise.seg = v;
      else throw ConfigError("unknown noisy provider option '" + key + "'");
    }
  } else {
    throw ConfigError("unknown provider '" + head + "' (expected oracle, noisy:..., files:PATH)");
  }
  return spec;
}

std::string ProviderSpec::to_string() const {
  switch (kind) {
    case Kind::oracle:
      return "oracle";
    case Kind::files:
      return "files:" + path.string();
    case Kind::noisy: {
      std::ostringstream out;
      out.precision(17);
      out << "noisy:depth=" << noise.depth << ",location=" << noise.location
          << ",pose=" << noise.pose << ",seg=" << noise.seg << ",seed=" << seed;
      return out.str();
    }
  }
  return "";
}

std::unique_ptr<InferenceProvider> make_provider(const ProviderSpec& spec, const Triplet& triplet,
                                                 const Config& config, const fs::path& files_dir) {
  const OracleOptions options{static_cast<std::size_t>(config.bins), config.identity_code_scale};
  switch (spec.kind) {
    case ProviderSpec::Kind::oracle:
      return std::make_unique<OracleProvider>(triplet, options);
    case ProviderSpec::Kind::files:
      return std::make_unique<FileProvider>(files_dir);
    case ProviderSpec::Kind::noisy: {
      const std::uint64_t seed =
          derive_seed(spec.seed, {static_cast<std::uint64_t>(triplet.scene_index),
                                  static_cast<std::uint64_t>(triplet.stride),
                                  static_cast<std::uint64_t>(triplet.frame_indices[0])});
      return std::make_unique<NoisyProvider>(std::make_shared<OracleProvider>(triplet, options),
                                             spec.noise, seed, ViewLimits::from_config(config));
    }
  }
  throw ConfigError("unknown provider kind");
}

FrameInference infer_frame(const Triplet& triplet, const InferenceProvider& provider,
                           std::size_t index, const Config& config) {
  const FrameRef ref{triplet.frames.at(index).image, index};
  FrameInference out;
  out.depth = checked_depth(provider, ref, triplet.camera);
  out.objects = checked_objects(provider, ref, triplet.camera, static_cast<std::size_t>(config.bins),
                                ViewLimits::from_config(config));
  return out;
}

std::vector<IdentityCode> slot_codes(std::span<const ObjectState> states) {
  std::vector<IdentityCode> codes;
  codes.reserve(states.size() + 1);
  for (const auto& s : states) codes.push_back(s.identity);
  codes.push_back(IdentityCode::Zero());
  return codes;
}

std::vector<Point3> locations_of(std::span<const ObjectState> states) {
  std::vector<Point3> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.location);
  return out;
}

TripletPrediction predict_triplet(const Triplet& triplet, const FrameInference& prev,
                                  const FrameInference& now, const ImaginationProvider& imagination,
                                  const Config& config, int threads) {
  const auto& states_prev = prev.objects.states;
  const auto& states_now = now.objects.states;
  if (states_prev.size() != states_now.size())
    throw InvariantViolation("slot counts differ between the two observed frames");
  const std::size_t k_objects = states_now.size();
  const EgoMotion& ego_prev = triplet.ego[0];
  const EgoMotion& ego_next = triplet.ego[1];

  TripletPrediction out;
  out.match = match_scores(slot_codes(states_now), slot_codes(states_prev), config.sigma_rbf);
  const KinematicsParams params{config.kappa_prior};
  for (std::size_t k = 0; k < k_objects; ++k) {
    const std::vector<double> row = out.match.row(k);
    out.kinematics.push_back(estimate_kinematics(states_now[k], states_prev, row, ego_prev, params));
  }
  out.motions = slot_motions(states_now, out.kinematics);

  const Frame& image = triplet.frames[1].image;
  const SplatInput input{image,       now.depth,       now.objects.seg, out.motions,
                         ego_next,    triplet.camera,  config.beta};
  SplatResult warped = splat(input, threads);

  const std::vector<Frame> masked = mask_image(image, now.objects.seg);
  const std::vector<DepthMap> masked_log = mask_log_depth(now.depth, now.objects.seg);
  const ImaginationInput imag_in{masked, masked_log, now.objects.seg, out.kinematics, ego_next};
  const ImaginationOutput imagined = imagination.imagine(imag_in);
  try {
    check_seg_simplex(imagined.seg, 1e-6);
  } catch (const std::invalid_argument& e) {
    throw InvariantViolation(std::string("imagination: ") + e.what());
  }
  auto [imag_image, imag_depth] = compose_imagination(imagined);

  auto& b = out.bundle;
  b.merged_image = merge(warped.image, warped.weight, imag_image);
  b.merged_depth = merge(warped.depth, warped.weight, imag_depth);
  b.warp_image = std::move(warped.image);
  b.warp_depth = std::move(warped.depth);
  b.warp_weight = std::move(warped.weight);
  b.imag_image = std::move(imag_image);
  b.imag_depth = std::move(imag_depth);

  const double kappa = config.effective_kappa_interp();
  for (std::size_t k = 0; k < k_objects; ++k) {
    out.predicted_locations.push_back(
        predict_location(states_now[k].location, out.kinematics[k].velocity, ego_next));
    out.predicted_poses.push_back(
        predict_pose(states_now[k].pose, out.kinematics[k].angular, ego_next.yaw_rate, kappa));
  }
  out.predicted_locations.push_back(predict_location(Point3::Zero(), Vec3::Zero(), ego_next));
  out.predicted_poses.push_back(PoseDistribution::uniform(static_cast<std::size_t>(config.bins)));
  return out;
}

double weighted_region_mse(const Frame& pred, const Frame& truth, const Grid<double>& weight,
                           double threshold, std::size_t* count) {
  if (!pred.same_shape(truth) || !pred.same_shape(weight))
    throw std::invalid_argument("weighted_region_mse: shape mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!(weight[p] > threshold)) continue;
    for (int c = 0; c < 3; ++c) {
      const double d = pred[p][c] - truth[p][c];
      sum += d * d;
    }
    ++n;
  }
  if (count) *count = n;
  return n == 0 ? 0.0 : sum / (3.0 * static_cast<double>(n));
}

nlohmann::json prediction_summary(const Triplet& triplet, const TripletPrediction& prediction) {
  const auto& b = prediction.bundle;
  const Frame& truth = triplet.frames[2].image;
  std::size_t confident = 0;
  const double mse_confident =
      weighted_region_mse(b.merged_image, truth, b.warp_weight, kConfidentWeight, &confident);
  double weight_sum = 0.0;
  for (double w : b.warp_weight.data()) weight_sum += w;

  nlohmann::json objects = nlohmann::json::array();
  for (std::size_t k = 0; k < prediction.kinematics.size(); ++k) {
    const auto& kin = prediction.kinematics[k];
    objects.push_back({{"slot", k},
                       {"velocity", to_json(kin.velocity)},
                       {"omega", kin.omega_point},
                       {"angular_offset", kin.angular.offset},
                       {"angular", kin.angular.probs},
                       {"predicted_location", to_json(prediction.predicted_locations[k])},
                       {"predicted_pose", prediction.predicted_poses[k].probs}});
  }
  nlohmann::json match = nlohmann::json::array();
  for (std::size_t k = 0; k < prediction.match.rows(); ++k) match.push_back(prediction.match.row(k));

  return {{"mse_merged", image_loss(b.merged_image, truth)},
          {"mse_merged_confident", mse_confident},
          {"confident_pixels", confident},
          {"confident_threshold", kConfidentWeight},
          {"mean_warp_weight", weight_sum / static_cast<double>(b.warp_weight.size())},
          {"match", match},
          {"objects", objects},
          {"background_predicted_location", to_json(prediction.predicted_locations.back())}};
}

nlohmann::json TripletMetrics::to_json() const {
  return {{"ari_fg", optional_number(mean_of(ari))},
          {"ari_frames", ari.size()},
          {"mean_iou", optional_number(mean_of(iou))},
          {"depth_pearson", optional_number(try_pearson(depth_pred, depth_true))},
          {"angle_pearson", optional_number(try_pearson(angle_pred, angle_true))},
          {"distance_pearson", optional_number(try_pearson(distance_pred, distance_true))},
          {"object_pairs", angle_pred.size()}};
}

TripletMetrics evaluate_triplet(const Triplet& triplet, const InferenceProvider& provider,
                                const Config& config) {
  TripletMetrics m;
  for (std::size_t f = 0; f < 3; ++f) {
    const FrameInference inf = infer_frame(triplet, provider, f, config);
    const LabelMap& truth_labels = triplet.frames[f].labels;
    const SegEvalResult seg = evaluate_segmentation(labels_from_seg(inf.objects.seg), truth_labels);
    if (seg.ari_defined) m.ari.push_back(seg.ari_fg);
    m.iou.push_back(seg.mean_iou);

    append(m.depth_pred, inf.depth.data());
    append(m.depth_true, triplet.frames[f].depth.data());

    for (const auto& e : seg.per_entity) {
      if (e.truth_label == 0 || e.pred_label < 1) continue;
      const auto slot = static_cast<std::size_t>(e.pred_label - 1);
      if (slot >= inf.objects.states.size()) continue;
      const auto truth = std::find_if(triplet.truth[f].begin(), triplet.truth[f].end(),
                                      [&](const TruthObject& t) { return t.id == e.truth_label; });
      if (truth == triplet.truth[f].end()) continue;
      const Polar p = polar_decompose(inf.objects.states[slot].location);
      const Polar t = polar_decompose(truth->location);
      m.angle_pred.push_back(p.viewing_angle);
      m.angle_true.push_back(t.viewing_angle);
      m.distance_pred.push_back(p.distance);
      m.distance_true.push_back(t.distance);
    }
  }
  return m;
}

nlohmann::json aggregate_metrics(std::span<const TripletMetrics> metrics) {
  TripletMetrics pooled;
  for (const auto& m : metrics) {
    append(pooled.ari, m.ari);
    append(pooled.iou, m.iou);
    append(pooled.depth_pred, m.depth_pred);
    append(pooled.depth_true, m.depth_true);
    append(pooled.angle_pred, m.angle_pred);
    append(pooled.angle_true, m.angle_true);
    append(pooled.distance_pred, m.distance_pred);
    append(pooled.distance_true, m.distance_true);
  }
  nlohmann::json out = pooled.to_json();
  out["triplets"] = metrics.size();
  out["frames"] = pooled.iou.size();
  return out;
}

TripletLossTerms triplet_loss_terms(const Triplet& triplet, const InferenceProvider& provider,
                                    const ImaginationProvider& imagination, const Config& config,
                                    int threads) {
  const FrameInference f0 = infer_frame(triplet, provider, 0, config);
  const FrameInference f1 = infer_frame(triplet, provider, 1, config);
  const FrameInference f2 = infer_frame(triplet, provider, 2, config);
  if (f2.objects.states.size() != f1.objects.states.size())
    throw InvariantViolation("slot counts differ between frames t and t+1");
  const TripletPrediction pred = predict_triplet(triplet, f0, f1, imagination, config, threads);

  const MatchMatrix match_next = match_scores(slot_codes(f2.objects.states),
                                              slot_codes(f1.objects.states), config.sigma_rbf);
  std::vector<PoseDistribution> poses_next;
  for (const auto& s : f2.objects.states) poses_next.push_back(s.pose);

  TripletLossTerms out;
  out.locations = locations_of(f1.objects.states);
  out.image = image_loss(pred.bundle.merged_image, triplet.frames[2].image);
  out.location = location_loss(pred.predicted_locations, locations_of(f2.objects.states), match_next);
  out.pose = pose_loss(pred.predicted_poses, poses_next, match_next);
  out.center = center_loss(out.locations, f1.objects.seg, f1.depth, triplet.camera);
  return out;
}

std::vector<std::size_t> batch_partners(std::size_t count, std::size_t batch_size,
                                        std::uint64_t seed) {
  if (count < 2) throw ConfigError("the collapse term needs at least two triplets per batch");
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2 for the collapse term");
  std::vector<std::pair<std::size_t, std::size_t>> batches;
  for (std::size_t begin = 0; begin < count; begin += batch_size)
    batches.emplace_back(begin, std::min(count, begin + batch_size));
  if (batches.size() > 1 && batches.back().second - batches.back().first == 1) {
    batches[batches.size() - 2].second = count;
    batches.pop_back();
  }
  std::vector<std::size_t> partner(count);
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto [begin, end] = batches[b];
    std::vector<std::size_t> order(end - begin);
    std::iota(order.begin(), order.end(), begin);
    Rng rng(derive_seed(seed, {0xba7c4, b}));
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    for (std::size_t i = 0; i < order.size(); ++i) partner[order[i]] = order[(i + 1) % order.size()];
  }
  return partner;
}

Config resolved_config(const Config& stored, const Overrides& overrides) {
  Config c = stored;
  for (const auto& [key, value] : overrides) c.set(key, value);
  c.finalize();
  return c;
}

GenerateSummary cmd_generate(const Config& config, int n_scenes, const fs::path& out_dir,
                             int threads) {
  if (n_scenes < 1) throw ConfigError("scene count must be positive");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError("cannot create " + out_dir.string() + (ec ? ": " + ec.message() : ""));

  const CameraIntrinsics cam = config.intrinsics();
  const auto scenes = static_cast<std::size_t>(n_scenes);
  // Scene-level workers when there are enough scenes, otherwise row-parallel
  // rendering; both give identical bytes.
  const bool per_scene = scenes >= static_cast<std::size_t>(std::max(threads, 1));
  const int render_threads = per_scene ? 1 : threads;
  std::vector<std::vector<fs::path>> written(scenes);
  parallel_chunks(scenes, per_scene ? threads : 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const SceneSpec spec = generate_scene(config, derive_seed(config.seed, {s}));
      const auto frames = render_sequence(spec, cam, render_threads);
      const auto triplets = make_triplets(spec, frames, config, static_cast<int>(s));
      const fs::path scene_rel = directory_name("scene", s);
      std::error_code scene_ec;
      fs::create_directories(out_dir / scene_rel, scene_ec);
      if (scene_ec) throw IoError("cannot create " + (out_dir / scene_rel).string());
      for (std::size_t t = 0; t < triplets.size(); ++t) {
        const fs::path rel = scene_rel / directory_name("triplet", t);
        save_triplet(out_dir / rel, triplets[t], config);
        written[s].push_back(rel);
      }
    }
  });

  GenerateSummary summary;
  summary.scenes = n_scenes;
  nlohmann::json index = nlohmann::json::array();
  for (const auto& scene : written)
    for (const auto& rel : scene) {
      summary.triplets.push_back(rel);
      index.push_back(rel.generic_string());
    }
  const nlohmann::json dataset = {{"format_version", kFormatVersion},
                                  {"tool_version", kToolVersion},
                                  {"seed", config.seed},
                                  {"scenes", n_scenes},
                                  {"triplets", index},
                                  {"config", config.to_json()}};
  write_file_atomic(out_dir / "dataset.json", dump_json(dataset));
  return summary;
}

nlohmann::json cmd_predict(const fs::path& triplet_dir, const ProviderSpec& provider,
                           const fs::path& out_dir, const Overrides& overrides, int threads) {
  const StoredTriplet stored = load_triplet(triplet_dir);
  const Config config = resolved_config(stored.config, overrides);
  const auto inference = make_provider(provider, stored.triplet, config, provider.path);
  const FrameInference prev = infer_frame(stored.triplet, *inference, 0, config);
  const FrameInference now = infer_frame(stored.triplet, *inference, 1, config);
  const BaselineImagination imagination;
  const TripletPrediction pred =
      predict_triplet(stored.triplet, prev, now, imagination, config, threads);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError("cannot create " + out_dir.string() + (ec ? ": " + ec.message() : ""));
  const auto& b = pred.bundle;
  write_file_atomic(out_dir / "warp_image.ppm", encode_ppm(b.warp_image));
  write_file_atomic(out_dir / "warp_depth.pfm", encode_pfm(b.warp_depth));
  write_file_atomic(out_dir / "warp_weight.pfm", encode_pfm(b.warp_weight));
  write_file_atomic(out_dir / "imag_image.ppm", encode_ppm(b.imag_image));
  write_file_atomic(out_dir / "imag_depth.pfm", encode_pfm(b.imag_depth));
  write_file_atomic(out_dir / "merged_image.ppm", encode_ppm(b.merged_image));
  write_file_atomic(out_dir / "merged_depth.pfm", encode_pfm(b.merged_depth));

  nlohmann::json summary = prediction_summary(stored.triplet, pred);
  summary["format_version"] = kFormatVersion;
  summary["tool_version"] = kToolVersion;
  summary["triplet"] = triplet_dir.generic_string();
  summary["provider"] = provider.to_string();
  summary["config"] = config.to_json();
  write_file_atomic(out_dir / "summary.json", dump_json(summary));
  return summary;
}

nlohmann::json cmd_evaluate(const fs::path& dataset, const ProviderSpec& provider,
                            const Overrides& overrides, int threads) {
  const auto dirs = dataset_triplets(dataset);
  std::vector<TripletMetrics> metrics(dirs.size());
  std::vector<Config> configs(dirs.size());
  parallel_chunks(dirs.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const StoredTriplet stored = load_triplet(dirs[i]);
      configs[i] = resolved_config(stored.config, overrides);
      const auto inference =
          make_provider(provider, stored.triplet, configs[i], files_dir_for(provider, dataset, dirs[i]));
      metrics[i] = evaluate_triplet(stored.triplet, *inference, configs[i]);
    }
  });

  nlohmann::json per_triplet = nlohmann::json::array();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    nlohmann::json entry = metrics[i].to_json();
    entry["triplet"] = fs::relative(dirs[i], dataset).generic_string();
    per_triplet.push_back(entry);
  }
  return {{"format_version", kFormatVersion},
          {"tool_version", kToolVersion},
          {"provider", provider.to_string()},
          {"config", configs.front().to_json()},
          {"per_triplet", per_triplet},
          {"aggregate", aggregate_metrics(metrics)}};
}

nlohmann::json cmd_losses(const fs::path& dataset, const ProviderSpec& provider,
                          const Overrides& overrides, int threads, bool collapse) {
  const auto dirs = dataset_triplets(dataset);
  std::vector<TripletLossTerms> terms(dirs.size());
  std::vector<Config> configs(dirs.size());
  parallel_chunks(dirs.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const StoredTriplet stored = load_triplet(dirs[i]);
      configs[i] = resolved_config(stored.config, overrides);
      const auto inference =
          make_provider(provider, stored.triplet, configs[i], files_dir_for(provider, dataset, dirs[i]));
      const BaselineImagination imagination;
      terms[i] = triplet_loss_terms(stored.triplet, *inference, imagination, configs[i]);
    }
  });

  const Config& config = configs.front();
  std::vector<std::size_t> partner;
  if (collapse)
    partner = batch_partners(dirs.size(), static_cast<std::size_t>(config.batch_size),
                             derive_seed(config.seed, {0x5ff1e}));

  nlohmann::json per_triplet = nlohmann::json::array();
  LossReport sum;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    double collapse_term = 0.0;
    if (collapse) {
      const auto& other = terms[partner[i]].locations;
      if (other.size() != terms[i].locations.size())
        throw InvariantViolation("collapse pairing between triplets with different slot counts");
      collapse_term = collapse_loss(terms[i].locations, other, config.delta_collapse);
    }
    const LossReport r = total_loss(terms[i].image, terms[i].location, terms[i].pose,
                                    terms[i].center, collapse_term, config.lambda);
    nlohmann::json entry = r.to_json();
    entry["triplet"] = fs::relative(dirs[i], dataset).generic_string();
    if (collapse) entry["partner"] = fs::relative(dirs[partner[i]], dataset).generic_string();
    per_triplet.push_back(entry);
    sum.image += r.image;
    sum.location += r.location;
    sum.pose += r.pose;
    sum.center += r.center;
    sum.collapse += r.collapse;
    sum.total += r.total;
  }
  const double n = static_cast<double>(dirs.size());
  const LossReport mean{sum.image / n,    sum.location / n, sum.pose / n, sum.center / n,
                        sum.collapse / n, config.lambda,    sum.total / n};
  return {{"format_version", kFormatVersion},
          {"tool_version", kToolVersion},
          {"provider", provider.to_string()},
          {"collapse", collapse},
          {"config", config.to_json()},
          {"per_triplet", per_triplet},
          {"aggregate", mean.to_json()}};
}

}  // namespace scenepred
