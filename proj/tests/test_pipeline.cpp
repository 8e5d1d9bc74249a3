#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "scenepred/errors.hpp"
#include "scenepred/pipeline.hpp"

using namespace scenepred;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

Config dataset_config() {
  Config c = fixture::small_config();
  c.seed = 3;
  return c;
}

// Small dataset shared by the command tests.
const fs::path& dataset() {
  static const fs::path dir = [] {
    const fs::path d = fixture::scratch("pipeline_dataset");
    cmd_generate(dataset_config(), 3, d, 1);
    return d;
  }();
  return dir;
}

}  // namespace

TEST(ProviderSpec, ParsesAllForms) {
  EXPECT_EQ(ProviderSpec::parse("oracle").kind, ProviderSpec::Kind::oracle);
  const ProviderSpec n = ProviderSpec::parse("noisy:depth=0.1,location=0.2,pose=0.3,seg=0.4,seed=9");
  EXPECT_EQ(n.kind, ProviderSpec::Kind::noisy);
  EXPECT_DOUBLE_EQ(n.noise.depth, 0.1);
  EXPECT_DOUBLE_EQ(n.noise.location, 0.2);
  EXPECT_DOUBLE_EQ(n.noise.pose, 0.3);
  EXPECT_DOUBLE_EQ(n.noise.seg, 0.4);
  EXPECT_EQ(n.seed, 9u);
  EXPECT_EQ(ProviderSpec::parse(n.to_string()).to_string(), n.to_string());
  const ProviderSpec f = ProviderSpec::parse("files:/tmp/x");
  EXPECT_EQ(f.kind, ProviderSpec::Kind::files);
  EXPECT_EQ(f.path, fs::path("/tmp/x"));
  for (const char* bad : {"", "magic", "oracle:x", "files:", "noisy:depth", "noisy:depth=-1",
                          "noisy:blur=1", "noisy:seed=1.5"})
    EXPECT_THROW(ProviderSpec::parse(bad), ConfigError) << bad;
}

TEST(BatchPartners, CyclesWithinBatches) {
  for (std::size_t count : {2u, 3u, 7u, 20u, 21u, 41u, 45u}) {
    const auto p = batch_partners(count, 20, 77);
    ASSERT_EQ(p.size(), count);
    std::set<std::size_t> targets(p.begin(), p.end());
    EXPECT_EQ(targets.size(), count);
    for (std::size_t i = 0; i < count; ++i) {
      EXPECT_NE(p[i], i);
      std::size_t batch_i = std::min(i / 20, (count - 1) / 20);
      std::size_t batch_p = std::min(p[i] / 20, (count - 1) / 20);
      // A trailing batch of one joins the batch before it.
      if (count % 20 == 1 && count > 20) {
        batch_i = std::min(batch_i, count / 20 - 1);
        batch_p = std::min(batch_p, count / 20 - 1);
      }
      EXPECT_EQ(batch_i, batch_p) << count << " " << i;
    }
    EXPECT_EQ(batch_partners(count, 20, 77), p);
  }
  EXPECT_THROW(batch_partners(1, 20, 1), ConfigError);
  EXPECT_THROW(batch_partners(5, 1, 1), ConfigError);
}

TEST(PredictTriplet, OracleKinematicsRecoverTruth) {
  const Config c = dataset_config();
  const auto triplets = fixture::triplets_of(c, 0, 10);
  ASSERT_FALSE(triplets.empty());
  const double bin = 2 * kPi / c.bins;
  for (const Triplet& t : triplets) {
    const OracleProvider oracle(t, {static_cast<std::size_t>(c.bins), c.identity_code_scale});
    const TripletPrediction p = predict_triplet(t, infer_frame(t, oracle, 0, c),
                                                infer_frame(t, oracle, 1, c), BaselineImagination(), c);
    ASSERT_EQ(p.kinematics.size(), t.truth[1].size());
    for (std::size_t k = 0; k < p.kinematics.size(); ++k) {
      const TruthObject& truth = t.truth[1][k];
      // Truth velocity is expressed in frame t-1; the estimate in frame t.
      const Vec3 want = yaw_matrix(-t.ego[0].yaw_rate) * t.truth[0][k].velocity;
      EXPECT_LT((p.kinematics[k].velocity - want).norm(), 1e-6);
      EXPECT_LE(std::abs(wrap_pi(p.kinematics[k].omega_point - truth.yaw_rate)), bin);
    }
    EXPECT_EQ(p.predicted_locations.size(), t.truth[1].size() + 1);
    EXPECT_EQ(p.predicted_poses.size(), t.truth[1].size() + 1);
  }
}

TEST(PredictTriplet, ThreadCountDoesNotChangeBits) {
  const Config c = dataset_config();
  const auto triplets = fixture::triplets_of(c, 0, 2);
  const Triplet& t = triplets.front();
  const OracleProvider oracle(t, {16, 10.0});
  const auto prev = infer_frame(t, oracle, 0, c);
  const auto now = infer_frame(t, oracle, 1, c);
  const auto a = predict_triplet(t, prev, now, BaselineImagination(), c, 1);
  const auto b = predict_triplet(t, prev, now, BaselineImagination(), c, 8);
  EXPECT_EQ(a.bundle.merged_image, b.bundle.merged_image);
  EXPECT_EQ(a.bundle.merged_depth, b.bundle.merged_depth);
  EXPECT_EQ(a.bundle.warp_weight, b.bundle.warp_weight);
}

TEST(WeightedRegionMse, CountsOnlyConfidentPixels) {
  Frame a(2, 1, Rgb{0, 0, 0});
  Frame b(2, 1, Rgb{1, 1, 1});
  b[1] = {0.5, 0.5, 0.5};
  Grid<double> w(2, 1, 1.0);
  w[0] = 0.5;
  std::size_t n = 0;
  EXPECT_DOUBLE_EQ(weighted_region_mse(a, b, w, 0.99, &n), 0.25);
  EXPECT_EQ(n, 1u);
  EXPECT_EQ(weighted_region_mse(a, b, Grid<double>(2, 1, 0.0), 0.99, &n), 0.0);
  EXPECT_EQ(n, 0u);
}

TEST(LossTerms, OracleFloor) {
  const Config c = dataset_config();
  const double ceiling = std::log(2.0);
  for (const Triplet& t : fixture::triplets_of(c, 0, 5)) {
    const OracleProvider oracle(t, {16, 10.0});
    const TripletLossTerms l = triplet_loss_terms(t, oracle, BaselineImagination(), c);
    EXPECT_LT(l.location, 1e-8);
    EXPECT_LE(l.pose, ceiling * static_cast<double>(t.truth[2].size()) + 1e-12);
    double half = 0.0;
    for (const auto& o : t.truth[1]) half = std::max(half, o.half_size);
    EXPECT_LT(l.center, std::pow(2 * half, 2) * static_cast<double>(t.truth[1].size()));
    EXPECT_LE(l.image, 0.02);
  }
}

TEST(Generate, RerunIsByteIdenticalAcrossThreads) {
  const Config c = dataset_config();
  const fs::path a = fixture::scratch("generate_a");
  const fs::path b = fixture::scratch("generate_b");
  const GenerateSummary sa = cmd_generate(c, 3, a, 1);
  const GenerateSummary sb = cmd_generate(c, 3, b, 4);
  EXPECT_EQ(sa.triplets, sb.triplets);
  EXPECT_EQ(fixture::tree_bytes(a), fixture::tree_bytes(b));
  EXPECT_EQ(fixture::tree_bytes(a), fixture::tree_bytes(dataset()));
  const StoredTriplet t = load_triplet(a / sa.triplets.front());
  EXPECT_EQ(t.config.to_json(), c.to_json());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Generate, OneSceneStrideOneWritesAtMostFive) {
  Config c = dataset_config();
  c.strides = {1};
  const fs::path d = fixture::scratch("generate_one");
  EXPECT_LE(cmd_generate(c, 1, d, 1).triplets.size(), 5u);
  EXPECT_TRUE(fs::exists(d / "dataset.json"));
  fs::remove_all(d);
}

TEST(Generate, UnwritableDirectoryFails) {
  const fs::path d = fixture::scratch("generate_blocked");
  write_file_atomic(d / "file", "x");
  EXPECT_THROW(cmd_generate(dataset_config(), 1, d / "file" / "sub", 1), IoError);
  fs::remove_all(d);
}

TEST(Predict, WritesBundleAndSummary) {
  const fs::path out = fixture::scratch("predict_out");
  const auto dirs = list_triplets(dataset());
  const nlohmann::json s = cmd_predict(dirs.front(), ProviderSpec::parse("oracle"), out, {}, 1);
  for (const char* f : {"warp_image.ppm", "warp_depth.pfm", "warp_weight.pfm", "imag_image.ppm",
                        "imag_depth.pfm", "merged_image.ppm", "merged_depth.pfm", "summary.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_LE(s.at("mse_merged_confident").get<double>(), 0.02);
  EXPECT_EQ(read_json(out / "summary.json"), s);
  const fs::path again = fixture::scratch("predict_again");
  cmd_predict(dirs.front(), ProviderSpec::parse("oracle"), again, {}, 8);
  EXPECT_EQ(fixture::tree_bytes(out), fixture::tree_bytes(again));
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST(Predict, ZeroMotionWarpEqualsFrame) {
  const Config c = dataset_config();
  const SceneSpec spec = fixture::static_scene(c);
  const auto triplets = make_triplets(spec, render_sequence(spec, c.intrinsics()), c);
  ASSERT_FALSE(triplets.empty());
  const fs::path dir = fixture::scratch("predict_static");
  save_triplet(dir / "triplet", triplets.front(), c);
  cmd_predict(dir / "triplet", ProviderSpec::parse("oracle"), dir / "out", {}, 1);
  EXPECT_EQ(read_file(dir / "out" / "warp_image.ppm"), read_file(dir / "triplet" / "frame1.ppm"));
  const Grid<double> w = read_pfm(dir / "out" / "warp_weight.pfm");
  for (std::size_t p = 0; p < w.size(); ++p) EXPECT_NEAR(w[p], 1.0, 1e-6);
  fs::remove_all(dir);
}

TEST(Predict, MissingFilesProviderDepthNamesPath) {
  const fs::path dir = fixture::scratch("predict_files_missing");
  const auto dirs = list_triplets(dataset());
  try {
    cmd_predict(dirs.front(), ProviderSpec::parse("files:" + dir.string()), dir / "out", {}, 1);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find((dir / "depth0.pfm").string()), std::string::npos)
        << e.what();
  }
  fs::remove_all(dir);
}

TEST(Evaluate, OracleIsPerfect) {
  const nlohmann::json j = cmd_evaluate(dataset(), ProviderSpec::parse("oracle"), {}, 1);
  const auto& a = j.at("aggregate");
  EXPECT_DOUBLE_EQ(a.at("ari_fg").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(a.at("mean_iou").get<double>(), 1.0);
  for (const char* key : {"depth_pearson", "angle_pearson", "distance_pearson"})
    EXPECT_NEAR(a.at(key).get<double>(), 1.0, 1e-12) << key;
  EXPECT_EQ(dump_json(j), dump_json(cmd_evaluate(dataset(), ProviderSpec::parse("oracle"), {}, 4)));
}

TEST(Evaluate, FilesProviderMatchesOracle) {
  const fs::path root = fixture::scratch("evaluate_files");
  for (const auto& dir : list_triplets(dataset())) {
    const StoredTriplet s = load_triplet(dir);
    const OracleProvider oracle(s.triplet, {16, 10.0});
    for (std::size_t m = 0; m < 3; ++m) {
      const FrameRef f{s.triplet.frames[m].image, m};
      FileProvider::write(root / fs::relative(dir, dataset()), m, oracle.infer_depth(f),
                          oracle.infer_objects(f));
    }
  }
  const auto oracle = cmd_evaluate(dataset(), ProviderSpec::parse("oracle"), {}, 1);
  const auto files = cmd_evaluate(dataset(), ProviderSpec::parse("files:" + root.string()), {}, 1);
  const auto& a = oracle.at("aggregate");
  const auto& b = files.at("aggregate");
  EXPECT_EQ(a.at("ari_fg"), b.at("ari_fg"));
  EXPECT_EQ(a.at("mean_iou"), b.at("mean_iou"));
  for (const char* key : {"depth_pearson", "angle_pearson", "distance_pearson"})
    EXPECT_NEAR(a.at(key).get<double>(), b.at(key).get<double>(), 1e-9) << key;
  EXPECT_EQ(oracle.at("per_triplet").size(), files.at("per_triplet").size());
  fs::remove_all(root);
}

TEST(Evaluate, EmptyDatasetFails) {
  const fs::path d = fixture::scratch("evaluate_empty");
  EXPECT_THROW(cmd_evaluate(d, ProviderSpec::parse("oracle"), {}, 1), IoError);
  EXPECT_THROW(cmd_evaluate(d / "missing", ProviderSpec::parse("oracle"), {}, 1), IoError);
  fs::remove_all(d);
}

TEST(Losses, LambdaZeroLeavesImageTerm) {
  const Overrides zero = {{"lambda", "0"}};
  const auto j = cmd_losses(dataset(), ProviderSpec::parse("oracle"), zero, 1);
  for (const auto& e : j.at("per_triplet"))
    EXPECT_EQ(e.at("total").get<double>(), e.at("image").get<double>());
  const auto again = cmd_losses(dataset(), ProviderSpec::parse("oracle"), zero, 4);
  EXPECT_EQ(dump_json(j), dump_json(again));
}

TEST(Losses, DuplicatedSceneHasNoCollapsePenalty) {
  const fs::path d = fixture::scratch("losses_duplicate");
  const auto dirs = list_triplets(dataset());
  fs::create_directories(d / "scene_0000");
  fs::copy(dirs.front(), d / "scene_0000" / "triplet_0000");
  fs::copy(dirs.front(), d / "scene_0000" / "triplet_0001");
  const auto j = cmd_losses(d, ProviderSpec::parse("oracle"), {}, 1);
  for (const auto& e : j.at("per_triplet")) EXPECT_EQ(e.at("collapse").get<double>(), 0.0);
  fs::remove_all(d);
}

TEST(Losses, SingleTripletCollapseFails) {
  const fs::path d = fixture::scratch("losses_single");
  const auto dirs = list_triplets(dataset());
  fs::create_directories(d / "scene_0000");
  fs::copy(dirs.front(), d / "scene_0000" / "triplet_0000");
  EXPECT_THROW(cmd_losses(d, ProviderSpec::parse("oracle"), {}, 1), ConfigError);
  EXPECT_NO_THROW(cmd_losses(d, ProviderSpec::parse("oracle"), {}, 1, false));
  fs::remove_all(d);
}

TEST(Losses, NoisyProviderRaisesLocationTerm) {
  const auto clean = cmd_losses(dataset(), ProviderSpec::parse("oracle"), {}, 1);
  const auto noisy =
      cmd_losses(dataset(), ProviderSpec::parse("noisy:location=0.3,seed=4"), {}, 1);
  EXPECT_GT(noisy.at("aggregate").at("location").get<double>(),
            clean.at("aggregate").at("location").get<double>());
}

TEST(Config, OverridesApplyOnTopOfStoredConfig) {
  const Config stored = dataset_config();
  const Config c = resolved_config(stored, {{"beta", "2"}, {"bins", "8"}});
  EXPECT_DOUBLE_EQ(c.beta, 2.0);
  EXPECT_EQ(c.bins, 8);
  EXPECT_THROW(resolved_config(stored, {{"beta", "-1"}}), ConfigError);
}
