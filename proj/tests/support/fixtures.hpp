#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scenepred/config.hpp"
#include "scenepred/io.hpp"
#include "scenepred/random.hpp"
#include "scenepred/scenesim.hpp"

namespace scenepred::fixture {

inline Config small_config(int size = 32) {
  Config c;
  c.width = size;
  c.height = size;
  c.finalize();
  return c;
}

/// Every triplet of scenes [first, first + count) with seeds derived as the
/// generator does.
inline std::vector<Triplet> triplets_of(const Config& config, int first, int count) {
  std::vector<Triplet> out;
  for (int s = first; s < first + count; ++s) {
    const SceneSpec spec =
        generate_scene(config, derive_seed(config.seed, {static_cast<std::uint64_t>(s)}));
    for (auto& t : make_triplets(spec, render_sequence(spec, config.intrinsics()), config, s))
      out.push_back(std::move(t));
  }
  return out;
}

/// Scene in which nothing moves: camera and objects stay put.
inline SceneSpec static_scene(const Config& config) {
  SceneSpec spec = generate_scene(config, 5);
  for (auto& o : spec.objects) {
    o.velocity = Vec3::Zero();
    o.yaw_rate = 0.0;
  }
  for (auto& pose : spec.camera_path) pose = spec.camera_path.front();
  return spec;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("scenepred_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Every regular file under `root`, relative path -> bytes.
inline std::vector<std::pair<std::string, std::string>> tree_bytes(
    const std::filesystem::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out.emplace_back(std::filesystem::relative(e.path(), root).generic_string(),
                       read_file(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace scenepred::fixture
