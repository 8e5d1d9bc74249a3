#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "scenepred/camgeo.hpp"

namespace scenepred {

/// Every tunable of dataset generation, prediction and scoring. Echoed into
/// each output metadata file so a run can be reconstructed from its outputs.
struct Config {
  std::uint64_t seed = 1;

  // camera and dataset protocol
  int width = 64;
  int height = 64;
  double fov = 1.5707963267948966;  // 90 degrees
  int objects = 3;
  int sequence_length = 7;
  std::vector<int> strides = {1, 2, 3};

  // procedural scene ranges (world units, radians, per frame step)
  double room_half_extent = 4.0;
  double floor_height = -1.0;
  double ceiling_height = 1.5;
  double object_half_size_min = 0.3;
  double object_half_size_max = 0.6;
  double object_speed_max = 0.08;
  double object_yaw_rate_max = 0.1;
  double spawn_distance_min = 2.0;
  double spawn_distance_max = 5.5;
  double spawn_angle_fraction = 0.35;  // of fov, either side of the optical axis
  double camera_step_max = 0.03;
  double camera_yaw_step_max = 0.1;
  double wall_margin = 0.5;
  double camera_clearance = 0.3;
  double max_object_distance = 12.0;
  double view_angle_factor = 1.2;  // admissible viewing angle, in fields of view
  int max_spawn_attempts = 2000;

  // prediction
  int bins = 16;
  double beta = 1.0;
  double sigma_rbf = 1.0;
  double kappa_prior = 1.0;
  double kappa_interp = 0.0;  // 0 selects bins^2 / 4
  double identity_code_scale = 10.0;

  // objective
  double delta_collapse = 1.0;
  double lambda = 1.0;
  int batch_size = 20;

  /// Resolves automatic values (kappa_interp) and checks ranges; throws
  /// ConfigError.
  void finalize();

  double effective_kappa_interp() const;
  CameraIntrinsics intrinsics() const;

  /// Sets one field from its textual form; throws ConfigError for unknown keys
  /// or unparsable values.
  void set(const std::string& key, const std::string& value);

  /// Applies either a JSON object or `key = value` lines ('#' comments).
  void apply_text(const std::string& text);

  nlohmann::json to_json() const;
  static Config from_json(const nlohmann::json& j);

  static const std::vector<std::string>& keys();
  static std::string describe(const std::string& key);
};

/// Key/value pairs from a JSON object or `key = value` lines, in order.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// Worker count from SCENEPRED_THREADS, defaulting to 1.
int default_thread_count();

}  // namespace scenepred
