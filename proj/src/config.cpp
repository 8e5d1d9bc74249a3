#include "scenepred/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <variant>

#include "scenepred/errors.hpp"

namespace scenepred {
namespace {

using Member = std::variant<int Config::*, double Config::*, std::uint64_t Config::*,
                            std::vector<int> Config::*>;

struct Field {
  const char* name;
  Member member;
  const char* help;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"seed", &Config::seed, "master random seed"},
      {"width", &Config::width, "image width in pixels"},
      {"height", &Config::height, "image height in pixels"},
      {"fov", &Config::fov, "horizontal field of view (radians)"},
      {"objects", &Config::objects, "objects per scene (K)"},
      {"sequence_length", &Config::sequence_length, "frames rendered per scene"},
      {"strides", &Config::strides, "triplet strides, comma separated"},
      {"room_half_extent", &Config::room_half_extent, "half side of the square room"},
      {"floor_height", &Config::floor_height, "floor z relative to the camera"},
      {"ceiling_height", &Config::ceiling_height, "ceiling z relative to the camera"},
      {"object_half_size_min", &Config::object_half_size_min, "smallest object half size"},
      {"object_half_size_max", &Config::object_half_size_max, "largest object half size"},
      {"object_speed_max", &Config::object_speed_max, "max object speed per frame"},
      {"object_yaw_rate_max", &Config::object_yaw_rate_max, "max object yaw rate per frame"},
      {"spawn_distance_min", &Config::spawn_distance_min, "nearest spawn distance"},
      {"spawn_distance_max", &Config::spawn_distance_max, "farthest spawn distance"},
      {"spawn_angle_fraction", &Config::spawn_angle_fraction,
       "spawn bearing limit as a fraction of fov"},
      {"camera_step_max", &Config::camera_step_max, "max camera translation per frame"},
      {"camera_yaw_step_max", &Config::camera_yaw_step_max, "max camera pan per frame"},
      {"wall_margin", &Config::wall_margin, "clearance kept from the walls"},
      {"camera_clearance", &Config::camera_clearance,
       "min gap between camera and an object's bounding sphere"},
      {"max_object_distance", &Config::max_object_distance, "distance limit for object states"},
      {"view_angle_factor", &Config::view_angle_factor,
       "admissible object bearing in fields of view"},
      {"max_spawn_attempts", &Config::max_spawn_attempts, "placement retries per scene"},
      {"bins", &Config::bins, "pose bins (b), even"},
      {"beta", &Config::beta, "occlusion sharpness per world unit"},
      {"sigma_rbf", &Config::sigma_rbf, "identity matching bandwidth"},
      {"kappa_prior", &Config::kappa_prior, "Von Mises prior concentration on rotation speed"},
      {"kappa_interp", &Config::kappa_interp,
       "Von Mises interpolation concentration (0 = bins^2/4)"},
      {"identity_code_scale", &Config::identity_code_scale, "norm of oracle identity codes"},
      {"delta_collapse", &Config::delta_collapse, "collapse penalty clamp"},
      {"lambda", &Config::lambda, "weight of the consistency and regularizer terms"},
      {"batch_size", &Config::batch_size, "triplets per loss batch"},
  };
  return table;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.name) return f;
  throw ConfigError("unknown configuration key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    char* end = nullptr;
    value = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(value))
      throw ConfigError("bad value '" + text + "' for " + key);
  } else {
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
      throw ConfigError("bad value '" + text + "' for " + key);
  }
  return value;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<int>(key, item));
  }
  return out;
}

}  // namespace

void Config::finalize() {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid configuration: " + what);
  };
  require(width >= 2 && height >= 2, "width and height must be >= 2");
  require(fov > 0.0 && fov < std::numbers::pi, "fov must lie in (0, pi)");
  require(objects >= 0, "objects must be >= 0");
  require(sequence_length >= 3, "sequence_length must be >= 3");
  require(!strides.empty(), "at least one stride");
  for (int s : strides) require(s >= 1, "strides must be positive");
  require(room_half_extent > 0.0, "room_half_extent > 0");
  require(floor_height < 0.0 && ceiling_height > 0.0, "camera must sit between floor and ceiling");
  require(object_half_size_min > 0.0 && object_half_size_max >= object_half_size_min,
          "object half sizes");
  require(object_half_size_max < ceiling_height - floor_height, "objects must fit the room");
  require(object_speed_max >= 0.0 && object_yaw_rate_max >= 0.0, "object motion ranges");
  require(spawn_distance_min > 0.0 && spawn_distance_max >= spawn_distance_min,
          "spawn distances");
  require(spawn_angle_fraction >= 0.0, "spawn_angle_fraction >= 0");
  require(camera_step_max >= 0.0 && camera_yaw_step_max >= 0.0, "camera step ranges");
  require(wall_margin >= 0.0 && wall_margin < room_half_extent, "wall_margin");
  require(camera_clearance >= 0.0, "camera_clearance >= 0");
  require(max_object_distance > 0.0, "max_object_distance > 0");
  require(view_angle_factor > 0.0, "view_angle_factor > 0");
  require(max_spawn_attempts >= 1, "max_spawn_attempts >= 1");
  require(bins >= 2 && bins % 2 == 0, "bins must be even and >= 2");
  require(beta >= 0.0, "beta >= 0");
  require(sigma_rbf > 0.0, "sigma_rbf > 0");
  require(kappa_prior >= 0.0, "kappa_prior >= 0");
  require(kappa_interp >= 0.0, "kappa_interp >= 0");
  if (kappa_interp == 0.0) kappa_interp = effective_kappa_interp();
  require(identity_code_scale > 0.0, "identity_code_scale > 0");
  require(delta_collapse > 0.0, "delta_collapse > 0");
  require(lambda >= 0.0, "lambda >= 0");
  require(batch_size >= 1, "batch_size >= 1");
}

double Config::effective_kappa_interp() const {
  return kappa_interp > 0.0 ? kappa_interp : 0.25 * bins * bins;
}

CameraIntrinsics Config::intrinsics() const {
  return {width, height, focal_from_fov(width, fov)};
}

void Config::set(const std::string& key, const std::string& value) {
  const Field& f = find_field(key);
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(this->*member)>;
        if constexpr (std::is_same_v<T, std::vector<int>>)
          this->*member = parse_int_list(key, value);
        else
          this->*member = parse_number<T>(key, value);
      },
      f.member);
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_array()) {
        std::string joined;
        for (const auto& v : *it) joined += v.dump() + ",";
        out.emplace_back(it.key(), joined);
      } else if (it->is_string()) {
        out.emplace_back(it.key(), it->get<std::string>());
      } else {
        out.emplace_back(it.key(), it->dump());
      }
    }
    return out;
  }
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void Config::apply_text(const std::string& text) {
  for (const auto& [key, value] : parse_config_text(text)) set(key, value);
}

nlohmann::json Config::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields()) {
    std::visit([&](auto member) { j[f.name] = this->*member; }, f.member);
  }
  j["kappa_interp"] = effective_kappa_interp();
  return j;
}

Config Config::from_json(const nlohmann::json& j) {
  Config c;
  if (!j.is_object()) throw ConfigError("config echo must be a JSON object");
  for (const auto& f : fields()) {
    if (!j.contains(f.name)) continue;
    try {
      std::visit(
          [&](auto member) {
            using T = std::remove_reference_t<decltype(c.*member)>;
            c.*member = j.at(f.name).get<T>();
          },
          f.member);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config field ") + f.name + ": " + e.what());
    }
  }
  return c;
}

const std::vector<std::string>& Config::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

std::string Config::describe(const std::string& key) { return find_field(key).help; }

int default_thread_count() {
  if (const char* env = std::getenv("SCENEPRED_THREADS")) {
    int n = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc{} && ptr == s.data() + s.size() && n >= 1) return n;
  }
  return 1;
}

}  // namespace scenepred
