#include "scenepred/scenesim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scenepred/errors.hpp"
#include "scenepred/parallel.hpp"
#include "scenepred/random.hpp"

namespace scenepred {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNoHit = std::numeric_limits<double>::infinity();

Rgb blend(const Rgb& a, const Rgb& b, double s) {
  return {a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s, a[2] + (b[2] - a[2]) * s};
}

Rgb random_color(Rng& rng) { return {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)}; }

Texture random_texture(Rng& rng, double freq_lo, double freq_hi, bool allow_solid) {
  Texture tex;
  const auto pick = rng.below(allow_solid ? 3 : 2);
  tex.pattern = pick == 0 ? Pattern::checker : pick == 1 ? Pattern::stripe : Pattern::solid;
  tex.primary = random_color(rng);
  tex.secondary = random_color(rng);
  tex.frequency = rng.uniform(freq_lo, freq_hi);
  return tex;
}

double sphere_hit(const Point3& center, double radius, const Point3& origin, const Vec3& dir) {
  const Vec3 oc = origin - center;
  const double b = dir.dot(oc);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return kNoHit;
  const double root = std::sqrt(disc);
  double t = -b - root;
  if (t <= 0.0) t = -b + root;
  return t > 0.0 ? t : kNoHit;
}

// Cube of half side h rotated by yaw about its center.
double box_hit(const Point3& center, double half, double yaw, const Point3& origin,
               const Vec3& dir) {
  const Mat3 to_local = yaw_matrix(-yaw);
  const Vec3 o = to_local * (origin - center);
  const Vec3 d = to_local * dir;
  double t_near = -kNoHit;
  double t_far = kNoHit;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (std::abs(o[a]) > half) return kNoHit;
      continue;
    }
    double t0 = (-half - o[a]) / d[a];
    double t1 = (half - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return kNoHit;
  }
  if (t_far <= 0.0) return kNoHit;
  return t_near > 0.0 ? t_near : t_far;
}

struct RoomHit {
  double distance = kNoHit;
  int surface = 0;
};

RoomHit room_hit(const Room& room, const Point3& origin, const Vec3& dir) {
  RoomHit hit;
  auto consider = [&](double t, int surface) {
    if (t > 0.0 && t < hit.distance) hit = {t, surface};
  };
  const double L = room.half_extent;
  if (dir.x() > 0.0) consider((L - origin.x()) / dir.x(), 0);
  if (dir.x() < 0.0) consider((-L - origin.x()) / dir.x(), 1);
  if (dir.y() > 0.0) consider((L - origin.y()) / dir.y(), 2);
  if (dir.y() < 0.0) consider((-L - origin.y()) / dir.y(), 3);
  if (dir.z() < 0.0) consider((room.floor - origin.z()) / dir.z(), 4);
  if (dir.z() > 0.0) consider((room.ceiling - origin.z()) / dir.z(), 5);
  return hit;
}

Rgb room_color(const Room& room, int surface, const Point3& p) {
  const Texture& tex = room.surfaces[static_cast<std::size_t>(surface)];
  switch (surface) {
    case 0:
    case 1:
      return tex.sample(p.y(), p.z());
    case 2:
    case 3:
      return tex.sample(p.x(), p.z());
    default:
      return tex.sample(p.x(), p.y());
  }
}

bool inside_room_xy(const Room& room, const Point3& p, double clearance) {
  const double lim = room.half_extent - clearance;
  return std::abs(p.x()) <= lim && std::abs(p.y()) <= lim;
}

}  // namespace

Rgb Texture::sample(double u, double v) const {
  const double w = kTwoPi * frequency;
  switch (pattern) {
    case Pattern::solid:
      return primary;
    case Pattern::stripe:
      return blend(primary, secondary, 0.5 + 0.5 * std::sin(w * u));
    case Pattern::checker:
      return blend(primary, secondary, 0.5 + 0.5 * std::sin(w * u) * std::sin(w * v));
  }
  return primary;
}

Rgb Texture::sample(const Vec3& local) const {
  const double w = kTwoPi * frequency;
  switch (pattern) {
    case Pattern::solid:
      return primary;
    case Pattern::stripe:
      return blend(primary, secondary, 0.5 + 0.5 * std::sin(w * local.x()));
    case Pattern::checker:
      return blend(primary, secondary,
                   0.5 + 0.5 * std::sin(w * local.x()) * std::sin(w * local.y()) *
                             std::cos(w * local.z()));
  }
  return primary;
}

double ObjectSpec::bounding_radius() const {
  return shape == Shape::sphere ? half_size : half_size * std::sqrt(3.0);
}

const char* shape_name(Shape shape) { return shape == Shape::sphere ? "sphere" : "box"; }

const char* pattern_name(Pattern pattern) {
  switch (pattern) {
    case Pattern::solid:
      return "solid";
    case Pattern::stripe:
      return "stripe";
    case Pattern::checker:
      return "checker";
  }
  return "solid";
}

SceneSpec generate_scene(const Config& config, std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;
  Rng rng(derive_seed(seed, {0x5ce7e}));

  Room& room = spec.room;
  room.half_extent = config.room_half_extent;
  room.floor = config.floor_height;
  room.ceiling = config.ceiling_height;
  for (std::size_t s = 0; s < room.surfaces.size(); ++s) {
    const bool horizontal = s >= 4;
    room.surfaces[s] = horizontal ? random_texture(rng, 0.15, 0.35, false)
                                  : random_texture(rng, 0.3, 0.7, false);
  }

  // Camera: starts near the -y wall looking into the room, then takes small
  // random steps and pans.
  const double L = room.half_extent;
  const double margin = config.wall_margin;
  CameraPose pose;
  const double x_span = std::max(0.0, std::min(1.5, L - margin));
  const double y_lo = -L + margin;
  const double y_hi = std::min(L - margin, y_lo + 1.0);
  pose.position = {rng.uniform(-x_span, x_span), rng.uniform(y_lo, y_hi), 0.0};
  pose.yaw = rng.uniform(-0.3, 0.3);
  spec.camera_path.push_back(pose);
  for (int t = 1; t < config.sequence_length; ++t) {
    CameraPose next = spec.camera_path.back();
    for (int attempt = 0; attempt < 64; ++attempt) {
      const Vec3 step_cam{rng.uniform(-config.camera_step_max, config.camera_step_max),
                          rng.uniform(-config.camera_step_max, config.camera_step_max), 0.0};
      const Point3 candidate = spec.camera_path.back().position + yaw_matrix(next.yaw) * step_cam;
      if (inside_room_xy(room, candidate, margin)) {
        next.position = candidate;
        break;
      }
    }
    next.yaw = spec.camera_path.back().yaw +
               rng.uniform(-config.camera_yaw_step_max, config.camera_yaw_step_max);
    spec.camera_path.push_back(next);
  }

  const CameraPose& cam0 = spec.camera_path.front();
  const double bearing_max = config.spawn_angle_fraction * config.fov;
  const int frames = config.sequence_length;
  int attempts = 0;
  while (static_cast<int>(spec.objects.size()) < config.objects) {
    if (++attempts > config.max_spawn_attempts)
      throw ConfigError("could not place " + std::to_string(config.objects) +
                        " non-overlapping objects after " +
                        std::to_string(config.max_spawn_attempts) + " attempts");
    ObjectSpec obj;
    obj.id = static_cast<int>(spec.objects.size()) + 1;
    obj.shape = rng.below(2) == 0 ? Shape::sphere : Shape::box;
    obj.half_size = rng.uniform(config.object_half_size_min, config.object_half_size_max);
    const double dist = rng.uniform(config.spawn_distance_min, config.spawn_distance_max);
    const double bearing = rng.uniform(-bearing_max, bearing_max);
    const Vec3 offset_cam{dist * std::sin(bearing), dist * std::cos(bearing), 0.0};
    obj.center0 = cam0.position + yaw_matrix(cam0.yaw) * offset_cam;
    obj.center0.z() = room.floor + obj.half_size;
    const double heading = rng.uniform(0.0, kTwoPi);
    const double speed = rng.uniform(0.0, config.object_speed_max);
    obj.velocity = {speed * std::cos(heading), speed * std::sin(heading), 0.0};
    obj.yaw0 = rng.uniform(0.0, kTwoPi);
    obj.yaw_rate = rng.uniform(-config.object_yaw_rate_max, config.object_yaw_rate_max);
    obj.texture = random_texture(rng, 0.8, 1.6, true);

    const double radius = obj.bounding_radius();
    if (obj.center0.z() + obj.half_size > room.ceiling) continue;
    bool ok = true;
    for (int t = 0; t < frames && ok; ++t)
      ok = inside_room_xy(room, obj.center0 + t * obj.velocity, radius);
    for (const auto& other : spec.objects) {
      if (!ok) break;
      ok = (obj.center0 - other.center0).norm() > radius + other.bounding_radius();
    }
    if (ok) spec.objects.push_back(obj);
  }
  return spec;
}

WorldState step_scene(const SceneSpec& spec, int t) {
  if (t < 0 || t >= static_cast<int>(spec.camera_path.size()))
    throw std::out_of_range("frame index " + std::to_string(t) + " outside the sequence");
  WorldState state;
  state.camera = spec.camera_path[static_cast<std::size_t>(t)];
  state.objects.reserve(spec.objects.size());
  for (const auto& obj : spec.objects)
    state.objects.push_back({obj.id, obj.center0 + t * obj.velocity, obj.yaw0 + t * obj.yaw_rate});
  return state;
}

RayHit cast_ray(const SceneSpec& spec, const WorldState& state, const Point3& origin,
                const Vec3& direction) {
  const RoomHit wall = room_hit(spec.room, origin, direction);
  RayHit hit;
  hit.distance = wall.distance;
  hit.label = 0;
  std::size_t nearest = spec.objects.size();
  for (std::size_t k = 0; k < spec.objects.size(); ++k) {
    const auto& obj = spec.objects[k];
    const auto& pose = state.objects[k];
    const double t = obj.shape == Shape::sphere
                         ? sphere_hit(pose.center, obj.half_size, origin, direction)
                         : box_hit(pose.center, obj.half_size, pose.yaw, origin, direction);
    if (t < hit.distance) {
      hit.distance = t;
      nearest = k;
    }
  }
  const Point3 p = origin + hit.distance * direction;
  if (nearest == spec.objects.size()) {
    hit.color = room_color(spec.room, wall.surface, p);
  } else {
    const auto& obj = spec.objects[nearest];
    const auto& pose = state.objects[nearest];
    hit.label = obj.id;
    hit.color = obj.texture.sample(Vec3(yaw_matrix(-pose.yaw) * (p - pose.center)));
  }
  return hit;
}

RenderOutput render(const SceneSpec& spec, int t, const CameraIntrinsics& cam, int threads) {
  cam.validate();
  const WorldState state = step_scene(spec, t);
  RenderOutput out{Frame(cam.width, cam.height), DepthMap(cam.width, cam.height),
                   LabelMap(cam.width, cam.height)};
  const Mat3 cam_to_world = yaw_matrix(state.camera.yaw);
  parallel_chunks(static_cast<std::size_t>(cam.height), threads,
                  [&](std::size_t row_begin, std::size_t row_end) {
                    for (auto row = static_cast<int>(row_begin); row < static_cast<int>(row_end);
                         ++row) {
                      const double j = cam.row_to_j(row);
                      for (int col = 0; col < cam.width; ++col) {
                        const double i = cam.col_to_i(col);
                        const Vec3 dir = cam_to_world * Vec3(i, cam.focal, j).normalized();
                        const RayHit hit = cast_ray(spec, state, state.camera.position, dir);
                        out.image(col, row) = hit.color;
                        out.depth(col, row) = hit.distance;
                        out.labels(col, row) = hit.label;
                      }
                    }
                  });
  return out;
}

std::vector<RenderOutput> render_sequence(const SceneSpec& spec, const CameraIntrinsics& cam,
                                          int threads) {
  std::vector<RenderOutput> frames;
  frames.reserve(spec.camera_path.size());
  for (int t = 0; t < static_cast<int>(spec.camera_path.size()); ++t)
    frames.push_back(render(spec, t, cam, threads));
  return frames;
}

TruthObject camera_frame_truth(const ObjectSpec& object, const ObjectPose& pose,
                               const CameraPose& camera, int stride) {
  const Mat3 world_to_cam = yaw_matrix(-camera.yaw);
  TruthObject truth;
  truth.id = object.id;
  truth.shape = object.shape;
  truth.half_size = object.half_size;
  truth.location = world_to_cam * (pose.center - camera.position);
  truth.pose = wrap_two_pi(pose.yaw - camera.yaw);
  truth.velocity = world_to_cam * (object.velocity * stride);
  truth.yaw_rate = object.yaw_rate * stride;
  return truth;
}

EgoMotion ego_between(const CameraPose& from, const CameraPose& to) {
  return {yaw_matrix(-from.yaw) * (to.position - from.position), wrap_pi(to.yaw - from.yaw)};
}

std::optional<std::string> frame_rejection(const SceneSpec& spec, int t, const Config& config) {
  const WorldState state = step_scene(spec, t);
  const double half_cone = 0.5 * config.view_angle_factor * config.fov;
  for (std::size_t a = 0; a < spec.objects.size(); ++a) {
    const auto& obj = spec.objects[a];
    const Point3& c = state.objects[a].center;
    for (std::size_t b = a + 1; b < spec.objects.size(); ++b) {
      if ((c - state.objects[b].center).norm() <
          obj.bounding_radius() + spec.objects[b].bounding_radius())
        return "objects " + std::to_string(obj.id) + " and " + std::to_string(spec.objects[b].id) +
               " collide";
    }
    if ((c - state.camera.position).norm() < obj.bounding_radius() + config.camera_clearance)
      return "object " + std::to_string(obj.id) + " collides with the camera";
    const Point3 local = yaw_matrix(-state.camera.yaw) * (c - state.camera.position);
    if (!(local.y() > 0.0) || std::abs(std::atan2(local.x(), local.y())) > half_cone ||
        local.norm() > config.max_object_distance)
      return "object " + std::to_string(obj.id) + " outside the admissible view";
  }
  return std::nullopt;
}

std::vector<Triplet> make_triplets(const SceneSpec& spec, const std::vector<RenderOutput>& frames,
                                   const Config& config, int scene_index) {
  const int n = static_cast<int>(spec.camera_path.size());
  if (static_cast<int>(frames.size()) != n)
    throw std::invalid_argument("rendered frame count does not match the camera path");
  std::vector<bool> usable(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) usable[static_cast<std::size_t>(t)] = !frame_rejection(spec, t, config);

  const CameraIntrinsics cam = config.intrinsics();
  std::vector<Triplet> out;
  for (int stride : config.strides) {
    for (int a = 0; a + 2 * stride < n; ++a) {
      const std::array<int, 3> idx{a, a + stride, a + 2 * stride};
      bool ok = true;
      for (int f : idx) ok = ok && usable[static_cast<std::size_t>(f)];
      if (!ok) continue;
      Triplet tri;
      tri.scene_index = scene_index;
      tri.scene_seed = spec.seed;
      tri.stride = stride;
      tri.frame_indices = idx;
      tri.camera = cam;
      for (std::size_t m = 0; m < 3; ++m) {
        const int f = idx[m];
        tri.frames[m] = frames[static_cast<std::size_t>(f)];
        const WorldState state = step_scene(spec, f);
        for (std::size_t k = 0; k < spec.objects.size(); ++k)
          tri.truth[m].push_back(
              camera_frame_truth(spec.objects[k], state.objects[k], state.camera, stride));
      }
      tri.ego[0] = ego_between(spec.camera_path[static_cast<std::size_t>(idx[0])],
                               spec.camera_path[static_cast<std::size_t>(idx[1])]);
      tri.ego[1] = ego_between(spec.camera_path[static_cast<std::size_t>(idx[1])],
                               spec.camera_path[static_cast<std::size_t>(idx[2])]);
      out.push_back(std::move(tri));
    }
  }
  return out;
}

}  // namespace scenepred
