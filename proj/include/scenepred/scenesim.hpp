#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "scenepred/camgeo.hpp"
#include "scenepred/config.hpp"
#include "scenepred/raster.hpp"

namespace scenepred {

enum class Shape { sphere, box };
enum class Pattern { solid, stripe, checker };

/// Unlit, band-limited procedural texture: a sinusoidal blend of two colors at
/// `frequency` cycles per world unit.
struct Texture {
  Pattern pattern = Pattern::solid;
  Rgb primary{0.5, 0.5, 0.5};
  Rgb secondary{0.5, 0.5, 0.5};
  double frequency = 1.0;

  /// Surface (2D) lookup, used for room walls.
  Rgb sample(double u, double v) const;
  /// Solid (3D) lookup in object-local coordinates.
  Rgb sample(const Vec3& local) const;
};

struct ObjectSpec {
  int id = 0;  // 1..K, matches the label raster
  Shape shape = Shape::sphere;
  double half_size = 0.5;  // radius, or half side of the cube
  Point3 center0 = Point3::Zero();  // world frame at t = 0
  double yaw0 = 0.0;
  Vec3 velocity = Vec3::Zero();  // world units per frame, z = 0
  double yaw_rate = 0.0;         // radians per frame
  Texture texture;

  double bounding_radius() const;
};

struct CameraPose {
  Point3 position = Point3::Zero();  // world frame, z = 0 is eye height
  double yaw = 0.0;  // forward direction is yaw_matrix(yaw) * [0, 1, 0]
};

/// Axis-aligned room [-L, L]^2 x [floor, ceiling]. Surfaces are ordered
/// +x, -x, +y, -y walls, then floor and ceiling.
struct Room {
  double half_extent = 4.0;
  double floor = -1.0;
  double ceiling = 1.5;
  std::array<Texture, 6> surfaces;
};

struct SceneSpec {
  Room room;
  std::vector<ObjectSpec> objects;
  std::vector<CameraPose> camera_path;  // one pose per frame
  std::uint64_t seed = 0;
};

struct ObjectPose {
  int id = 0;
  Point3 center = Point3::Zero();
  double yaw = 0.0;
};

struct WorldState {
  CameraPose camera;
  std::vector<ObjectPose> objects;
};

struct RenderOutput {
  Frame image;
  DepthMap depth;
  LabelMap labels;
};

/// Ground truth for one object in one frame, in that frame's camera
/// coordinates. Velocity and yaw rate are per triplet step (stride frames).
struct TruthObject {
  int id = 0;
  Shape shape = Shape::sphere;
  double half_size = 0.0;
  Point3 location = Point3::Zero();
  double pose = 0.0;  // yaw relative to the camera, [0, 2*pi)
  Vec3 velocity = Vec3::Zero();
  double yaw_rate = 0.0;
};

/// Three frames (t-1, t, t+1) sampled at a fixed stride with ego motions
/// t-1 -> t and t -> t+1 expressed in the camera frame of the earlier frame.
struct Triplet {
  int scene_index = 0;
  std::uint64_t scene_seed = 0;
  int stride = 1;
  std::array<int, 3> frame_indices{};
  CameraIntrinsics camera;
  std::array<RenderOutput, 3> frames;
  std::array<EgoMotion, 2> ego;
  std::array<std::vector<TruthObject>, 3> truth;
};

/// Deterministic in (config, seed). Throws ConfigError when the objects
/// cannot be placed within config.max_spawn_attempts.
SceneSpec generate_scene(const Config& config, std::uint64_t seed);

/// World poses at frame t. Throws std::out_of_range for t outside the path.
WorldState step_scene(const SceneSpec& spec, int t);

struct RayHit {
  double distance = 0.0;
  int label = 0;  // 0 = room
  Rgb color{};
};

/// Nearest surface along a unit-direction ray from inside the room.
RayHit cast_ray(const SceneSpec& spec, const WorldState& state, const Point3& origin,
                const Vec3& direction);

/// Ray-casts every pixel center; bit-identical for any thread count.
RenderOutput render(const SceneSpec& spec, int t, const CameraIntrinsics& cam, int threads = 1);

/// Renders the whole camera path.
std::vector<RenderOutput> render_sequence(const SceneSpec& spec, const CameraIntrinsics& cam,
                                          int threads = 1);

/// Truth for object poses in the camera frame of `camera`.
TruthObject camera_frame_truth(const ObjectSpec& object, const ObjectPose& pose,
                               const CameraPose& camera, int stride);

EgoMotion ego_between(const CameraPose& from, const CameraPose& to);

/// Reason a frame is unusable for training samples, if any: object-object
/// overlap, object too close to the camera, or an object outside the
/// admissible viewing cone / distance.
std::optional<std::string> frame_rejection(const SceneSpec& spec, int t, const Config& config);

/// Every (a, a+s, a+2s) within the sequence for each configured stride whose
/// three frames pass frame_rejection. `frames` must hold the rendered path.
std::vector<Triplet> make_triplets(const SceneSpec& spec, const std::vector<RenderOutput>& frames,
                                   const Config& config, int scene_index = 0);

const char* shape_name(Shape shape);
const char* pattern_name(Pattern pattern);

}  // namespace scenepred
