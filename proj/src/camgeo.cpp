#include "scenepred/camgeo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scenepred {

void CameraIntrinsics::validate() const {
  if (width < 1 || height < 1)
    throw std::invalid_argument("camera raster must be at least 1x1");
  if (!(focal > 0.0) || !std::isfinite(focal))
    throw std::invalid_argument("focal length must be positive");
}

bool CameraIntrinsics::in_pixel_range(double i, double j) const {
  return std::abs(i) <= half_width() && std::abs(j) <= half_height();
}

double focal_from_fov(int width, double fov) {
  if (width < 1) throw std::invalid_argument("width must be positive");
  if (!(fov > 0.0) || !(fov < std::numbers::pi))
    throw std::invalid_argument("field of view must lie in (0, pi), got " + std::to_string(fov));
  return 0.5 * (width - 1) / std::tan(0.5 * fov);
}

Point3 pixel_to_point(double i, double j, double depth, const CameraIntrinsics& cam) {
  if (!(depth > 0.0)) throw std::invalid_argument("depth must be positive");
  const double scale = depth / std::sqrt(i * i + j * j + cam.focal * cam.focal);
  return {scale * i, scale * cam.focal, scale * j};
}

PixelProjection point_to_pixel(const Point3& p, const CameraIntrinsics& cam) {
  if (!(p.y() > 0.0)) throw std::invalid_argument("point is behind the camera");
  const double s = cam.focal / p.y();
  return {s * p.x(), s * p.z(), p.norm()};
}

Mat3 yaw_matrix(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 m;
  m << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return m;
}

Point3 apparent_location(const Point3& x, const EgoMotion& ego) {
  return yaw_matrix(-ego.yaw_rate) * (x - ego.velocity);
}

double wrap_two_pi(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a -= two_pi;
  return a;
}

double wrap_pi(double angle) {
  double a = wrap_two_pi(angle);
  if (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  return a;
}

}  // namespace scenepred
