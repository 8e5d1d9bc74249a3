#pragma once

#include "scenepred/raster.hpp"

namespace scenepred {

/// Pinhole intrinsics. Pixel coordinates (i, j) are continuous, centered on
/// the image: i grows to the right, j grows upward, |i| <= (width-1)/2 and
/// |j| <= (height-1)/2 on the grid.
struct CameraIntrinsics {
  int width = 0;
  int height = 0;
  double focal = 0.0;  // pixels

  void validate() const;

  double half_width() const { return 0.5 * (width - 1); }
  double half_height() const { return 0.5 * (height - 1); }

  // Raster <-> centered pixel coordinates.
  double col_to_i(double col) const { return col - half_width(); }
  double row_to_j(double row) const { return half_height() - row; }
  double i_to_col(double i) const { return i + half_width(); }
  double j_to_row(double j) const { return half_height() - j; }

  bool in_pixel_range(double i, double j) const;
};

/// Camera motion between two consecutive sampled frames, expressed in the
/// camera frame of the earlier frame. yaw_rate is counter-clockwise seen from
/// above.
struct EgoMotion {
  Vec3 velocity = Vec3::Zero();
  double yaw_rate = 0.0;
};

struct PixelProjection {
  double i = 0.0;
  double j = 0.0;
  double depth = 0.0;
};

/// Focal length (pixels) giving horizontal field of view `fov` over the grid
/// center extent (width-1)/2.
double focal_from_fov(int width, double fov);

/// Point at Euclidean distance `depth` along the ray through pixel (i, j).
Point3 pixel_to_point(double i, double j, double depth, const CameraIntrinsics& cam);

/// Inverse of pixel_to_point; the result may lie outside the pixel range.
/// Throws std::invalid_argument for points with y <= 0.
PixelProjection point_to_pixel(const Point3& p, const CameraIntrinsics& cam);

/// Counter-clockwise rotation about the vertical axis by `theta`.
/// yaw_matrix(-w) is the matrix that maps static points through a camera pan
/// of w.
Mat3 yaw_matrix(double theta);

/// Where a static point seen at `x` in the earlier camera frame appears after
/// the camera moves by `ego`.
Point3 apparent_location(const Point3& x, const EgoMotion& ego);

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double angle);
/// Wraps an angle into (-pi, pi].
double wrap_pi(double angle);

}  // namespace scenepred
