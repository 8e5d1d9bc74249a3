#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace scenepred {

/// Camera-frame (or world-frame) 3D location: x right, y forward (optical
/// axis), z up.
using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using Rgb = std::array<double, 3>;

/// Row-major 2D raster. Row 0 is the top of the image, column 0 the left edge.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(checked(width, height)), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int col, int row) { return data_[index(col, row)]; }
  const T& operator()(int col, int row) const { return data_[index(col, row)]; }

  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  static long checked(int width, int height) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative raster size");
    return static_cast<long>(width) * height;
  }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// RGB image with channels in [0, 1].
using Frame = Grid<Rgb>;
/// Euclidean camera distance per pixel.
using DepthMap = Grid<double>;
/// 0 = background, 1..K = object ids.
using LabelMap = Grid<int>;

/// Per-pixel membership probabilities over K object slots followed by one
/// background slot. Every pixel is a simplex over the K+1 slots.
struct SegMap {
  std::vector<Grid<double>> slots;

  std::size_t num_slots() const { return slots.size(); }
  std::size_t num_objects() const { return slots.empty() ? 0 : slots.size() - 1; }
  int width() const { return slots.empty() ? 0 : slots.front().width(); }
  int height() const { return slots.empty() ? 0 : slots.front().height(); }
  Grid<double>& background() { return slots.back(); }
  const Grid<double>& background() const { return slots.back(); }

  friend bool operator==(const SegMap&, const SegMap&) = default;
};

/// One-hot segmentation from a label raster with `num_objects` foreground
/// slots; label l in 1..K maps to slot l-1, label 0 to the background slot.
SegMap seg_from_labels(const LabelMap& labels, std::size_t num_objects);

/// Per-pixel argmax over slots, mapped back to labels (background slot -> 0).
LabelMap labels_from_seg(const SegMap& seg);

/// Throws std::invalid_argument unless every slot has the same shape and each
/// pixel sums to 1 within `tolerance` with non-negative entries.
void check_seg_simplex(const SegMap& seg, double tolerance = 1e-6);

}  // namespace scenepred
