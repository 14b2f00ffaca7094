#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fmt/format.h>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mixpriv/error.hpp"

namespace mixpriv {

// Row-major interleaved raster, intensities nominally on the 0..255 scale.
class Image {
 public:
  Image() = default;

  Image(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    check_shape();
    if (!std::isfinite(fill)) throw std::invalid_argument("Image: non-finite fill value");
    data_.assign(sample_count(), fill);
  }

  Image(int width, int height, int channels, std::vector<double> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_shape();
    if (data_.size() != sample_count()) {
      throw std::invalid_argument(fmt::format("Image: expected {} samples, got {}", sample_count(),
                                              data_.size()));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("Image: non-finite intensity");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t sample_count() const noexcept {
    return pixel_count() * static_cast<std::size_t>(channels_);
  }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }
  double& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  void check_shape() const {
    if (width_ < 1 || height_ < 1) throw std::invalid_argument("Image: width and height must be >= 1");
    if (channels_ != 1 && channels_ != 3) throw std::invalid_argument("Image: channels must be 1 or 3");
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

inline void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(fmt::format("{}: shape {}x{}x{} vs {}x{}x{}", what, a.width(), a.height(),
                                        a.channels(), b.width(), b.height(), b.channels()));
  }
}

inline Image clamped(Image img, double lo = 0.0, double hi = 255.0) {
  for (double& v : img.data()) v = std::clamp(v, lo, hi);
  return img;
}

// Round half-to-even and clamp to [0,255]: the exact values an 8-bit export holds.
inline Image quantized(Image img) {
  for (double& v : img.data()) v = std::clamp(std::nearbyint(v), 0.0, 255.0);
  return img;
}

struct Label {
  int class_id = 0;
  int num_classes = 2;

  Label() = default;
  Label(int id, int classes) : class_id(id), num_classes(classes) {
    if (classes < 2) throw std::invalid_argument("Label: num_classes must be >= 2");
    if (id < 0 || id >= classes) {
      throw std::invalid_argument(fmt::format("Label: class {} outside [0, {})", id, classes));
    }
  }

  friend bool operator==(const Label&, const Label&) = default;
};

struct LabeledImage {
  Image image;
  Label label;
};

}  // namespace mixpriv
