#pragma once

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <span>
#include <stdexcept>
#include <vector>

#include "mixpriv/image.hpp"

namespace mixpriv {

// BT.601 luma.
inline Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    dst[p] = 0.299 * src[3 * p] + 0.587 * src[3 * p + 1] + 0.114 * src[3 * p + 2];
  }
  return out;
}

// Replicates a single channel into R, G and B.
inline Image to_rgb(const Image& img) {
  if (img.channels() == 3) return img;
  Image out(img.width(), img.height(), 3);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < img.pixel_count(); ++p) dst[3 * p] = dst[3 * p + 1] = dst[3 * p + 2] = src[p];
  return out;
}

// Bilinear resampling with pixel centers at (i + 0.5); samples outside the
// source are clamped to the border.
inline Image resize_bilinear(const Image& img, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("resize_bilinear: target must be >= 1x1");
  if (width == img.width() && height == img.height()) return img;

  struct Tap {
    int lo, hi;
    double frac;
  };
  auto taps = [](int src, int dst) {
    std::vector<Tap> t(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
      double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(src - 1));
      const int lo = static_cast<int>(std::floor(s));
      const int hi = std::min(lo + 1, src - 1);
      t[static_cast<std::size_t>(i)] = {lo, hi, s - lo};
    }
    return t;
  };
  const auto tx = taps(img.width(), width);
  const auto ty = taps(img.height(), height);

  Image out(width, height, img.channels());
  for (int y = 0; y < height; ++y) {
    const Tap& vy = ty[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const Tap& vx = tx[static_cast<std::size_t>(x)];
      for (int c = 0; c < img.channels(); ++c) {
        const double top = (1.0 - vx.frac) * img.at(vx.lo, vy.lo, c) + vx.frac * img.at(vx.hi, vy.lo, c);
        const double bottom = (1.0 - vx.frac) * img.at(vx.lo, vy.hi, c) + vx.frac * img.at(vx.hi, vy.hi, c);
        out.at(x, y, c) = (1.0 - vy.frac) * top + vy.frac * bottom;
      }
    }
  }
  return out;
}

// Sigma implied by a kernel width when only the width is known.
inline double sigma_for_kernel(int ksize) { return 0.3 * ((ksize - 1) / 2.0 - 1.0) + 0.8; }

struct BlurSpec {
  double sigma = 0.0;
  int ksize = 1;

  static BlurSpec from_kernel(int ksize) {
    if (ksize == 1) return {0.0, 1};
    BlurSpec spec{sigma_for_kernel(ksize), ksize};
    spec.validate();
    return spec;
  }
  // Kernel spans +/- 3 sigma.
  static BlurSpec from_sigma(double sigma) {
    if (sigma <= 0.0) return {0.0, 1};
    return {sigma, 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1};
  }

  void validate() const {
    if (ksize < 1 || ksize % 2 == 0) {
      throw std::invalid_argument(fmt::format("blur: kernel size {} must be odd and >= 1", ksize));
    }
    if (!(sigma > 0.0) && !(sigma == 0.0 && ksize == 1)) {
      throw std::invalid_argument("blur: sigma must be > 0 (or 0 with kernel size 1)");
    }
  }
};

inline std::vector<double> gaussian_kernel(const BlurSpec& spec) {
  spec.validate();
  if (spec.ksize == 1) return {1.0};
  const int r = spec.ksize / 2;
  std::vector<double> k(static_cast<std::size_t>(spec.ksize));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * spec.sigma * spec.sigma));
    k[static_cast<std::size_t>(i + r)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace detail {

// Separable correlation with a symmetric odd kernel and replicated borders.
inline Image convolve_separable(const Image& img, std::span<const double> kernel) {
  const int r = static_cast<int>(kernel.size()) / 2;
  const int w = img.width(), h = img.height(), ch = img.channels();
  Image tmp(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) {
          acc += kernel[static_cast<std::size_t>(k + r)] * img.at(std::clamp(x + k, 0, w - 1), y, c);
        }
        tmp.at(x, y, c) = acc;
      }
    }
  }
  Image out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) {
          acc += kernel[static_cast<std::size_t>(k + r)] * tmp.at(x, std::clamp(y + k, 0, h - 1), c);
        }
        out.at(x, y, c) = acc;
      }
    }
  }
  return out;
}

}  // namespace detail

inline Image gaussian_blur(const Image& img, const BlurSpec& spec) {
  const auto kernel = gaussian_kernel(spec);
  if (kernel.size() == 1) return img;
  return detail::convolve_separable(img, kernel);
}

inline Image gaussian_blur(const Image& img, double sigma, int ksize) {
  return gaussian_blur(img, BlurSpec{sigma, ksize});
}

// One cell of a b x b grid anchored at (0,0); right/bottom cells may be smaller.
struct Tile {
  int x0, y0, width, height;
  friend bool operator==(const Tile&, const Tile&) = default;
};

inline std::vector<Tile> tile_grid(int width, int height, int block) {
  if (block < 1) throw std::invalid_argument("tile_grid: block edge must be >= 1");
  std::vector<Tile> tiles;
  for (int y = 0; y < height; y += block) {
    for (int x = 0; x < width; x += block) {
      tiles.push_back({x, y, std::min(block, width - x), std::min(block, height - y)});
    }
  }
  return tiles;
}

// Gathers each tile's samples of one channel (row-major within the tile),
// hands them to `reduce` for in-place rewriting, and scatters them back.
template <class Reduce>
Image block_map(const Image& img, int block, Reduce&& reduce) {
  Image out = img;
  std::vector<double> values;
  for (const Tile& t : tile_grid(img.width(), img.height(), block)) {
    for (int c = 0; c < img.channels(); ++c) {
      values.clear();
      for (int y = t.y0; y < t.y0 + t.height; ++y) {
        for (int x = t.x0; x < t.x0 + t.width; ++x) values.push_back(img.at(x, y, c));
      }
      reduce(std::span<double>(values));
      std::size_t i = 0;
      for (int y = t.y0; y < t.y0 + t.height; ++y) {
        for (int x = t.x0; x < t.x0 + t.width; ++x) out.at(x, y, c) = values[i++];
      }
    }
  }
  return out;
}

}  // namespace mixpriv
