#pragma once

#include <algorithm>
#include <fmt/format.h>
#include <vector>

#include "mixpriv/image.hpp"
#include "mixpriv/metrics/common.hpp"
#include "mixpriv/raster.hpp"

namespace mixpriv {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

namespace detail {

// Separable correlation keeping only fully covered positions ("valid").
inline std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, std::span<const double> k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace detail

// Mean SSIM on luma over every window position that fits inside the image.
inline double ssim_index(const Image& a, const Image& b, const SsimParams& p = {}) {
  require_same_shape(a, b, "ssim");
  if (std::min(a.width(), a.height()) < p.window) {
    throw DimensionMismatch(fmt::format("ssim: image {}x{} smaller than the {}x{} window", a.width(), a.height(),
                                        p.window, p.window));
  }
  const Image ga = to_grayscale(a), gb = to_grayscale(b);
  const int w = a.width(), h = a.height();
  const auto kernel = gaussian_kernel(BlurSpec{p.sigma, p.window});

  const auto x = std::vector<double>(ga.data().begin(), ga.data().end());
  const auto y = std::vector<double>(gb.data().begin(), gb.data().end());
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = detail::filter_valid(x, w, h, kernel);
  const auto my = detail::filter_valid(y, w, h, kernel);
  const auto sxx = detail::filter_valid(xx, w, h, kernel);
  const auto syy = detail::filter_valid(yy, w, h, kernel);
  const auto sxy = detail::filter_valid(xy, w, h, kernel);

  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double mu_xy = mx[i] * my[i];
    const double var_x = sxx[i] - mx[i] * mx[i];
    const double var_y = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mu_xy;
    total += ((2.0 * mu_xy + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (var_x + var_y + c2));
  }
  return total / static_cast<double>(mx.size());
}

// 1 - SSIM with SSIM clamped to [0,1].
inline PrivacyScore dssim(const Image& a, const Image& b, const SsimParams& p = {}) {
  return {Metric::Dssim, 1.0 - std::clamp(ssim_index(a, b, p), 0.0, 1.0)};
}

}  // namespace mixpriv
