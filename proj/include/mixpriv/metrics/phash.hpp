#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "mixpriv/image.hpp"
#include "mixpriv/metrics/common.hpp"
#include "mixpriv/raster.hpp"

namespace mixpriv {

// 64-bit DCT hash: luma, 32x32 bilinear, orthonormal DCT-II, top-left 8x8
// block; bit (u,v) is set when the coefficient exceeds the mean of the 63 AC
// coefficients. Bit index is 8*u + v (u vertical frequency).
inline std::uint64_t phash(const Image& img) {
  constexpr int kSize = 32;
  constexpr int kLow = 8;
  const Image g = resize_bilinear(to_grayscale(img), kSize, kSize);

  double basis[kLow][kSize];
  for (int k = 0; k < kLow; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / kSize) : std::sqrt(2.0 / kSize);
    for (int n = 0; n < kSize; ++n) basis[k][n] = scale * std::cos(std::numbers::pi * (2 * n + 1) * k / (2.0 * kSize));
  }
  // rows: tmp[y][v] = sum_x g[y][x] * basis[v][x]
  double tmp[kSize][kLow];
  for (int y = 0; y < kSize; ++y) {
    for (int v = 0; v < kLow; ++v) {
      double acc = 0.0;
      for (int x = 0; x < kSize; ++x) acc += g.at(x, y) * basis[v][x];
      tmp[y][v] = acc;
    }
  }
  double coeff[kLow][kLow];
  double ac_sum = 0.0;
  for (int u = 0; u < kLow; ++u) {
    for (int v = 0; v < kLow; ++v) {
      double acc = 0.0;
      for (int y = 0; y < kSize; ++y) acc += basis[u][y] * tmp[y][v];
      coeff[u][v] = acc;
      if (u != 0 || v != 0) ac_sum += acc;
    }
  }
  const double mean = ac_sum / (kLow * kLow - 1);
  std::uint64_t hash = 0;
  for (int u = 0; u < kLow; ++u) {
    for (int v = 0; v < kLow; ++v) {
      if (coeff[u][v] > mean) hash |= std::uint64_t{1} << (kLow * u + v);
    }
  }
  return hash;
}

inline PrivacyScore phash_distance(const Image& a, const Image& b) {
  return {Metric::Phash, std::popcount(phash(a) ^ phash(b)) / 64.0};
}

}  // namespace mixpriv
