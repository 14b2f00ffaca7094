#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <vector>

#include "mixpriv/image.hpp"
#include "mixpriv/metrics/common.hpp"

namespace mixpriv {

struct HaarPsiParams {
  double c = 30.0;
  double alpha = 4.2;
  bool subsample = true;
};

namespace detail {

// Plain 2-D plane used by the HaarPSI construction.
struct Plane {
  int w = 0, h = 0;
  std::vector<double> v;
  Plane() = default;
  Plane(int width, int height) : w(width), h(height), v(static_cast<std::size_t>(width) * height, 0.0) {}
  double& operator()(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double operator()(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

// 2-D convolution, zero fill outside the plane, output cropped to the input
// size with the centering of scipy.signal.convolve2d(mode="same").
inline Plane convolve_same(const Plane& in, const Plane& k) {
  Plane out(in.w, in.h);
  const int ox = (k.w - 1) / 2, oy = (k.h - 1) / 2;
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < in.w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < k.h; ++j) {
        const int sy = y + oy - j;
        if (sy < 0 || sy >= in.h) continue;
        for (int i = 0; i < k.w; ++i) {
          const int sx = x + ox - i;
          if (sx < 0 || sx >= in.w) continue;
          acc += k(i, j) * in(sx, sy);
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

inline Plane box2(const Plane& in) {
  Plane k(2, 2);
  std::fill(k.v.begin(), k.v.end(), 0.25);
  return convolve_same(in, k);
}

inline Plane subsample2(const Plane& in) {
  const Plane s = box2(in);
  Plane out((in.w + 1) / 2, (in.h + 1) / 2);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) out(x, y) = s(2 * x, 2 * y);
  }
  return out;
}

// Haar filter of the given scale: 2^-scale on a 2^scale square, top half negated.
inline Plane haar_filter(int scale, bool transpose) {
  const int n = 1 << scale;
  Plane k(n, n);
  const double mag = std::ldexp(1.0, -scale);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int row = transpose ? x : y;
      k(x, y) = row < n / 2 ? -mag : mag;
    }
  }
  return k;
}

inline double logistic(double x, double alpha) { return 1.0 / (1.0 + std::exp(-alpha * x)); }
inline double logit(double p, double alpha) { return std::log(p / (1.0 - p)) / alpha; }

struct YiqPlanes {
  Plane y, i, q;
  bool color = false;
};

inline YiqPlanes to_yiq(const Image& img) {
  YiqPlanes out;
  out.color = img.channels() == 3;
  out.y = Plane(img.width(), img.height());
  if (out.color) {
    out.i = Plane(img.width(), img.height());
    out.q = Plane(img.width(), img.height());
  }
  for (int yy = 0; yy < img.height(); ++yy) {
    for (int xx = 0; xx < img.width(); ++xx) {
      if (!out.color) {
        out.y(xx, yy) = img.at(xx, yy);
        continue;
      }
      const double r = img.at(xx, yy, 0), g = img.at(xx, yy, 1), b = img.at(xx, yy, 2);
      out.y(xx, yy) = 0.299 * r + 0.587 * g + 0.114 * b;
      out.i(xx, yy) = 0.596 * r - 0.274 * g - 0.322 * b;
      out.q(xx, yy) = 0.211 * r - 0.523 * g + 0.312 * b;
    }
  }
  return out;
}

}  // namespace detail

// Haar wavelet-based perceptual similarity index in [0,1].
//
// Luma is decomposed with three-scale Haar filters along both axes. Scales 1
// and 2 give local similarities (2|a||b| + C) / (a^2 + b^2 + C); the larger
// scale-3 magnitude of either image weights each position. Colour images add
// an I/Q chroma term weighted by the mean of the two luma weights. The
// weighted mean of logistic(similarity) is mapped back through the inverse
// logistic and squared.
inline double haarpsi_index(const Image& a, const Image& b, const HaarPsiParams& p = {}) {
  using detail::Plane;
  require_same_shape(a, b, "haarpsi");
  if (std::min(a.width(), a.height()) < 8) {
    throw DimensionMismatch(fmt::format("haarpsi: image {}x{} is smaller than 8x8", a.width(), a.height()));
  }
  auto ya = detail::to_yiq(a);
  auto yb = detail::to_yiq(b);
  if (p.subsample) {
    for (auto* planes : {&ya, &yb}) {
      planes->y = detail::subsample2(planes->y);
      if (planes->color) {
        planes->i = detail::subsample2(planes->i);
        planes->q = detail::subsample2(planes->q);
      }
    }
  }

  constexpr int kScales = 3;
  std::array<Plane, 2 * kScales> ca, cb;  // [orientation * kScales + scale - 1]
  for (int o = 0; o < 2; ++o) {
    for (int s = 1; s <= kScales; ++s) {
      const Plane k = detail::haar_filter(s, o == 1);
      ca[static_cast<std::size_t>(o * kScales + s - 1)] = detail::convolve_same(ya.y, k);
      cb[static_cast<std::size_t>(o * kScales + s - 1)] = detail::convolve_same(yb.y, k);
    }
  }

  const double c = p.c;
  auto sim = [c](double m1, double m2) { return (2.0 * m1 * m2 + c) / (m1 * m1 + m2 * m2 + c); };

  const std::size_t n = ya.y.v.size();
  Plane ia, ib, qa, qb;
  if (ya.color) {
    ia = detail::box2(ya.i);
    ib = detail::box2(yb.i);
    qa = detail::box2(ya.q);
    qb = detail::box2(yb.q);
  }

  double num = 0.0, den = 0.0, plain = 0.0;
  std::size_t terms = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double wsum = 0.0;
    for (int o = 0; o < 2; ++o) {
      const std::size_t base = static_cast<std::size_t>(o * kScales);
      const double w = std::max(std::abs(ca[base + 2].v[k]), std::abs(cb[base + 2].v[k]));
      const double local = (sim(std::abs(ca[base].v[k]), std::abs(cb[base].v[k])) +
                            sim(std::abs(ca[base + 1].v[k]), std::abs(cb[base + 1].v[k]))) /
                           2.0;
      const double l = detail::logistic(local, p.alpha);
      num += l * w;
      den += w;
      wsum += w;
      plain += l;
      ++terms;
    }
    if (ya.color) {
      const double si = sim(std::abs(ia.v[k]), std::abs(ib.v[k]));
      const double sq = sim(std::abs(qa.v[k]), std::abs(qb.v[k]));
      const double w = wsum / 2.0;
      const double l = detail::logistic((si + sq) / 2.0, p.alpha);
      num += l * w;
      den += w;
      plain += l;
      ++terms;
    }
  }
  // All-zero weights only arise for black luma; fall back to an unweighted mean.
  const double pooled = den > 0.0 ? num / den : plain / static_cast<double>(terms);
  const double v = detail::logit(pooled, p.alpha);
  return std::clamp(v * v, 0.0, 1.0);
}

inline PrivacyScore dhaar(const Image& a, const Image& b, const HaarPsiParams& p = {}) {
  return {Metric::Dhaar, 1.0 - haarpsi_index(a, b, p)};
}

}  // namespace mixpriv
