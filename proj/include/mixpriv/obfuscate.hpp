#pragma once

#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixpriv/image.hpp"
#include "mixpriv/raster.hpp"
#include "mixpriv/rng.hpp"

namespace mixpriv {

class MixWeights {
 public:
  MixWeights() : weights_{0.5, 0.5} {}
  explicit MixWeights(std::vector<double> weights) : weights_(std::move(weights)) { validate(); }
  MixWeights(std::initializer_list<double> weights) : weights_(weights) { validate(); }

  // (lambda, 1 - lambda)
  static MixWeights pair(double lambda) { return MixWeights{lambda, 1.0 - lambda}; }

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }

  friend bool operator==(const MixWeights&, const MixWeights&) = default;

 private:
  void validate() const {
    if (weights_.size() < 2) throw std::invalid_argument("MixWeights: need at least two weights");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument(fmt::format("MixWeights: weight {} outside [0,1]", w));
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument(fmt::format("MixWeights: weights sum to {}", sum));
  }

  std::vector<double> weights_;
};

// Client-only half of a sample: never shipped with the image.
struct Provenance {
  std::vector<std::size_t> source_ids;  // indices into the operator's source list, or dataset ids
  MixWeights weights;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

struct ObfuscatedSample {
  std::string sample_id;
  Image image;
  Label public_label;
  Provenance provenance;
};

namespace detail {

inline void require_pair(const LabeledImage& xi, const LabeledImage& xj, const MixWeights& w,
                         const char* op) {
  require_same_shape(xi.image, xj.image, op);
  if (w.size() != 2) throw std::invalid_argument(fmt::format("{}: expects exactly two weights", op));
}

// Index of the largest weight; exact ties are settled by one uniform draw.
inline std::size_t dominant_source(std::span<const double> contribution, Rng& rng) {
  double best = contribution[0];
  for (double c : contribution) best = std::max(best, c);
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < contribution.size(); ++i) {
    if (contribution[i] == best) tied.push_back(i);
  }
  if (tied.size() == 1) return tied.front();
  return tied[static_cast<std::size_t>(rng.below(tied.size()))];
}

inline ObfuscatedSample make_sample(Image image, Label label, const MixWeights& w, std::size_t n,
                                    const Rng& rng) {
  Provenance prov;
  prov.source_ids.resize(n);
  std::iota(prov.source_ids.begin(), prov.source_ids.end(), std::size_t{0});
  prov.weights = w;
  prov.seed = rng.seed();
  prov.stream_id = rng.stream_id();
  return ObfuscatedSample{{}, std::move(image), label, std::move(prov)};
}

// lambda * a + (1 - lambda) * b, sample by sample. Every two-source operator
// funnels through here so that identity parameters reproduce mix() exactly.
inline Image blend(const Image& a, const Image& b, const MixWeights& w) {
  Image out(a.width(), a.height(), a.channels());
  auto pa = a.data(), pb = b.data();
  auto po = out.data();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] = w[0] * pa[i] + w[1] * pb[i];
  return out;
}

inline Label pair_label(const LabeledImage& xi, const LabeledImage& xj, const MixWeights& w, Rng& rng) {
  const double c[2] = {w[0], w[1]};
  return dominant_source(c, rng) == 0 ? xi.label : xj.label;
}

}  // namespace detail

// Convex combination of n >= 2 same-shape images; the label goes to the
// heaviest weight.
inline ObfuscatedSample mix(std::span<const LabeledImage> sources, const MixWeights& weights, Rng& rng) {
  if (sources.size() < 2) throw std::invalid_argument("mix: need at least two sources");
  if (sources.size() != weights.size()) {
    throw std::invalid_argument(fmt::format("mix: {} sources but {} weights", sources.size(), weights.size()));
  }
  for (const auto& s : sources) require_same_shape(sources[0].image, s.image, "mix");

  const Label label = sources[detail::dominant_source(weights.values(), rng)].label;
  Image out;
  if (sources.size() == 2) {
    out = detail::blend(sources[0].image, sources[1].image, weights);
  } else {
    out = Image(sources[0].image.width(), sources[0].image.height(), sources[0].image.channels());
    auto po = out.data();
    for (std::size_t k = 0; k < sources.size(); ++k) {
      auto ps = sources[k].image.data();
      for (std::size_t i = 0; i < po.size(); ++i) {
        po[i] = k == 0 ? weights[0] * ps[i] : po[i] + weights[k] * ps[i];
      }
    }
  }
  return detail::make_sample(std::move(out), label, weights, sources.size(), rng);
}

inline ObfuscatedSample mix(const LabeledImage& xi, const LabeledImage& xj, const MixWeights& weights, Rng& rng) {
  const LabeledImage both[2] = {xi, xj};
  return mix(std::span<const LabeledImage>(both), weights, rng);
}

// Keeps round(p * W * H) pixels of xi verbatim (same positions in every
// channel) and mixes the rest. Label xi iff p + (1 - p) * lambda >= 1/2; an
// exact 1/2 is settled by a uniform draw, as for mix().
inline ObfuscatedSample graft_mix(const LabeledImage& xi, const LabeledImage& xj, double p,
                                  const MixWeights& weights, Rng& rng) {
  detail::require_pair(xi, xj, weights, "graft_mix");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("graft_mix: p must lie in [0,1]");

  const double share_i = p + (1.0 - p) * weights[0];
  const double share[2] = {share_i, 1.0 - share_i};
  const Label label = detail::dominant_source(share, rng) == 0 ? xi.label : xj.label;

  Image out = detail::blend(xi.image, xj.image, weights);
  const std::size_t pixels = xi.image.pixel_count();
  const auto grafted = static_cast<std::size_t>(std::nearbyint(p * static_cast<double>(pixels)));
  if (grafted > 0) {
    // Partial Fisher-Yates: the first `grafted` entries are a uniform subset.
    std::vector<std::size_t> order(pixels);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = 0; k < grafted; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(pixels - k));
      std::swap(order[k], order[j]);
    }
    const int ch = xi.image.channels();
    auto src = xi.image.data();
    auto dst = out.data();
    for (std::size_t k = 0; k < grafted; ++k) {
      for (int c = 0; c < ch; ++c) {
        const std::size_t s = order[k] * static_cast<std::size_t>(ch) + static_cast<std::size_t>(c);
        dst[s] = src[s];
      }
    }
  }
  return detail::make_sample(std::move(out), label, weights, 2, rng);
}

// S(x, b): each b x b tile gets its own fresh permutation, shared by all channels.
inline Image block_shuffle(const Image& img, int block, Rng& rng) {
  if (block < 1) throw std::invalid_argument("block_shuffle: block edge must be >= 1");
  if (block == 1) return img;
  Image out = img;
  std::vector<std::size_t> perm;
  for (const Tile& t : tile_grid(img.width(), img.height(), block)) {
    const std::size_t n = static_cast<std::size_t>(t.width) * static_cast<std::size_t>(t.height);
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    for (std::size_t k = 0; k < n; ++k) {
      const int dx = t.x0 + static_cast<int>(k % static_cast<std::size_t>(t.width));
      const int dy = t.y0 + static_cast<int>(k / static_cast<std::size_t>(t.width));
      const int sx = t.x0 + static_cast<int>(perm[k] % static_cast<std::size_t>(t.width));
      const int sy = t.y0 + static_cast<int>(perm[k] / static_cast<std::size_t>(t.width));
      for (int c = 0; c < img.channels(); ++c) out.at(dx, dy, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

inline ObfuscatedSample shuffle_mix(const LabeledImage& xi, const LabeledImage& xj, int block,
                                    const MixWeights& weights, Rng& rng) {
  detail::require_pair(xi, xj, weights, "shuffle_mix");
  if (block < 1) throw std::invalid_argument("shuffle_mix: block edge must be >= 1");
  const Label label = detail::pair_label(xi, xj, weights, rng);
  const Image si = block_shuffle(xi.image, block, rng);
  const Image sj = block_shuffle(xj.image, block, rng);
  return detail::make_sample(detail::blend(si, sj, weights), label, weights, 2, rng);
}

// i.i.d. N(0, sigma^2) per sample.
inline Image gaussian_noise(int width, int height, int channels, double sigma, Rng& rng) {
  Image z(width, height, channels);
  for (double& v : z.data()) v = sigma * rng.normal();
  return z;
}

inline ObfuscatedSample noise_mix(const LabeledImage& xi, const LabeledImage& xj, double sigma,
                                  const MixWeights& weights, Rng& rng) {
  detail::require_pair(xi, xj, weights, "noise_mix");
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise_mix: sigma must be >= 0");
  const Label label = detail::pair_label(xi, xj, weights, rng);
  if (sigma == 0.0) {
    return detail::make_sample(detail::blend(xi.image, xj.image, weights), label, weights, 2, rng);
  }
  const Image& a = xi.image;
  Image ni = gaussian_noise(a.width(), a.height(), a.channels(), sigma, rng);
  Image nj = gaussian_noise(a.width(), a.height(), a.channels(), sigma, rng);
  auto pi = a.data(), pj = xj.image.data();
  for (std::size_t k = 0; k < ni.sample_count(); ++k) {
    ni.data()[k] += pi[k];
    nj.data()[k] += pj[k];
  }
  return detail::make_sample(clamped(detail::blend(ni, nj, weights)), label, weights, 2, rng);
}

// R(x, s): every tile replaced by its per-channel mean.
inline Image pixelize(const Image& img, int square) {
  if (square < 1) throw std::invalid_argument("pixelize: square edge must be >= 1");
  if (square == 1) return img;
  return block_map(img, square, [](std::span<double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    for (double& x : v) x = mean;
  });
}

inline ObfuscatedSample pixelize_mix(const LabeledImage& xi, const LabeledImage& xj, int square,
                                     const MixWeights& weights, Rng& rng) {
  detail::require_pair(xi, xj, weights, "pixelize_mix");
  if (square < 1) throw std::invalid_argument("pixelize_mix: square edge must be >= 1");
  const Label label = detail::pair_label(xi, xj, weights, rng);
  return detail::make_sample(detail::blend(pixelize(xi.image, square), pixelize(xj.image, square), weights),
                             label, weights, 2, rng);
}

inline ObfuscatedSample blur_mix(const LabeledImage& xi, const LabeledImage& xj, const BlurSpec& blur,
                                 const MixWeights& weights, Rng& rng) {
  detail::require_pair(xi, xj, weights, "blur_mix");
  blur.validate();
  const Label label = detail::pair_label(xi, xj, weights, rng);
  return detail::make_sample(
      detail::blend(gaussian_blur(xi.image, blur), gaussian_blur(xj.image, blur), weights), label, weights, 2,
      rng);
}

enum class Scheme { Mix, GraftMix, ShuffleMix, NoiseMix, PixelizeMix, BlurMix };

inline constexpr Scheme kAllSchemes[] = {Scheme::Mix,      Scheme::GraftMix,    Scheme::ShuffleMix,
                                         Scheme::NoiseMix, Scheme::PixelizeMix, Scheme::BlurMix};

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Mix: return "mix";
    case Scheme::GraftMix: return "graft-mix";
    case Scheme::ShuffleMix: return "shuffle-mix";
    case Scheme::NoiseMix: return "noise-mix";
    case Scheme::PixelizeMix: return "pixelize-mix";
    case Scheme::BlurMix: return "blur-mix";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  throw std::invalid_argument(fmt::format("unknown scheme '{}'", name));
}

struct MixParams {
  MixWeights weights;
};
struct GraftMixParams {
  MixWeights weights;
  double p = 0.5;
};
struct ShuffleMixParams {
  MixWeights weights;
  int block = 4;
};
struct NoiseMixParams {
  MixWeights weights;
  double sigma = 20.0;
};
struct PixelizeMixParams {
  MixWeights weights;
  int square = 16;
};
struct BlurMixParams {
  MixWeights weights;
  BlurSpec blur = BlurSpec::from_kernel(17);
};

using ObfuscationParams =
    std::variant<MixParams, GraftMixParams, ShuffleMixParams, NoiseMixParams, PixelizeMixParams, BlurMixParams>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline Scheme scheme_of(const ObfuscationParams& params) {
  return static_cast<Scheme>(params.index());
}

inline const MixWeights& weights_of(const ObfuscationParams& params) {
  return std::visit([](const auto& p) -> const MixWeights& { return p.weights; }, params);
}

inline ObfuscationParams with_weights(ObfuscationParams params, MixWeights w) {
  std::visit([&](auto& p) { p.weights = std::move(w); }, params);
  return params;
}

// Scheme-specific parameters as "key=value" pairs joined by ';', printed to
// 6 significant digits.
inline std::string describe(const ObfuscationParams& params) {
  std::string w;
  for (double x : weights_of(params).values()) w += fmt::format("{}{:.6g}", w.empty() ? "" : "/", x);
  return std::visit(overloaded{
                        [&](const MixParams&) { return fmt::format("weights={}", w); },
                        [&](const GraftMixParams& p) { return fmt::format("weights={};p={:.6g}", w, p.p); },
                        [&](const ShuffleMixParams& p) { return fmt::format("weights={};b={}", w, p.block); },
                        [&](const NoiseMixParams& p) { return fmt::format("weights={};sigma={:.6g}", w, p.sigma); },
                        [&](const PixelizeMixParams& p) { return fmt::format("weights={};s={}", w, p.square); },
                        [&](const BlurMixParams& p) {
                          return fmt::format("weights={};k={};blur_sigma={:.6g}", w, p.blur.ksize, p.blur.sigma);
                        },
                    },
                    params);
}

inline ObfuscatedSample obfuscate(const ObfuscationParams& params, std::span<const LabeledImage> sources, Rng& rng) {
  if (!std::holds_alternative<MixParams>(params) && sources.size() != 2) {
    throw std::invalid_argument(fmt::format("{}: combined schemes take exactly two sources",
                                            scheme_name(scheme_of(params))));
  }
  return std::visit(
      overloaded{
          [&](const MixParams& p) { return mix(sources, p.weights, rng); },
          [&](const GraftMixParams& p) { return graft_mix(sources[0], sources[1], p.p, p.weights, rng); },
          [&](const ShuffleMixParams& p) { return shuffle_mix(sources[0], sources[1], p.block, p.weights, rng); },
          [&](const NoiseMixParams& p) { return noise_mix(sources[0], sources[1], p.sigma, p.weights, rng); },
          [&](const PixelizeMixParams& p) { return pixelize_mix(sources[0], sources[1], p.square, p.weights, rng); },
          [&](const BlurMixParams& p) { return blur_mix(sources[0], sources[1], p.blur, p.weights, rng); },
      },
      params);
}

}  // namespace mixpriv
