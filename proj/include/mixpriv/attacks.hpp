#pragma once

#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mixpriv/detail/csv.hpp"
#include "mixpriv/detail/parallel.hpp"
#include "mixpriv/image.hpp"
#include "mixpriv/metrics.hpp"
#include "mixpriv/obfuscate.hpp"
#include "mixpriv/raster.hpp"

namespace mixpriv {

// Adaptive local-statistics (Lee/Wiener) filter, per channel:
//   out = m + max(v - n, 0) / max(v, n) * (x - m)
// with m, v the mean and variance over a window x window neighbourhood
// (replicated borders). Without an explicit noise power, n is the mean local
// variance of the channel.
inline Image wiener_filter(const Image& img, int window = 3, std::optional<double> noise_power = std::nullopt) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument(fmt::format("wiener_filter: window {} must be odd and >= 1", window));
  if (noise_power && !(*noise_power >= 0.0)) throw std::invalid_argument("wiener_filter: noise power must be >= 0");
  const int w = img.width(), h = img.height(), r = window / 2;
  const double count = static_cast<double>(window) * window;
  Image out(w, h, img.channels());
  std::vector<double> mean(img.pixel_count()), var(img.pixel_count());

  for (int c = 0; c < img.channels(); ++c) {
    double var_sum = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) s += img.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1), c);
        }
        const double m = s / count;
        double v = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double d = img.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1), c) - m;
            v += d * d;
          }
        }
        v /= count;
        const std::size_t k = static_cast<std::size_t>(y) * w + x;
        mean[k] = m;
        var[k] = v;
        var_sum += v;
      }
    }
    const double n = noise_power.value_or(var_sum / static_cast<double>(img.pixel_count()));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t k = static_cast<std::size_t>(y) * w + x;
        const double denom = std::max(var[k], n);
        const double gain = denom > 0.0 ? std::max(var[k] - n, 0.0) / denom : 0.0;
        out.at(x, y, c) = mean[k] + gain * (img.at(x, y, c) - mean[k]);
      }
    }
  }
  return out;
}

// Baseline denoiser: plain Gaussian smoothing.
inline Image gaussian_denoise(const Image& img, const BlurSpec& spec) { return gaussian_blur(img, spec); }

inline Image gaussian_denoise(const Image& img, double sigma, int ksize) {
  return gaussian_blur(img, BlurSpec{sigma, ksize});
}

struct IdentityAttack {};
struct WienerAttack {
  int window = 3;
  std::optional<double> noise_power;
};
struct GaussianDenoiseAttack {
  BlurSpec blur = BlurSpec::from_kernel(5);
};
using Attack = std::variant<IdentityAttack, WienerAttack, GaussianDenoiseAttack>;

inline std::string_view attack_name(const Attack& a) {
  return std::visit(overloaded{
                        [](const IdentityAttack&) { return std::string_view("identity"); },
                        [](const WienerAttack&) { return std::string_view("wiener"); },
                        [](const GaussianDenoiseAttack&) { return std::string_view("gaussian-denoise"); },
                    },
                    a);
}

inline Image apply_attack(const Image& img, const Attack& attack) {
  return std::visit(overloaded{
                        [&](const IdentityAttack&) { return img; },
                        [&](const WienerAttack& w) { return wiener_filter(img, w.window, w.noise_power); },
                        [&](const GaussianDenoiseAttack& g) { return gaussian_denoise(img, g.blur); },
                    },
                    attack);
}

struct AttackReport {
  std::string sample_id;
  Metric metric = Metric::Dssim;
  double score_before = 0.0;
  double score_after = 0.0;
  double relative_drop = 0.0;  // 0 when score_before == 0
};

struct AttackSummary {
  double mean_before = 0.0;
  double mean_after = 0.0;
  double mean_drop = 0.0;
};

// `sources[k]` holds the originals of `samples[k]`.
inline std::vector<AttackReport> evaluate_attack(std::span<const ObfuscatedSample> samples,
                                                 std::span<const std::vector<Image>> sources, const Attack& attack,
                                                 Metric metric, unsigned threads = 0) {
  if (sources.size() != samples.size()) {
    throw std::invalid_argument(fmt::format("evaluate_attack: {} samples but {} source lists", samples.size(), sources.size()));
  }
  for (std::size_t k = 0; k < sources.size(); ++k) {
    if (sources[k].empty()) throw std::invalid_argument(fmt::format("evaluate_attack: sample {} has no sources", k));
  }
  std::vector<AttackReport> out(samples.size());
  detail::parallel_for(
      samples.size(),
      [&](std::size_t k) {
        AttackReport& r = out[k];
        r.sample_id = samples[k].sample_id.empty() ? std::to_string(k) : samples[k].sample_id;
        r.metric = metric;
        r.score_before = score_sample(samples[k].image, sources[k], metric).value;
        r.score_after = score_sample(apply_attack(samples[k].image, attack), sources[k], metric).value;
        r.relative_drop = r.score_before > 0.0 ? (r.score_before - r.score_after) / r.score_before : 0.0;
      },
      threads);
  return out;
}

inline AttackSummary summarize(std::span<const AttackReport> reports) {
  AttackSummary s;
  if (reports.empty()) return s;
  for (const auto& r : reports) {
    s.mean_before += r.score_before;
    s.mean_after += r.score_after;
    s.mean_drop += r.relative_drop;
  }
  const double n = static_cast<double>(reports.size());
  s.mean_before /= n;
  s.mean_after /= n;
  s.mean_drop /= n;
  return s;
}

// sample_id,metric,before,after,relative_drop rows, then a "mean" summary row.
inline void write_attack_csv(std::span<const AttackReport> reports, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("{}: cannot write", path.string()));
  out << "sample_id,metric,before,after,relative_drop\n";
  for (const auto& r : reports) {
    out << r.sample_id << ',' << metric_name(r.metric) << ',' << detail::sig9(r.score_before) << ','
        << detail::sig9(r.score_after) << ',' << detail::sig9(r.relative_drop) << '\n';
  }
  const auto s = summarize(reports);
  out << "mean," << (reports.empty() ? "" : metric_name(reports.front().metric)) << ',' << detail::sig9(s.mean_before)
      << ',' << detail::sig9(s.mean_after) << ',' << detail::sig9(s.mean_drop) << '\n';
}

}  // namespace mixpriv
