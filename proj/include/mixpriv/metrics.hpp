#pragma once

#include <algorithm>
#include <fmt/format.h>
#include <span>
#include <stdexcept>

#include "mixpriv/image.hpp"
#include "mixpriv/metrics/common.hpp"
#include "mixpriv/metrics/frechet.hpp"
#include "mixpriv/metrics/haarpsi.hpp"
#include "mixpriv/metrics/mse.hpp"
#include "mixpriv/metrics/phash.hpp"
#include "mixpriv/metrics/ssim.hpp"
#include "mixpriv/obfuscate.hpp"

namespace mixpriv {

inline PrivacyScore score(const Image& a, const Image& b, Metric metric) {
  switch (metric) {
    case Metric::Mse: return mse(a, b);
    case Metric::Dssim: return dssim(a, b);
    case Metric::Phash: return phash_distance(a, b);
    case Metric::Dhaar: return dhaar(a, b);
    case Metric::Fid:
      throw std::invalid_argument("score: fid compares feature sets; use frechet_distance");
  }
  throw std::invalid_argument("score: unknown metric");
}

// An obfuscated image is only as private as its most recognisable source, so
// the pairwise scores are aggregated with min.
inline PrivacyScore score_sample(const Image& obfuscated, std::span<const Image> sources, Metric metric) {
  if (sources.empty()) throw std::invalid_argument("score_sample: no source images");
  PrivacyScore best = score(obfuscated, sources.front(), metric);
  for (const Image& s : sources.subspan(1)) best.value = std::min(best.value, score(obfuscated, s, metric).value);
  return best;
}

inline PrivacyScore score_sample(const ObfuscatedSample& sample, std::span<const Image> sources, Metric metric) {
  return score_sample(sample.image, sources, metric);
}

}  // namespace mixpriv
