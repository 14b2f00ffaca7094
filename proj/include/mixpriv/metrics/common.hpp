#pragma once

#include <fmt/format.h>
#include <stdexcept>
#include <string_view>

namespace mixpriv {

enum class Metric { Mse, Dssim, Phash, Dhaar, Fid };

inline constexpr Metric kImageMetrics[] = {Metric::Mse, Metric::Dssim, Metric::Phash, Metric::Dhaar};

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Mse: return "mse";
    case Metric::Dssim: return "dssim";
    case Metric::Phash: return "phash";
    case Metric::Dhaar: return "dhaar";
    case Metric::Fid: return "fid";
  }
  return "?";
}

inline Metric parse_metric(std::string_view name) {
  for (Metric m : {Metric::Mse, Metric::Dssim, Metric::Phash, Metric::Dhaar, Metric::Fid}) {
    if (metric_name(m) == name) return m;
  }
  throw std::invalid_argument(fmt::format("unknown metric '{}'", name));
}

// Whether the metric lives on [0,1] (otherwise it is only bounded below by 0).
inline bool metric_is_bounded(Metric m) { return m == Metric::Dssim || m == Metric::Phash || m == Metric::Dhaar; }

// Larger value = more private.
struct PrivacyScore {
  Metric metric = Metric::Dssim;
  double value = 0.0;
};

}  // namespace mixpriv
