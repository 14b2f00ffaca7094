#pragma once

#include "mixpriv/image.hpp"
#include "mixpriv/metrics/common.hpp"

namespace mixpriv {

inline PrivacyScore mse(const Image& a, const Image& b) {
  require_same_shape(a, b, "mse");
  auto pa = a.data(), pb = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    sum += d * d;
  }
  return {Metric::Mse, sum / static_cast<double>(pa.size())};
}

}  // namespace mixpriv
