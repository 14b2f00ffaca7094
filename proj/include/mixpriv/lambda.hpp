#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>

#include "mixpriv/metrics.hpp"
#include "mixpriv/obfuscate.hpp"

namespace mixpriv {

// Grid search for the mixing weight that distorts both sources the most:
// maximises min(score(mix, xi), score(mix, xj)). Ties go to the smallest
// candidate, i.e. the one closest to an even mix.
inline double choose_lambda(const Image& xi, const Image& xj, Metric metric, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("choose_lambda: empty grid");
  for (double l : grid) {
    if (!(l >= 0.5 && l < 1.0)) throw std::invalid_argument("choose_lambda: grid values must lie in [0.5, 1)");
  }
  require_same_shape(xi, xj, "choose_lambda");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());

  const Label dummy(0, 2);
  const LabeledImage a{xi, dummy}, b{xj, dummy};
  double best_lambda = sorted.front();
  double best_score = -1.0;
  for (double l : sorted) {
    Rng rng(0);
    const Image m = mix(a, b, MixWeights::pair(l), rng).image;
    const double s = std::min(score(m, xi, metric).value, score(m, xj, metric).value);
    if (s > best_score) {
      best_score = s;
      best_lambda = l;
    }
  }
  return best_lambda;
}

}  // namespace mixpriv
