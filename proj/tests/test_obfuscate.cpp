#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mixpriv/obfuscate.hpp"

using namespace mixpriv;
using testing_support::random_image;

namespace {

struct Pair {
  LabeledImage xi, xj;
};

Pair random_pair(std::mt19937_64& gen, int w = 24, int h = 19, int c = 3) {
  return {{random_image(gen, w, h, c), Label(1, 5)}, {random_image(gen, w, h, c), Label(3, 5)}};
}

std::vector<double> sorted_tile(const Image& img, const Tile& t, int c) {
  std::vector<double> v;
  for (int y = t.y0; y < t.y0 + t.height; ++y) {
    for (int x = t.x0; x < t.x0 + t.width; ++x) v.push_back(img.at(x, y, c));
  }
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(MixWeights, Validation) {
  EXPECT_THROW((MixWeights{1.0}), std::invalid_argument);
  EXPECT_THROW((MixWeights{0.6, 0.6}), std::invalid_argument);
  EXPECT_THROW((MixWeights{1.2, -0.2}), std::invalid_argument);
  EXPECT_THROW(MixWeights::pair(1.5), std::invalid_argument);
  EXPECT_NO_THROW((MixWeights{0.7, 0.2, 0.1}));
  EXPECT_EQ(MixWeights::pair(0.75)[1], 0.25);
}

TEST(Mix, ConvexCombinationPerSample) {
  std::mt19937_64 gen(1);
  auto [xi, xj] = random_pair(gen);
  Rng rng(0);
  const auto s = mix(xi, xj, MixWeights::pair(0.7), rng);
  for (std::size_t k = 0; k < s.image.sample_count(); ++k) {
    ASSERT_NEAR(s.image.data()[k], 0.7 * xi.image.data()[k] + 0.3 * xj.image.data()[k], 1e-12);
  }
  EXPECT_EQ(s.public_label, xi.label);
}

TEST(Mix, ThreeWayLabelGoesToLargestWeight) {
  std::mt19937_64 gen(2);
  const LabeledImage src[3] = {{random_image(gen, 8, 8), Label(0, 3)},
                               {random_image(gen, 8, 8), Label(1, 3)},
                               {random_image(gen, 8, 8), Label(2, 3)}};
  Rng rng(0);
  const auto s = mix(src, MixWeights{0.2, 0.5, 0.3}, rng);
  EXPECT_EQ(s.public_label, Label(1, 3));
  EXPECT_NEAR(s.image.at(3, 4, 1),
              0.2 * src[0].image.at(3, 4, 1) + 0.5 * src[1].image.at(3, 4, 1) + 0.3 * src[2].image.at(3, 4, 1), 1e-12);
}

TEST(Mix, EqualWeightTieIsSeededAndUnbiased) {
  std::mt19937_64 gen(3);
  auto [xi, xj] = random_pair(gen, 4, 4);
  int first = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng a(seed), b(seed);
    const auto s1 = mix(xi, xj, MixWeights::pair(0.5), a);
    const auto s2 = mix(xi, xj, MixWeights::pair(0.5), b);
    ASSERT_EQ(s1.public_label, s2.public_label);
    first += s1.public_label == xi.label;
  }
  EXPECT_NEAR(first, 1000, 120);
}

TEST(Mix, RejectsShapeMismatch) {
  std::mt19937_64 gen(4);
  const LabeledImage a{random_image(gen, 8, 8), Label(0, 2)};
  const LabeledImage b{random_image(gen, 8, 9), Label(1, 2)};
  Rng rng(0);
  EXPECT_THROW(mix(a, b, MixWeights::pair(0.6), rng), DimensionMismatch);
}

TEST(GraftMix, GraftsExactlyRoundedCountSharedAcrossChannels) {
  std::mt19937_64 gen(5);
  auto [xi, xj] = random_pair(gen, 13, 11);
  for (double p : {0.1, 0.5, 0.77}) {
    Rng rng(9);
    const auto s = graft_mix(xi, xj, p, MixWeights::pair(0.6), rng);
    const auto blended = mix(xi, xj, MixWeights::pair(0.6), rng).image;
    std::size_t grafted = 0;
    for (int y = 0; y < 11; ++y) {
      for (int x = 0; x < 13; ++x) {
        int from_i = 0;
        for (int c = 0; c < 3; ++c) from_i += s.image.at(x, y, c) == xi.image.at(x, y, c);
        // Random doubles never collide with their blend, so the three
        // channels agree on where each pixel came from.
        ASSERT_TRUE(from_i == 0 || from_i == 3);
        if (from_i == 0) {
          for (int c = 0; c < 3; ++c) ASSERT_EQ(s.image.at(x, y, c), blended.at(x, y, c));
        }
        grafted += from_i == 3;
      }
    }
    EXPECT_EQ(grafted, static_cast<std::size_t>(std::nearbyint(p * 143)));
  }
}

TEST(GraftMix, LabelRule) {
  std::mt19937_64 gen(6);
  auto [xi, xj] = random_pair(gen, 4, 4);
  Rng rng(0);
  // p + (1-p) lambda: 0.2 + 0.8 * 0.3 = 0.44 < 1/2
  EXPECT_EQ(graft_mix(xi, xj, 0.2, MixWeights::pair(0.3), rng).public_label, xj.label);
  // 0.4 + 0.6 * 0.3 = 0.58 >= 1/2
  EXPECT_EQ(graft_mix(xi, xj, 0.4, MixWeights::pair(0.3), rng).public_label, xi.label);
  EXPECT_THROW(graft_mix(xi, xj, 1.1, MixWeights::pair(0.3), rng), std::invalid_argument);
}

TEST(BlockShuffle, ConservesEveryTileIncludingRemainders) {
  std::mt19937_64 gen(7);
  for (auto [w, h] : {std::pair{32, 32}, std::pair{37, 21}, std::pair{9, 50}}) {
    const Image img = random_image(gen, w, h);
    for (int b : {1, 4, 8, 16}) {
      Rng rng(static_cast<std::uint64_t>(b));
      const Image s = block_shuffle(img, b, rng);
      for (const Tile& t : tile_grid(w, h, b)) {
        for (int c = 0; c < 3; ++c) ASSERT_EQ(sorted_tile(s, t, c), sorted_tile(img, t, c));
      }
      if (b > 1) {
        EXPECT_NE(s, img);
      }
    }
  }
}

TEST(BlockShuffle, PermutationSharedAcrossChannels) {
  // Encode the position in every channel; a shared permutation keeps them equal.
  Image img(8, 8, 3);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = x + 8 * y;
    }
  }
  Rng rng(1);
  const Image s = block_shuffle(img, 4, rng);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      EXPECT_EQ(s.at(x, y, 0), s.at(x, y, 1));
      EXPECT_EQ(s.at(x, y, 0), s.at(x, y, 2));
    }
  }
}

TEST(NoiseMix, NoiseStatisticsAndClamp) {
  const LabeledImage a{Image(64, 64, 1, 128.0), Label(0, 2)};
  const LabeledImage b{Image(64, 64, 1, 128.0), Label(1, 2)};
  Rng rng(3);
  const auto s = noise_mix(a, b, 20.0, MixWeights::pair(0.5), rng);
  double m = 0, v = 0;
  for (double x : s.image.data()) m += x;
  m /= 4096;
  for (double x : s.image.data()) v += (x - m) * (x - m);
  v /= 4095;
  // lambda z_i + (1-lambda) z_j has variance (0.25 + 0.25) * 400.
  EXPECT_NEAR(m, 128.0, 0.5);
  EXPECT_NEAR(v, 200.0, 15.0);

  const LabeledImage white{Image(16, 16, 1, 255.0), Label(0, 2)};
  Rng rng2(4);
  const auto c = noise_mix(white, white, 40.0, MixWeights::pair(0.5), rng2);
  for (double x : c.image.data()) {
    ASSERT_LE(x, 255.0);
    ASSERT_GE(x, 0.0);
  }
}

TEST(Pixelize, TilesBecomeTheirMeans) {
  Image img(5, 3, 1);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 5; ++x) img.at(x, y) = x + 5 * y;
  }
  const Image p = pixelize(img, 2);
  EXPECT_DOUBLE_EQ(p.at(0, 0), (0 + 1 + 5 + 6) / 4.0);
  EXPECT_DOUBLE_EQ(p.at(4, 1), (4 + 9) / 2.0);
  EXPECT_DOUBLE_EQ(p.at(2, 2), (12 + 13) / 2.0);
  EXPECT_DOUBLE_EQ(p.at(4, 2), 14.0);
}

TEST(Schemes, IdentityParametersReproduceMixBitForBit) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto [xi, xj] = random_pair(gen, 20 + trial, 17);
    const auto w = MixWeights::pair(trial % 2 ? 0.5 : 0.65);
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(trial);
    Rng r0(seed);
    const auto ref = mix(xi, xj, w, r0);
    const auto check = [&](auto&& op) {
      Rng r(seed);
      const ObfuscatedSample s = op(r);
      EXPECT_EQ(s.image, ref.image);
      EXPECT_EQ(s.public_label, ref.public_label);
    };
    check([&](Rng& r) { return noise_mix(xi, xj, 0.0, w, r); });
    check([&](Rng& r) { return shuffle_mix(xi, xj, 1, w, r); });
    check([&](Rng& r) { return pixelize_mix(xi, xj, 1, w, r); });
    check([&](Rng& r) { return blur_mix(xi, xj, BlurSpec::from_kernel(1), w, r); });
    check([&](Rng& r) { return graft_mix(xi, xj, 0.0, w, r); });
  }
}

TEST(BlurMix, CommutesWithMixing) {
  std::mt19937_64 gen(9);
  auto [xi, xj] = random_pair(gen, 40, 30);
  const auto blur = BlurSpec::from_kernel(17);
  const auto w = MixWeights::pair(0.6);
  Rng r1(0), r2(0);
  const Image a = blur_mix(xi, xj, blur, w, r1).image;
  const Image b = gaussian_blur(mix(xi, xj, w, r2).image, blur);
  for (std::size_t k = 0; k < a.sample_count(); ++k) ASSERT_NEAR(a.data()[k], b.data()[k], 1e-9);
}

TEST(Dispatch, ObfuscateRoutesEveryScheme) {
  std::mt19937_64 gen(10);
  auto [xi, xj] = random_pair(gen, 16, 16);
  const LabeledImage src[2] = {xi, xj};
  const auto w = MixWeights::pair(0.6);
  const std::vector<ObfuscationParams> all = {MixParams{w},         GraftMixParams{w, 0.5},
                                              ShuffleMixParams{w, 4}, NoiseMixParams{w, 10},
                                              PixelizeMixParams{w, 4}, BlurMixParams{w, BlurSpec::from_kernel(5)}};
  for (const auto& params : all) {
    Rng a(1), b(1);
    const auto s1 = obfuscate(params, src, a);
    const auto s2 = obfuscate(params, src, b);
    EXPECT_EQ(s1.image, s2.image) << describe(params);
    EXPECT_EQ(s1.provenance.weights, w);
    EXPECT_EQ(parse_scheme(scheme_name(scheme_of(params))), scheme_of(params));
  }
  EXPECT_THROW(parse_scheme("swirl"), std::invalid_argument);
}

TEST(Dispatch, DescribeIsReadable) {
  EXPECT_EQ(describe(NoiseMixParams{MixWeights::pair(0.7), 20}), "weights=0.7/0.3;sigma=20");
  EXPECT_EQ(describe(BlurMixParams{MixWeights::pair(0.5), BlurSpec::from_kernel(35)}),
            "weights=0.5/0.5;k=35;blur_sigma=5.6");
}
