#include <resacc/errors.hpp>
#include <resacc/transform.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace resacc {
namespace {

std::array<double, 64> random_block(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::array<double, 64> b{};
  for (auto& v : b) v = d(rng);
  return b;
}

TEST(Dct, MatchesDirectSummation) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 200; ++n) {
    auto x = random_block(rng, -255, 255);
    auto fast = dct8x8(x);
    auto slow = oracle::naive_dct(x);
    for (int i = 0; i < 64; ++i) ASSERT_NEAR(fast.values[i], slow[i], 1e-9);
  }
}

TEST(Dct, InverseMatchesDirectSummation) {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 100; ++n) {
    CoeffBlock c;
    auto r = random_block(rng, -2000, 2000);
    std::copy(r.begin(), r.end(), c.values.begin());
    auto fast = idct8x8(c);
    auto slow = oracle::naive_idct(r);
    for (int i = 0; i < 64; ++i) ASSERT_NEAR(fast[i], slow[i], 1e-9);
  }
}

TEST(Dct, RoundTripAndEnergy) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 500; ++n) {
    auto x = random_block(rng, -255, 255);
    auto c = dct8x8(x);
    auto back = idct8x8(c);
    double ex = 0, ec = 0;
    for (int i = 0; i < 64; ++i) {
      ASSERT_NEAR(back[i], x[i], 1e-9);
      ex += x[i] * x[i];
      ec += c.values[i] * c.values[i];
    }
    ASSERT_NEAR(ex, ec, 1e-6 * ex);
  }
}

TEST(Dct, ConstantBlockHasOnlyDc) {
  std::array<double, 64> x;
  x.fill(10.0);
  auto c = dct8x8(x);
  EXPECT_NEAR(c.values[0], 80.0, 1e-12);
  for (int i = 1; i < 64; ++i) EXPECT_NEAR(c.values[i], 0.0, 1e-12);
}

TEST(Quantize, RoundsHalfAwayFromZero) {
  CoeffBlock c;
  c.values[0] = 12.0;
  c.values[1] = -12.0;
  c.values[2] = 7.9;
  c.values[3] = 1.0;
  auto q = quantize(c, 8);
  EXPECT_EQ(q.values[0], 2);
  EXPECT_EQ(q.values[1], -2);
  EXPECT_EQ(q.values[2], 1);
  EXPECT_EQ(q.values[3], 0);
  EXPECT_EQ(q.qscale, 8);
}

TEST(Quantize, IdentityForIntegersAtScaleOne) {
  CoeffBlock c;
  for (int i = 0; i < 64; ++i) c.values[i] = i - 32;
  auto q = quantize(c, 1);
  for (int i = 0; i < 64; ++i) EXPECT_EQ(q.values[i], i - 32);
  auto d = dequantize(q);
  EXPECT_EQ(d, c);
}

TEST(Quantize, SaturatesAndRejectsBadScale) {
  CoeffBlock c;
  c.values[0] = 1e9;
  c.values[1] = -1e9;
  auto q = quantize(c, 1);
  EXPECT_EQ(q.values[0], 32767);
  EXPECT_EQ(q.values[1], -32768);
  EXPECT_THROW(quantize(c, 0), FormatError);
}

TEST(Quantize, ErrorBoundedByHalfStep) {
  std::mt19937_64 rng(4);
  for (int qs : {1, 3, 8, 16}) {
    auto x = random_block(rng, -255, 255);
    auto c = dct8x8(x);
    auto d = dequantize(quantize(c, qs));
    for (int i = 0; i < 64; ++i) ASSERT_LE(std::abs(d.values[i] - c.values[i]), qs / 2.0 + 1e-9);
  }
}

TEST(Reconstruct, ZeroBlockIsZero) {
  QuantizedBlock q;
  q.qscale = 4;
  auto r = reconstruct_residual_block(q);
  for (auto v : r) EXPECT_EQ(v, 0);
}

TEST(Zigzag, FirstEntriesAndPermutation) {
  const auto& z = zigzag_order();
  const int head[] = {0, 1, 8, 16, 9, 2, 3, 10, 17, 24};
  for (int i = 0; i < 10; ++i) EXPECT_EQ(z[i], head[i]);
  EXPECT_EQ(z[63], 63);
  std::array<bool, 64> seen{};
  for (auto v : z) seen[v] = true;
  for (bool s : seen) EXPECT_TRUE(s);
}

TEST(Zigzag, InverseRoundTrip) {
  std::array<int, 64> raster;
  for (int i = 0; i < 64; ++i) raster[i] = i * 7 - 100;
  auto scan = zigzag<int>(raster);
  auto back = inverse_zigzag<int>(scan);
  EXPECT_EQ(back, raster);
  std::vector<int> short_seq(10);
  EXPECT_THROW(zigzag<int>(short_seq), FormatError);
  EXPECT_THROW(inverse_zigzag<int>(short_seq), FormatError);
}

}  // namespace
}  // namespace resacc
