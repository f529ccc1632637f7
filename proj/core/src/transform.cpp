#include "resacc/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace resacc {
namespace {

// basis[u][x] = a(u) * cos((2x+1) u pi / 16)
struct Basis {
  double m[kBlockDim][kBlockDim];

  Basis() {
    for (int u = 0; u < kBlockDim; ++u) {
      const double a = u == 0 ? std::sqrt(1.0 / kBlockDim) : std::sqrt(2.0 / kBlockDim);
      for (int x = 0; x < kBlockDim; ++x)
        m[u][x] = a * std::cos((2 * x + 1) * u * std::numbers::pi / (2.0 * kBlockDim));
    }
  }
};

const Basis& basis() {
  static const Basis b;
  return b;
}

std::array<std::uint8_t, kBlockSize> make_zigzag() {
  std::array<std::uint8_t, kBlockSize> order{};
  int x = 0;
  int y = 0;
  for (int i = 0; i < kBlockSize; ++i) {
    order[i] = static_cast<std::uint8_t>(y * kBlockDim + x);
    if ((x + y) % 2 == 0) {  // moving up-right
      if (x == kBlockDim - 1) {
        ++y;
      } else if (y == 0) {
        ++x;
      } else {
        ++x;
        --y;
      }
    } else {  // moving down-left
      if (y == kBlockDim - 1) {
        ++x;
      } else if (x == 0) {
        ++y;
      } else {
        --x;
        ++y;
      }
    }
  }
  return order;
}

}  // namespace

CoeffBlock dct8x8(std::span<const double, kBlockSize> block) noexcept {
  const auto& b = basis().m;
  double tmp[kBlockDim][kBlockDim];
  // Rows: tmp[y][u] = sum_x basis[u][x] * f[y][x]
  for (int y = 0; y < kBlockDim; ++y) {
    for (int u = 0; u < kBlockDim; ++u) {
      double s = 0.0;
      for (int x = 0; x < kBlockDim; ++x) s += b[u][x] * block[y * kBlockDim + x];
      tmp[y][u] = s;
    }
  }
  CoeffBlock out;
  for (int v = 0; v < kBlockDim; ++v) {
    for (int u = 0; u < kBlockDim; ++u) {
      double s = 0.0;
      for (int y = 0; y < kBlockDim; ++y) s += b[v][y] * tmp[y][u];
      out.values[v * kBlockDim + u] = s;
    }
  }
  return out;
}

SampleBlock idct8x8(const CoeffBlock& block) noexcept {
  const auto& b = basis().m;
  double tmp[kBlockDim][kBlockDim];
  // Columns first: tmp[y][u] = sum_v basis[v][y] * F[v][u]
  for (int y = 0; y < kBlockDim; ++y) {
    for (int u = 0; u < kBlockDim; ++u) {
      double s = 0.0;
      for (int v = 0; v < kBlockDim; ++v) s += b[v][y] * block.values[v * kBlockDim + u];
      tmp[y][u] = s;
    }
  }
  SampleBlock out{};
  for (int y = 0; y < kBlockDim; ++y) {
    for (int x = 0; x < kBlockDim; ++x) {
      double s = 0.0;
      for (int u = 0; u < kBlockDim; ++u) s += b[u][x] * tmp[y][u];
      out[y * kBlockDim + x] = s;
    }
  }
  return out;
}

QuantizedBlock quantize(const CoeffBlock& block, int qscale) {
  if (qscale < 1) throw FormatError("quantize: qscale must be >= 1");
  QuantizedBlock out;
  out.qscale = qscale;
  constexpr double lo = std::numeric_limits<std::int16_t>::min();
  constexpr double hi = std::numeric_limits<std::int16_t>::max();
  for (int i = 0; i < kBlockSize; ++i) {
    // std::round is half-away-from-zero.
    const double q = std::round(block.values[i] / qscale);
    out.values[i] = static_cast<std::int16_t>(std::clamp(q, lo, hi));
  }
  return out;
}

CoeffBlock dequantize(const QuantizedBlock& block) noexcept {
  CoeffBlock out;
  for (int i = 0; i < kBlockSize; ++i)
    out.values[i] = static_cast<double>(block.values[i]) * block.qscale;
  return out;
}

std::array<std::int16_t, kBlockSize> reconstruct_residual_block(const QuantizedBlock& block) noexcept {
  std::array<std::int16_t, kBlockSize> out{};
  if (block.is_zero()) return out;
  const auto samples = idct8x8(dequantize(block));
  constexpr double lo = std::numeric_limits<std::int16_t>::min();
  constexpr double hi = std::numeric_limits<std::int16_t>::max();
  for (int i = 0; i < kBlockSize; ++i)
    out[i] = static_cast<std::int16_t>(std::clamp(std::round(samples[i]), lo, hi));
  return out;
}

const std::array<std::uint8_t, kBlockSize>& zigzag_order() noexcept {
  static const auto order = make_zigzag();
  return order;
}

}  // namespace resacc
