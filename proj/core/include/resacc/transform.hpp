#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "resacc/errors.hpp"

namespace resacc {

inline constexpr int kBlockDim = 8;
inline constexpr int kBlockSize = kBlockDim * kBlockDim;

using SampleBlock = std::array<double, kBlockSize>;

// Transform-domain 8x8 block, orthonormal DCT-II scaling, row-major (v*8+u).
struct CoeffBlock {
  std::array<double, kBlockSize> values{};

  bool operator==(const CoeffBlock&) const = default;
};

struct QuantizedBlock {
  std::array<std::int16_t, kBlockSize> values{};
  int qscale = 1;

  bool is_zero() const noexcept {
    for (auto v : values)
      if (v != 0) return false;
    return true;
  }
  bool operator==(const QuantizedBlock&) const = default;
};

// Separable 2-D orthonormal DCT-II. Row-major input, row index = y.
CoeffBlock dct8x8(std::span<const double, kBlockSize> block) noexcept;

// Inverse of dct8x8.
SampleBlock idct8x8(const CoeffBlock& block) noexcept;

// round-half-away-from-zero(c / qscale), saturated to int16. Throws
// FormatError when qscale < 1.
QuantizedBlock quantize(const CoeffBlock& block, int qscale);

CoeffBlock dequantize(const QuantizedBlock& block) noexcept;

// round(idct8x8(dequantize(block))) saturated to int16; the residual samples
// a decoder recovers from one coded block.
std::array<std::int16_t, kBlockSize> reconstruct_residual_block(const QuantizedBlock& block) noexcept;

// Zigzag scan table: scan position -> raster index (y*8+x).
const std::array<std::uint8_t, kBlockSize>& zigzag_order() noexcept;

template <typename T>
std::array<T, kBlockSize> zigzag(std::span<const T> block) {
  if (block.size() != kBlockSize) throw FormatError("zigzag: expected 64 entries");
  const auto& order = zigzag_order();
  std::array<T, kBlockSize> out{};
  for (int i = 0; i < kBlockSize; ++i) out[i] = block[order[i]];
  return out;
}

template <typename T>
std::array<T, kBlockSize> inverse_zigzag(std::span<const T> seq) {
  if (seq.size() != kBlockSize) throw FormatError("inverse_zigzag: expected 64 entries");
  const auto& order = zigzag_order();
  std::array<T, kBlockSize> out{};
  for (int i = 0; i < kBlockSize; ++i) out[order[i]] = seq[i];
  return out;
}

}  // namespace resacc
