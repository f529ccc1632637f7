#pragma once

// CRV bitstream: a fixed-16x16-macroblock, luma-only, I/P-only layout.
//
//   header (18 bytes, little-endian):
//     "CRV1" | u16 width | u16 height | u16 gop_size | u16 qscale
//            | u16 search_range | u32 frame_count
//   per frame:
//     u8 frame_type (0 = I, 1 = P), then macroblocks in raster order:
//       i8 dx | i8 dy | 4 x coefficient block (8x8 quadrants, raster order)
//   per coefficient block, in zigzag order:
//       (u8 zero_run, i16 level) pairs, terminated by the pair (255, 0)

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "resacc/frame.hpp"
#include "resacc/transform.hpp"

namespace resacc {

inline constexpr std::array<std::uint8_t, 4> kCrvMagic = {'C', 'R', 'V', '1'};
inline constexpr std::size_t kCrvHeaderSize = 18;
inline constexpr std::uint8_t kRleEndRun = 255;
inline constexpr int kMaxSearchRange = 15;

struct MotionVector {
  int dx = 0;
  int dy = 0;

  bool operator==(const MotionVector&) const = default;
};

struct CrvHeader {
  int width = 0;
  int height = 0;
  int gop_size = 1;
  int qscale = 1;
  int search_range = 0;
  std::uint32_t frame_count = 0;

  int mb_cols() const noexcept { return width / kMacroblockDim; }
  int mb_rows() const noexcept { return height / kMacroblockDim; }
  int macroblock_count() const noexcept { return mb_cols() * mb_rows(); }

  bool operator==(const CrvHeader&) const = default;
};

struct MacroBlockRecord {
  MotionVector mv;
  // 8x8 quadrants: top-left, top-right, bottom-left, bottom-right.
  std::array<QuantizedBlock, 4> blocks;

  bool operator==(const MacroBlockRecord&) const = default;
};

struct FrameRecord {
  FrameType type = FrameType::I;
  std::vector<MacroBlockRecord> macroblocks;

  bool operator==(const FrameRecord&) const = default;
};

struct CrvStream {
  CrvHeader header;
  std::vector<FrameRecord> frames;

  bool operator==(const CrvStream&) const = default;
};

// Throws FormatError when the header violates the format's value ranges.
void validate_header(const CrvHeader& header);

void write_header(std::vector<std::uint8_t>& out, const CrvHeader& header);
void write_frame_record(std::vector<std::uint8_t>& out, const FrameRecord& record);

// Full serialization. header.frame_count must equal frames.size().
std::vector<std::uint8_t> serialize(const CrvStream& stream);

}  // namespace resacc
