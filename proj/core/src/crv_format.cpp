#include "resacc/crv_format.hpp"

#include <limits>
#include <string>

namespace resacc {
namespace {

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

bool fits_u16(int v) { return v >= 0 && v <= std::numeric_limits<std::uint16_t>::max(); }

void write_block(std::vector<std::uint8_t>& out, const QuantizedBlock& block) {
  const auto scanned = zigzag<std::int16_t>(block.values);
  std::uint8_t run = 0;
  for (auto level : scanned) {
    if (level == 0) {
      ++run;
      continue;
    }
    put_u8(out, run);
    put_u16(out, static_cast<std::uint16_t>(level));
    run = 0;
  }
  put_u8(out, kRleEndRun);
  put_u16(out, 0);
}

}  // namespace

void validate_header(const CrvHeader& h) {
  if (!Frame::valid_dimensions(h.width, h.height) || !fits_u16(h.width) || !fits_u16(h.height))
    throw FormatError("crv: dimensions must be positive multiples of 16");
  if (h.gop_size < 1 || !fits_u16(h.gop_size)) throw FormatError("crv: gop_size out of range");
  if (h.qscale < 1 || !fits_u16(h.qscale)) throw FormatError("crv: qscale out of range");
  if (h.search_range < 0 || h.search_range > kMaxSearchRange)
    throw FormatError("crv: search_range out of range");
}

void write_header(std::vector<std::uint8_t>& out, const CrvHeader& h) {
  validate_header(h);
  out.insert(out.end(), kCrvMagic.begin(), kCrvMagic.end());
  put_u16(out, static_cast<std::uint16_t>(h.width));
  put_u16(out, static_cast<std::uint16_t>(h.height));
  put_u16(out, static_cast<std::uint16_t>(h.gop_size));
  put_u16(out, static_cast<std::uint16_t>(h.qscale));
  put_u16(out, static_cast<std::uint16_t>(h.search_range));
  put_u32(out, h.frame_count);
}

void write_frame_record(std::vector<std::uint8_t>& out, const FrameRecord& record) {
  put_u8(out, static_cast<std::uint8_t>(record.type));
  for (const auto& mb : record.macroblocks) {
    if (mb.mv.dx < -128 || mb.mv.dx > 127 || mb.mv.dy < -128 || mb.mv.dy > 127)
      throw FormatError("crv: motion vector does not fit in i8");
    put_u8(out, static_cast<std::uint8_t>(static_cast<std::int8_t>(mb.mv.dx)));
    put_u8(out, static_cast<std::uint8_t>(static_cast<std::int8_t>(mb.mv.dy)));
    for (const auto& block : mb.blocks) write_block(out, block);
  }
}

std::vector<std::uint8_t> serialize(const CrvStream& stream) {
  if (stream.header.frame_count != stream.frames.size())
    throw FormatError("crv: frame_count does not match number of frame records");
  const auto mbs = static_cast<std::size_t>(stream.header.macroblock_count());
  std::vector<std::uint8_t> out;
  write_header(out, stream.header);
  for (std::size_t i = 0; i < stream.frames.size(); ++i) {
    if (stream.frames[i].macroblocks.size() != mbs)
      throw FormatError("crv: frame " + std::to_string(i) + " has wrong macroblock count");
    write_frame_record(out, stream.frames[i]);
  }
  return out;
}

}  // namespace resacc
