#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "resacc/crv_format.hpp"
#include "resacc/plane.hpp"

namespace resacc {

// Residual recovered from one coded frame by dequantization + IDCT.
struct ResidualFrame {
  Plane16 values;
  std::uint32_t frame_index = 0;
  FrameType kind = FrameType::P;
  std::vector<MotionVector> motion;  // parsed, never applied

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }

  bool operator==(const ResidualFrame&) const = default;
};

// Validates magic, dimensions and ranges. Throws ParseError.
CrvHeader parse_header(std::span<const std::uint8_t> bytes);

// Forward record reader over an in-memory CRV stream. Holds no decoded data.
class CrvReader {
 public:
  explicit CrvReader(std::span<const std::uint8_t> bytes);

  const CrvHeader& header() const noexcept { return header_; }

  // Next frame record, or nullopt after the last frame. Throws ParseError on
  // corruption; earlier records remain valid.
  std::optional<FrameRecord> next_record();

  // Byte offset of the next unread frame record.
  std::uint64_t offset() const noexcept { return offset_; }
  std::uint32_t frames_read() const noexcept { return frames_read_; }

 private:
  std::span<const std::uint8_t> bytes_;
  CrvHeader header_;
  std::uint64_t offset_ = kCrvHeaderSize;
  std::uint32_t frames_read_ = 0;
};

// Parses the record that starts at `offset`. Advances `offset` past it.
FrameRecord parse_frame_record(std::span<const std::uint8_t> bytes, const CrvHeader& header,
                               std::uint64_t& offset, std::uint32_t frame_index);

// Whole-stream parse; inverse of serialize().
CrvStream parse_stream(std::span<const std::uint8_t> bytes);

// Each 8x8 block -> round(idct8x8(dequantize(block))). No motion compensation.
ResidualFrame decode_residual_frame(const FrameRecord& record, const CrvHeader& header,
                                    std::uint32_t frame_index);

// Byte offsets of every frame record, from a single forward scan.
std::vector<std::uint64_t> frame_offsets(std::span<const std::uint8_t> bytes);

// Decodes frame `frame_index` whose record starts at `offset`; touches only
// that frame's bytes.
ResidualFrame decode_frame_at(std::span<const std::uint8_t> bytes, const CrvHeader& header,
                              std::uint64_t offset, std::uint32_t frame_index);

// Lazy residual sequence. At most one decoded frame is alive inside.
class ResidualStream {
 public:
  explicit ResidualStream(std::span<const std::uint8_t> bytes) : reader_(bytes) {}

  const CrvHeader& header() const noexcept { return reader_.header(); }
  std::optional<ResidualFrame> next();

 private:
  CrvReader reader_;
};

// Read-only memory map of a file (POSIX).
class MappedFile {
 public:
  explicit MappedFile(const std::filesystem::path& path);
  ~MappedFile();
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;
  MappedFile(MappedFile&& other) noexcept;
  MappedFile& operator=(MappedFile&& other) noexcept;

  std::span<const std::uint8_t> bytes() const noexcept { return {data_, size_}; }

 private:
  const std::uint8_t* data_ = nullptr;
  std::size_t size_ = 0;
};

// Affine map [-255, 255] -> [0, 255] (floor), clamped; for inspection dumps.
Plane8 residual_to_display(const Plane16& residual);

}  // namespace resacc
