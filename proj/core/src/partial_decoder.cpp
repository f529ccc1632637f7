#include "resacc/partial_decoder.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <string>

namespace resacc {
namespace {

class ByteCursor {
 public:
  ByteCursor(std::span<const std::uint8_t> bytes, std::uint64_t offset)
      : bytes_(bytes), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

  void need(std::uint64_t n) const {
    if (offset_ + n > bytes_.size()) throw ParseError(bytes_.size(), "unexpected end of stream");
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[offset_++];
  }
  std::int8_t i8() { return static_cast<std::int8_t>(u8()); }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(bytes_[offset_] | (bytes_[offset_ + 1] << 8));
    offset_ += 2;
    return v;
  }
  std::int16_t i16() { return static_cast<std::int16_t>(u16()); }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[offset_ + i]) << (8 * i);
    offset_ += 4;
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t offset_;
};

std::string where(std::uint32_t frame, int mb) {
  return "frame " + std::to_string(frame) + ", macroblock " + std::to_string(mb) + ": ";
}

void read_block(ByteCursor& in, QuantizedBlock& block, std::uint32_t frame, int mb) {
  std::array<std::int16_t, kBlockSize> scanned{};
  int pos = 0;
  for (;;) {
    const auto start = in.offset();
    const std::uint8_t run = in.u8();
    const std::int16_t level = in.i16();
    if (run == kRleEndRun) {
      if (level != 0) throw ParseError(start, where(frame, mb) + "malformed end-of-block marker");
      break;
    }
    if (level == 0) throw ParseError(start, where(frame, mb) + "zero level in run-length pair");
    pos += run;
    if (pos >= kBlockSize)
      throw ParseError(start, where(frame, mb) + "run-length overrun past 64 coefficients");
    scanned[pos++] = level;
  }
  block.values = inverse_zigzag<std::int16_t>(scanned);
}

}  // namespace

CrvHeader parse_header(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < kCrvMagic.size(); ++i) {
    if (i >= bytes.size()) throw ParseError(bytes.size(), "unexpected end of stream in header");
    if (bytes[i] != kCrvMagic[i]) throw ParseError(0, "bad magic (expected CRV1)");
  }
  if (bytes.size() < kCrvHeaderSize)
    throw ParseError(bytes.size(), "unexpected end of stream in header");
  ByteCursor in(bytes, kCrvMagic.size());
  CrvHeader h;
  h.width = in.u16();
  h.height = in.u16();
  h.gop_size = in.u16();
  h.qscale = in.u16();
  h.search_range = in.u16();
  h.frame_count = in.u32();
  if (!Frame::valid_dimensions(h.width, h.height))
    throw ParseError(4, "invalid dimensions " + std::to_string(h.width) + "x" +
                            std::to_string(h.height) + " (must be positive multiples of 16)");
  if (h.gop_size < 1) throw ParseError(8, "gop_size must be >= 1");
  if (h.qscale < 1) throw ParseError(10, "qscale must be >= 1");
  if (h.search_range > kMaxSearchRange) throw ParseError(12, "search_range exceeds 15");
  return h;
}

FrameRecord parse_frame_record(std::span<const std::uint8_t> bytes, const CrvHeader& header,
                               std::uint64_t& offset, std::uint32_t frame_index) {
  ByteCursor in(bytes, offset);
  FrameRecord record;
  const auto type_offset = in.offset();
  const auto type = in.u8();
  if (type > 1)
    throw ParseError(type_offset, "frame " + std::to_string(frame_index) + ": bad frame type " +
                                      std::to_string(type));
  record.type = static_cast<FrameType>(type);
  const int cols = header.mb_cols();
  const int count = header.macroblock_count();
  // Smallest macroblock: motion vector plus four bare end markers.
  constexpr std::uint64_t kMinMacroblockBytes = 2 + 4 * 3;
  if (static_cast<std::uint64_t>(count) * kMinMacroblockBytes > bytes.size() - in.offset())
    throw ParseError(bytes.size(), "unexpected end of stream");
  record.macroblocks.resize(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    auto& mb = record.macroblocks[static_cast<std::size_t>(m)];
    const auto mv_offset = in.offset();
    mb.mv.dx = in.i8();
    mb.mv.dy = in.i8();
    const int x0 = (m % cols) * kMacroblockDim + mb.mv.dx;
    const int y0 = (m / cols) * kMacroblockDim + mb.mv.dy;
    if (std::abs(mb.mv.dx) > header.search_range || std::abs(mb.mv.dy) > header.search_range ||
        x0 < 0 || y0 < 0 || x0 + kMacroblockDim > header.width ||
        y0 + kMacroblockDim > header.height)
      throw ParseError(mv_offset, where(frame_index, m) + "motion vector out of range");
    for (auto& block : mb.blocks) {
      block.qscale = header.qscale;
      read_block(in, block, frame_index, m);
    }
  }
  offset = in.offset();
  return record;
}

CrvReader::CrvReader(std::span<const std::uint8_t> bytes)
    : bytes_(bytes), header_(parse_header(bytes)) {}

std::optional<FrameRecord> CrvReader::next_record() {
  if (frames_read_ >= header_.frame_count) return std::nullopt;
  auto record = parse_frame_record(bytes_, header_, offset_, frames_read_);
  ++frames_read_;
  return record;
}

CrvStream parse_stream(std::span<const std::uint8_t> bytes) {
  CrvReader reader(bytes);
  CrvStream stream;
  stream.header = reader.header();
  while (auto record = reader.next_record()) stream.frames.push_back(std::move(*record));
  if (reader.offset() != bytes.size())
    throw ParseError(reader.offset(), "trailing bytes after last frame");
  return stream;
}

ResidualFrame decode_residual_frame(const FrameRecord& record, const CrvHeader& header,
                                    std::uint32_t frame_index) {
  const int cols = header.mb_cols();
  if (record.macroblocks.size() != static_cast<std::size_t>(header.macroblock_count()))
    throw FormatError("frame " + std::to_string(frame_index) + ": wrong macroblock count");
  ResidualFrame out;
  out.values = Plane16(header.width, header.height);
  out.frame_index = frame_index;
  out.kind = record.type;
  out.motion.reserve(record.macroblocks.size());
  for (std::size_t m = 0; m < record.macroblocks.size(); ++m) {
    const auto& mb = record.macroblocks[m];
    out.motion.push_back(mb.mv);
    const int mbx = static_cast<int>(m) % cols;
    const int mby = static_cast<int>(m) / cols;
    for (int q = 0; q < 4; ++q) {
      if (mb.blocks[q].is_zero()) continue;
      const auto samples = reconstruct_residual_block(mb.blocks[q]);
      const int bx = mbx * kMacroblockDim + (q % 2) * kBlockDim;
      const int by = mby * kMacroblockDim + (q / 2) * kBlockDim;
      for (int y = 0; y < kBlockDim; ++y)
        std::copy_n(samples.begin() + y * kBlockDim, kBlockDim, out.values.row(by + y).begin() + bx);
    }
  }
  return out;
}

std::vector<std::uint64_t> frame_offsets(std::span<const std::uint8_t> bytes) {
  CrvReader reader(bytes);
  std::vector<std::uint64_t> offsets;
  offsets.reserve(std::min<std::uint64_t>(reader.header().frame_count, bytes.size()));
  for (;;) {
    const auto at = reader.offset();
    if (!reader.next_record()) break;
    offsets.push_back(at);
  }
  return offsets;
}

ResidualFrame decode_frame_at(std::span<const std::uint8_t> bytes, const CrvHeader& header,
                              std::uint64_t offset, std::uint32_t frame_index) {
  auto record = parse_frame_record(bytes, header, offset, frame_index);
  return decode_residual_frame(record, header, frame_index);
}

std::optional<ResidualFrame> ResidualStream::next() {
  const auto index = reader_.frames_read();
  auto record = reader_.next_record();
  if (!record) return std::nullopt;
  return decode_residual_frame(*record, reader_.header(), index);
}

MappedFile::MappedFile(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw Error("cannot stat " + path.string());
  }
  size_ = static_cast<std::size_t>(st.st_size);
  if (size_ > 0) {
    void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
    if (p == MAP_FAILED) {
      ::close(fd);
      throw Error("cannot map " + path.string());
    }
    data_ = static_cast<const std::uint8_t*>(p);
  }
  ::close(fd);
}

MappedFile::~MappedFile() {
  if (data_) ::munmap(const_cast<std::uint8_t*>(data_), size_);
}

MappedFile::MappedFile(MappedFile&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)), size_(std::exchange(other.size_, 0)) {}

MappedFile& MappedFile::operator=(MappedFile&& other) noexcept {
  if (this != &other) {
    if (data_) ::munmap(const_cast<std::uint8_t*>(data_), size_);
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

Plane8 residual_to_display(const Plane16& residual) {
  Plane8 out(residual.width(), residual.height());
  auto src = residual.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const int v = std::clamp<int>(src[i], -255, 255);
    dst[i] = static_cast<std::uint8_t>((v + 255) / 2);
  }
  return out;
}

}  // namespace resacc
