#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "resacc/crv_format.hpp"
#include "resacc/frame.hpp"

namespace resacc {

struct EncoderConfig {
  int qscale = 8;
  int gop_size = 250;
  int search_range = 7;

  // Throws FormatError naming the bad field.
  void validate() const;
};

// Loads an ordered frame sequence. `source` is one of
//   - a directory: every *.pgm inside, sorted by file name;
//   - a printf-style pattern such as "clip/f%04d.pgm", indexed from 0 (or 1
//     when index 0 is absent) until the first missing file;
//   - a pattern with '*' / '?' wildcards in the file-name component;
//   - a single .pgm file.
// Throws IngestError naming the offending frame index.
std::vector<Frame> ingest_frames(const std::string& source);
std::vector<Frame> ingest_frames(std::span<const std::filesystem::path> paths);

struct MotionField {
  int mb_cols = 0;
  int mb_rows = 0;
  std::vector<MotionVector> vectors;  // raster order
  std::vector<std::uint32_t> sad;     // SAD of the chosen vector per macroblock

  const MotionVector& at(int mbx, int mby) const { return vectors[mby * mb_cols + mbx]; }
};

std::uint32_t macroblock_sad(const Plane8& cur, const Plane8& ref, int mbx, int mby,
                             MotionVector mv) noexcept;

// Exhaustive integer-pel block matching, one vector per 16x16 macroblock.
// Minimum SAD wins; ties go to the smallest |dx|+|dy|, then to the first
// candidate in raster order (dy outer, dx inner). The window is clamped so
// the referenced block stays inside `ref`. Output is independent of
// `threads`.
MotionField full_search_me(const Frame& cur, const Frame& ref, int search_range,
                           unsigned threads = 1);

Plane8 motion_compensate(const Frame& ref, const MotionField& field);

// cur - predicted, per pixel.
Plane16 compute_residual(const Plane8& cur, const Plane8& predicted);

// Sequential encoder; P-frames predict from the decoder-matched
// reconstruction of the previous frame.
class Encoder {
 public:
  Encoder(int width, int height, EncoderConfig config, unsigned threads = 1);

  // Encodes the next frame. When `residual` is non-null it receives the
  // unquantized residual the frame was coded from.
  FrameRecord encode_frame(const Frame& frame, Plane16* residual = nullptr);

  const Plane8& reconstructed() const noexcept { return recon_; }
  std::uint32_t frames_encoded() const noexcept { return index_; }
  CrvHeader header(std::uint32_t frame_count) const;

 private:
  int width_;
  int height_;
  EncoderConfig config_;
  unsigned threads_;
  std::uint32_t index_ = 0;
  Plane8 recon_;
};

CrvStream encode_stream(std::span<const Frame> frames, const EncoderConfig& config,
                        std::vector<Plane16>* residuals = nullptr, unsigned threads = 1);

std::vector<std::uint8_t> encode(std::span<const Frame> frames, const EncoderConfig& config,
                                 unsigned threads = 1);

}  // namespace resacc
