#include "resacc/codec.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "resacc/parallel.hpp"
#include "resacc/pgm.hpp"

namespace fs = std::filesystem;

namespace resacc {

void EncoderConfig::validate() const {
  if (qscale < 1 || qscale > 0xffff) throw FormatError("qscale must be in [1, 65535]");
  if (gop_size < 1 || gop_size > 0xffff) throw FormatError("gop_size must be in [1, 65535]");
  if (search_range < 0 || search_range > kMaxSearchRange)
    throw FormatError("search_range must be in [0, 15]");
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

std::vector<fs::path> expand_source(const std::string& source) {
  std::vector<fs::path> paths;
  std::error_code ec;
  const fs::path src(source);

  if (fs::is_directory(src, ec)) {
    for (const auto& entry : fs::directory_iterator(src, ec))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm")
        paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    return paths;
  }

  if (source.find('%') != std::string::npos) {
    auto format = [&](int i) {
      std::vector<char> buf(source.size() + 32);
      std::snprintf(buf.data(), buf.size(), source.c_str(), i);
      return fs::path(buf.data());
    };
    int first = fs::exists(format(0), ec) ? 0 : 1;
    for (int i = first; fs::exists(format(i), ec); ++i) paths.push_back(format(i));
    return paths;
  }

  const std::string name = src.filename().string();
  if (name.find_first_of("*?[") != std::string::npos) {
    const fs::path dir = src.has_parent_path() ? src.parent_path() : fs::path(".");
    if (fs::is_directory(dir, ec)) {
      for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.is_regular_file() &&
            ::fnmatch(name.c_str(), entry.path().filename().c_str(), 0) == 0)
          paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    return paths;
  }

  if (fs::exists(src, ec)) paths.push_back(src);
  return paths;
}

}  // namespace

std::vector<Frame> ingest_frames(const std::string& source) {
  const auto paths = expand_source(source);
  return ingest_frames(paths);
}

std::vector<Frame> ingest_frames(std::span<const fs::path> paths) {
  if (paths.empty()) throw IngestError(-1, "no frames");
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto index = static_cast<std::int64_t>(i);
    Plane8 plane;
    try {
      plane = read_pgm(paths[i]);
    } catch (const Error& e) {
      throw IngestError(index, e.what());
    }
    if (!Frame::valid_dimensions(plane.width(), plane.height()))
      throw IngestError(index, paths[i].string() + ": dimensions " +
                                   std::to_string(plane.width()) + "x" +
                                   std::to_string(plane.height()) +
                                   " are not positive multiples of 16");
    if (!frames.empty() &&
        (plane.width() != frames.front().width() || plane.height() != frames.front().height()))
      throw IngestError(index, paths[i].string() + ": dimensions differ from frame 0");
    frames.emplace_back(std::move(plane));
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Motion estimation

std::uint32_t macroblock_sad(const Plane8& cur, const Plane8& ref, int mbx, int mby,
                             MotionVector mv) noexcept {
  const int x0 = mbx * kMacroblockDim;
  const int y0 = mby * kMacroblockDim;
  std::uint32_t sad = 0;
  for (int y = 0; y < kMacroblockDim; ++y) {
    const auto c = cur.row(y0 + y).subspan(x0, kMacroblockDim);
    const auto r = ref.row(y0 + y + mv.dy).subspan(x0 + mv.dx, kMacroblockDim);
    for (int x = 0; x < kMacroblockDim; ++x)
      sad += static_cast<std::uint32_t>(std::abs(int(c[x]) - int(r[x])));
  }
  return sad;
}

namespace {

struct Candidate {
  MotionVector mv;
  std::uint32_t sad = std::numeric_limits<std::uint32_t>::max();
};

// Candidates are visited in raster order, so a strict comparison keeps the
// earliest one among equals.
bool better(std::uint32_t sad, MotionVector mv, const Candidate& best) {
  if (sad != best.sad) return sad < best.sad;
  return std::abs(mv.dx) + std::abs(mv.dy) < std::abs(best.mv.dx) + std::abs(best.mv.dy);
}

Candidate search_macroblock(const Plane8& cur, const Plane8& ref, int mbx, int mby, int range) {
  const int x0 = mbx * kMacroblockDim;
  const int y0 = mby * kMacroblockDim;
  const int dx_lo = std::max(-range, -x0);
  const int dx_hi = std::min(range, ref.width() - kMacroblockDim - x0);
  const int dy_lo = std::max(-range, -y0);
  const int dy_hi = std::min(range, ref.height() - kMacroblockDim - y0);
  Candidate best;
  for (int dy = dy_lo; dy <= dy_hi; ++dy) {
    for (int dx = dx_lo; dx <= dx_hi; ++dx) {
      const MotionVector mv{dx, dy};
      const auto sad = macroblock_sad(cur, ref, mbx, mby, mv);
      if (better(sad, mv, best)) best = {mv, sad};
    }
  }
  return best;
}

}  // namespace

MotionField full_search_me(const Frame& cur, const Frame& ref, int search_range,
                           unsigned threads) {
  if (cur.width() != ref.width() || cur.height() != ref.height())
    throw FormatError("motion estimation: frame dimensions differ");
  if (search_range < 0) throw FormatError("motion estimation: negative search range");
  MotionField field;
  field.mb_cols = cur.mb_cols();
  field.mb_rows = cur.mb_rows();
  const auto count = static_cast<std::size_t>(field.mb_cols) * field.mb_rows;
  field.vectors.resize(count);
  field.sad.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const int mbx = static_cast<int>(i % field.mb_cols);
    const int mby = static_cast<int>(i / field.mb_cols);
    const auto best = search_macroblock(cur.luma(), ref.luma(), mbx, mby, search_range);
    field.vectors[i] = best.mv;
    field.sad[i] = best.sad;
  });
  return field;
}

Plane8 motion_compensate(const Frame& ref, const MotionField& field) {
  if (field.mb_cols != ref.mb_cols() || field.mb_rows != ref.mb_rows())
    throw FormatError("motion compensation: field does not match frame");
  Plane8 out(ref.width(), ref.height());
  for (int mby = 0; mby < field.mb_rows; ++mby) {
    for (int mbx = 0; mbx < field.mb_cols; ++mbx) {
      const auto mv = field.at(mbx, mby);
      const int x0 = mbx * kMacroblockDim;
      const int y0 = mby * kMacroblockDim;
      for (int y = 0; y < kMacroblockDim; ++y) {
        const auto src = ref.luma().row(y0 + y + mv.dy).subspan(x0 + mv.dx, kMacroblockDim);
        std::copy(src.begin(), src.end(), out.row(y0 + y).begin() + x0);
      }
    }
  }
  return out;
}

Plane16 compute_residual(const Plane8& cur, const Plane8& predicted) {
  if (cur.width() != predicted.width() || cur.height() != predicted.height())
    throw FormatError("residual: dimension mismatch");
  Plane16 out(cur.width(), cur.height());
  auto c = cur.data();
  auto p = predicted.data();
  auto r = out.data();
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<std::int16_t>(int(c[i]) - int(p[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Encoder

Encoder::Encoder(int width, int height, EncoderConfig config, unsigned threads)
    : width_(width), height_(height), config_(config), threads_(threads) {
  config_.validate();
  if (!Frame::valid_dimensions(width, height))
    throw FormatError("encoder: dimensions must be positive multiples of 16");
  recon_ = Plane8(width, height);
}

CrvHeader Encoder::header(std::uint32_t frame_count) const {
  CrvHeader h;
  h.width = width_;
  h.height = height_;
  h.gop_size = config_.gop_size;
  h.qscale = config_.qscale;
  h.search_range = config_.search_range;
  h.frame_count = frame_count;
  return h;
}

FrameRecord Encoder::encode_frame(const Frame& frame, Plane16* residual_out) {
  if (frame.width() != width_ || frame.height() != height_)
    throw IngestError(index_, "frame dimensions differ from stream dimensions");

  FrameRecord record;
  record.type = index_ % static_cast<std::uint32_t>(config_.gop_size) == 0 ? FrameType::I
                                                                            : FrameType::P;
  const int cols = frame.mb_cols();
  const int rows = frame.mb_rows();

  Plane8 predicted;
  MotionField field;
  if (record.type == FrameType::I) {
    predicted = Plane8(width_, height_, 0);
    field.mb_cols = cols;
    field.mb_rows = rows;
    field.vectors.assign(static_cast<std::size_t>(cols) * rows, MotionVector{});
  } else {
    const Frame ref(recon_);
    field = full_search_me(frame, ref, config_.search_range, threads_);
    predicted = motion_compensate(ref, field);
  }
  Plane16 residual = compute_residual(frame.luma(), predicted);

  record.macroblocks.resize(static_cast<std::size_t>(cols) * rows);
  Plane8 recon(width_, height_);
  for (int mby = 0; mby < rows; ++mby) {
    for (int mbx = 0; mbx < cols; ++mbx) {
      auto& mb = record.macroblocks[static_cast<std::size_t>(mby) * cols + mbx];
      mb.mv = field.at(mbx, mby);
      for (int q = 0; q < 4; ++q) {
        const int bx = mbx * kMacroblockDim + (q % 2) * kBlockDim;
        const int by = mby * kMacroblockDim + (q / 2) * kBlockDim;
        SampleBlock samples{};
        for (int y = 0; y < kBlockDim; ++y)
          for (int x = 0; x < kBlockDim; ++x)
            samples[y * kBlockDim + x] = residual(bx + x, by + y);
        mb.blocks[q] = quantize(dct8x8(samples), config_.qscale);

        const auto decoded = reconstruct_residual_block(mb.blocks[q]);
        for (int y = 0; y < kBlockDim; ++y)
          for (int x = 0; x < kBlockDim; ++x) {
            const int v = int(predicted(bx + x, by + y)) + decoded[y * kBlockDim + x];
            recon(bx + x, by + y) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
          }
      }
    }
  }
  recon_ = std::move(recon);
  if (residual_out) *residual_out = std::move(residual);
  ++index_;
  return record;
}

CrvStream encode_stream(std::span<const Frame> frames, const EncoderConfig& config,
                        std::vector<Plane16>* residuals, unsigned threads) {
  config.validate();
  if (frames.empty()) throw IngestError(-1, "no frames");
  Encoder encoder(frames.front().width(), frames.front().height(), config, threads);
  CrvStream stream;
  stream.header = encoder.header(static_cast<std::uint32_t>(frames.size()));
  stream.frames.reserve(frames.size());
  if (residuals) residuals->clear();
  for (const auto& frame : frames) {
    Plane16 residual;
    stream.frames.push_back(encoder.encode_frame(frame, residuals ? &residual : nullptr));
    if (residuals) residuals->push_back(std::move(residual));
  }
  return stream;
}

std::vector<std::uint8_t> encode(std::span<const Frame> frames, const EncoderConfig& config,
                                 unsigned threads) {
  return serialize(encode_stream(frames, config, nullptr, threads));
}

}  // namespace resacc
