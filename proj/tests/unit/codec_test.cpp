#include <resacc/codec.hpp>
#include <resacc/errors.hpp>
#include <resacc/partial_decoder.hpp>
#include <resacc/pgm.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

namespace fs = std::filesystem;

namespace resacc {
namespace {

Frame random_frame(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> d(0, 255);
  Frame f(w, h);
  for (auto& v : f.luma().data()) v = static_cast<std::uint8_t>(d(rng));
  return f;
}

// Exhaustive enumeration straight from the matching rule.
MotionVector oracle_mv(const Frame& cur, const Frame& ref, int mbx, int mby, int range) {
  const int x0 = mbx * 16, y0 = mby * 16;
  MotionVector best{};
  std::uint64_t best_sad = std::numeric_limits<std::uint64_t>::max();
  for (int dy = -range; dy <= range; ++dy)
    for (int dx = -range; dx <= range; ++dx) {
      if (x0 + dx < 0 || y0 + dy < 0 || x0 + dx + 16 > ref.width() || y0 + dy + 16 > ref.height())
        continue;
      std::uint64_t sad = 0;
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
          sad += std::abs(int(cur(x0 + x, y0 + y)) - int(ref(x0 + x + dx, y0 + y + dy)));
      const int norm = std::abs(dx) + std::abs(dy);
      const int best_norm = std::abs(best.dx) + std::abs(best.dy);
      if (sad < best_sad || (sad == best_sad && norm < best_norm)) {
        best_sad = sad;
        best = {dx, dy};
      }
    }
  return best;
}

TEST(MotionSearch, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto ref = random_frame(rng, 64, 64);
    // Smooth-ish current frame so several candidates compete.
    Frame cur(64, 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        cur(x, y) = static_cast<std::uint8_t>((ref(x, y) / 32) * 32);
    for (int pass = 0; pass < 2; ++pass) {
      const Frame& c = pass == 0 ? cur : random_frame(rng, 64, 64);
      auto field = full_search_me(c, ref, 4);
      for (int mby = 0; mby < 4; ++mby)
        for (int mbx = 0; mbx < 4; ++mbx)
          ASSERT_EQ(field.at(mbx, mby), oracle_mv(c, ref, mbx, mby, 4))
              << "mb " << mbx << "," << mby;
    }
  }
}

TEST(MotionSearch, ShiftedContentFound) {
  std::mt19937_64 rng(12);
  auto ref = random_frame(rng, 64, 48);
  Frame cur(64, 48, 77);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x + 2 < 64; ++x) cur(x, y) = ref(x + 2, y);
  auto field = full_search_me(cur, ref, 4);
  for (int mby = 0; mby < 3; ++mby)
    for (int mbx = 0; mbx < 3; ++mbx) {
      EXPECT_EQ(field.at(mbx, mby), (MotionVector{2, 0}));
      EXPECT_EQ(field.sad[mby * 4 + mbx], 0u);
    }
  auto predicted = motion_compensate(ref, field);
  auto residual = compute_residual(cur.luma(), predicted);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) ASSERT_EQ(residual(x, y), 0);
}

TEST(MotionSearch, IdenticalFramesGiveZeroVectors) {
  Frame f(48, 32, 90);
  auto field = full_search_me(f, f, 7);
  for (const auto& mv : field.vectors) EXPECT_EQ(mv, (MotionVector{0, 0}));
}

TEST(MotionSearch, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(13);
  auto a = random_frame(rng, 128, 96);
  auto b = random_frame(rng, 128, 96);
  auto one = full_search_me(a, b, 5, 1);
  auto many = full_search_me(a, b, 5, 4);
  EXPECT_EQ(one.vectors, many.vectors);
  EXPECT_EQ(one.sad, many.sad);
  for (std::size_t i = 0; i < one.sad.size(); ++i)
    EXPECT_LE(one.sad[i], macroblock_sad(a.luma(), b.luma(), int(i) % 8, int(i) / 8, {0, 0}));
}

TEST(Residual, Examples) {
  Plane8 cur(16, 16, 200), pred(16, 16, 50);
  auto r = compute_residual(cur, pred);
  for (auto v : r.data()) EXPECT_EQ(v, 150);
  auto z = compute_residual(cur, cur);
  for (auto v : z.data()) EXPECT_EQ(v, 0);
  EXPECT_THROW(compute_residual(cur, Plane8(32, 16)), FormatError);
}

TEST(Encoder, GopPlacement) {
  std::vector<Frame> frames(10, Frame(32, 32, 100));
  EncoderConfig cfg;
  cfg.gop_size = 5;
  auto s = encode_stream(frames, cfg);
  ASSERT_EQ(s.frames.size(), 10u);
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(s.frames[i].type, i % 5 == 0 ? FrameType::I : FrameType::P) << i;
  auto single = encode_stream(std::span(frames).first(1), cfg);
  ASSERT_EQ(single.frames.size(), 1u);
  EXPECT_EQ(single.frames[0].type, FrameType::I);
}

TEST(Encoder, Deterministic) {
  std::mt19937_64 rng(14);
  std::vector<Frame> frames;
  for (int i = 0; i < 4; ++i) frames.push_back(random_frame(rng, 48, 32));
  EncoderConfig cfg;
  EXPECT_EQ(encode(frames, cfg, 1), encode(frames, cfg, 3));
}

TEST(Encoder, DecodedResidualsTrackEncoderResiduals) {
  std::mt19937_64 rng(15);
  std::vector<Frame> frames;
  auto base = random_frame(rng, 64, 48);
  for (int i = 0; i < 6; ++i) {
    Frame f(64, 48);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) f(x, y) = base((x + i) % 64, y);
    frames.push_back(f);
  }
  EncoderConfig cfg;
  cfg.qscale = 1;
  std::vector<Plane16> kept;
  auto stream = encode_stream(frames, cfg, &kept);
  auto bytes = serialize(stream);
  ResidualStream rs(bytes);
  std::size_t i = 0;
  while (auto r = rs.next()) {
    for (std::size_t p = 0; p < kept[i].size(); ++p)
      ASSERT_LE(std::abs(r->values.data()[p] - kept[i].data()[p]), 2);
    ++i;
  }
  EXPECT_EQ(i, frames.size());
}

TEST(Encoder, RejectsBadConfig) {
  EncoderConfig cfg;
  cfg.qscale = 0;
  EXPECT_THROW(cfg.validate(), FormatError);
  cfg = {};
  cfg.search_range = 16;
  EXPECT_THROW(cfg.validate(), FormatError);
}

class IngestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("resacc_ingest_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(IngestTest, DirectoryAndPattern) {
  for (int i = 0; i < 10; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "f%04d.pgm", i);
    write_pgm(dir_ / name, Plane8(320, 240, static_cast<std::uint8_t>(i)));
  }
  auto frames = ingest_frames(dir_.string());
  ASSERT_EQ(frames.size(), 10u);
  EXPECT_EQ(frames[3](0, 0), 3);
  EXPECT_EQ(ingest_frames((dir_ / "f%04d.pgm").string()).size(), 10u);
  EXPECT_EQ(ingest_frames((dir_ / "f000?.pgm").string()).size(), 10u);
}

TEST_F(IngestTest, Errors) {
  try {
    ingest_frames((dir_ / "none_*.pgm").string());
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.frame_index(), -1);
    EXPECT_NE(std::string(e.what()).find("no frames"), std::string::npos);
  }
  write_pgm(dir_ / "a.pgm", Plane8(17, 16));
  try {
    ingest_frames((dir_ / "a.pgm").string());
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.frame_index(), 0);
  }
  fs::remove(dir_ / "a.pgm");
  write_pgm(dir_ / "a.pgm", Plane8(32, 16));
  write_pgm(dir_ / "b.pgm", Plane8(32, 16));
  write_pgm(dir_ / "c.pgm", Plane8(16, 16));
  try {
    ingest_frames(dir_.string());
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.frame_index(), 2);
  }
}

}  // namespace
}  // namespace resacc
