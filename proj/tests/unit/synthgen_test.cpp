#include <resacc/codec.hpp>
#include <resacc/errors.hpp>
#include <resacc/synthgen.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

namespace resacc {
namespace {

TEST(Mix, KnownValue) {
  // First output of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Generate, StaticClipRepeats) {
  ClipSpec s;
  s.width = 64;
  s.height = 48;
  s.sprite_width = s.sprite_height = 16;
  s.events = {{10, 0.0, 0.0}};
  auto frames = generate(s);
  ASSERT_EQ(frames.size(), 10u);
  for (const auto& f : frames) EXPECT_EQ(f, frames[0]);
}

TEST(Generate, MovingSpriteChangesAtVerticalEdges) {
  ClipSpec s;
  s.width = 96;
  s.height = 64;
  s.sprite_width = s.sprite_height = 24;
  s.start_x = 20;
  s.start_y = 20;
  s.events = {{4, 2.0, 0.0}};
  auto frames = generate(s);
  auto r = compute_residual(frames[2].luma(), frames[1].luma());
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 96; ++x) {
      const int left = 20 + 2;  // sprite at frame 1
      const int right = left + 24;
      const bool inside_rows = y >= 20 && y < 44;
      const bool edge = inside_rows && ((x >= left && x < left + 2) || (x >= right && x < right + 2));
      if (!edge) ASSERT_EQ(r(x, y), 0) << x << "," << y;
      else ASSERT_NE(r(x, y), 0) << x << "," << y;
    }
}

TEST(Generate, Deterministic) {
  ClipSpec s;
  s.noise = 3;
  s.flicker = 10;
  s.seed = 99;
  s.events = {{5, 1.5, -0.5}, {5, -2.0, 1.0}};
  EXPECT_EQ(generate(s), generate(s));
  auto other = s;
  other.seed = 100;
  EXPECT_NE(generate(s), generate(other));
}

TEST(Generate, NoiseStaysInRange) {
  ClipSpec s;
  s.width = s.height = 32;
  s.sprite_width = s.sprite_height = 8;
  s.background = 100;
  s.noise = 2;
  s.start_x = 0;
  s.start_y = 0;
  s.events = {{3, 0, 0}};
  for (const auto& f : generate(s))
    for (int y = 16; y < 32; ++y)
      for (int x = 16; x < 32; ++x) ASSERT_LE(std::abs(int(f(x, y)) - 100), 2);
}

TEST(Spec, Validation) {
  ClipSpec s;
  s.events = {{3, 0, 0}};
  s.sprite_width = 400;
  EXPECT_THROW(s.validate(), FormatError);
  s = {};
  EXPECT_THROW(s.validate(), FormatError);  // no events
  s.events = {{3, 0, 0}};
  s.width = 30;
  EXPECT_THROW(s.validate(), FormatError);
}

TEST(Spec, TextRoundTrip) {
  ClipSpec s;
  s.width = 160;
  s.height = 128;
  s.events = {{8, 2.5, 0}, {4, 0, -3}};
  s.profile = SpriteProfile::pyramid;
  s.pyramid_step = 6;
  s.start_x = 12.5;
  s.flicker = 7;
  s.seed = 18446744073709551615ULL;
  std::stringstream ss;
  write_clip_spec(ss, s);
  EXPECT_EQ(parse_clip_spec(ss), s);
  std::stringstream bad("width = 64\nwhat = 3\n");
  EXPECT_THROW(parse_clip_spec(bad), FormatError);
}

TEST(Corpus, Shapes) {
  auto actions = action_corpus(11);
  ASSERT_EQ(actions.size(), 30u);
  int train = 0;
  for (const auto& e : actions) train += e.split == "train";
  EXPECT_EQ(train, 15);
  auto surv = surveillance_corpus(7);
  ASSERT_EQ(surv.size(), 20u);
  for (const auto& e : surv) {
    EXPECT_EQ(e.spec.width, 320);
    EXPECT_EQ(e.spec.height, 240);
    EXPECT_NO_THROW(e.spec.validate());
  }
  EXPECT_EQ(action_corpus(11)[4].spec, actions[4].spec);
}

}  // namespace
}  // namespace resacc
